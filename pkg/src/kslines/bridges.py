"""Bridges to neighbouring theories: nabla integrals on time scales, interval
measures and simple functions, convergence theorems, finite Vitali
selection, and series on [0, w].
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from itertools import combinations
from typing import Callable

from . import _num as N
from . import lines as L
from .engine import (
    CERTIFIED,
    DIVERGENT,
    EXACT,
    NO_CERTIFICATE,
    IntegralResult,
    exact_integral,
    integrate,
)
from .errors import (
    HypothesisViolated,
    InvalidRegularity,
    NotAdmissible,
    OverlappingSets,
    SeriesDivergent,
    UnsupportedLine,
)
from .functions import Fn, OrdinalSeries, PartialSums, PiecewisePoly, add, indicator, scale
from .integrators import Integrator, MeasureView, as_integrator, mu_interval, outer_measure_bound
from .lines import IntervalSpec, Ordinal, OrdinalLine, TimeScaleLine
from .partitions import Component, TaggedPartition

# ----------------------------------------------------------------------------
# nabla integral

def backward_jump(T: TimeScaleLine, x):
    """ρ(x) = sup{y < x}, with ρ(a) = a."""
    T.check(x)
    p = T.predecessor(x)
    return x if p is None else p


@dataclass
class NablaGauge:
    gammaL: Callable
    gammaR: Callable


def nabla_fine(T: TimeScaleLine, P: TaggedPartition, gamma: NablaGauge) -> bool:
    """[x_{i−1}, x_i] ⊆ [t − γL(t), t + γR(t)] for every component."""
    for c in P:
        if c.lo < c.tag - gamma.gammaL(c.tag) or c.hi > c.tag + gamma.gammaR(c.tag):
            return False
    return True


def nabla_sum(f: Fn, G, P: TaggedPartition):
    """Σ f(t_i)(G(x_i) − G(x_{i−1})), without the leading term."""
    s = 0
    for c in P:
        s += f(c.tag) * (G(c.hi) - G(c.lo))
    return s


def _nabla_partition(T: TimeScaleLine, cuts, n: int):
    """Right-tagged partition: every smooth cell split in n equal parts, gaps as single steps."""
    comps = []
    widths = {}
    for u, v in zip(cuts, cuts[1:]):
        if T.component_index(u) != T.component_index(v):
            comps.append(Component(u, v, v))
            continue
        h = (v - u) / n
        prev = u
        for i in range(1, n + 1):
            x = v if i == n else u + i * h
            comps.append(Component(prev, x, x))
            widths[x] = h
            prev = x
    if not comps:
        comps.append(Component(T.zero, T.zero, T.zero))
    return TaggedPartition(T, comps), widths


def _neville_at_zero(hs, vals):
    """Value at h = 0 of the interpolating polynomial through (hs, vals)."""
    p = list(vals)
    m = len(hs)
    for k in range(1, m):
        for i in range(m - k):
            p[i] = (hs[i + k] * p[i] - hs[i] * p[i + 1]) / (hs[i + k] - hs[i])
    return p[0]


@dataclass
class NablaReport:
    nabla: IntegralResult
    ks: IntegralResult
    lhs: object
    rhs: object
    defect: object


def nabla_integrate(f: PiecewisePoly, G, T: TimeScaleLine | None = None, tol=1e-9) -> NablaReport:
    """∇-integral from right-tagged γ-fine Riemann sums, extrapolated to zero mesh.

    With piecewise-polynomial operands the sums are polynomials in the mesh,
    so polynomial extrapolation through enough levels recovers the limit.
    The report compares ∫f dG with f(a)G(a) + ∇-integral.
    """
    G = as_integrator(G)
    T = T or G.line
    if not isinstance(T, TimeScaleLine):
        raise UnsupportedLine("nabla integrals live on time scales")
    g = G.fn
    if not isinstance(g, PiecewisePoly) or not isinstance(f, PiecewisePoly):
        raise UnsupportedLine("nabla bridge needs piecewise-polynomial operands")
    if not g.is_right_continuous():
        raise InvalidRegularity("nabla bridge needs a right-continuous integrator")
    cuts = sorted(set(f.breaks) | set(g.breaks))
    deg = 1
    for u, v in zip(cuts, cuts[1:]):
        pf, pg = f.poly_on(u, v), g.poly_on(u, v)
        if pf is not None:
            deg = max(deg, len(pf) - 1 + len(pg) - 1)
    levels = deg + 2
    hs, sums, trace = [], [], []
    for j in range(levels):
        n = 1 << j
        P, widths = _nabla_partition(T, cuts, n)
        gamma = NablaGauge(
            lambda x, w=widths: max(x - backward_jump(T, x), w.get(x, 0)),
            lambda x, w=widths: w.get(x, 0) if x != T.one else 0,
        )
        if not nabla_fine(T, P, gamma):
            raise AssertionError("constructed partition is not γ-fine")
        s = nabla_sum(f, g, P)
        hs.append(Fraction(1, n) if not isinstance(s, float) else 1.0 / n)
        sums.append(s)
        trace.append((f"mesh 1/{n}; {len(P)} components", s))
    value = _neville_at_zero(hs, sums)
    prev = _neville_at_zero(hs[:-1], sums[:-1])
    eps = abs(value - prev)
    status = EXACT if eps == 0 else (CERTIFIED if eps <= tol else NO_CERTIFICATE)
    nab = IntegralResult(value, eps, status, trace + [("extrapolated", value)])
    ks = integrate(f, G, tol=tol)
    a = T.zero
    rhs = f(a) * G(a) + value
    return NablaReport(nab, ks, ks.value, rhs, abs(ks.value - rhs))


# ----------------------------------------------------------------------------
# simple functions and the measure side

@dataclass
class SimpleFunction:
    """Σ c_k χ_{B_k}; each B_k is a finite union of interval specs."""

    line: object
    terms: list = field(default_factory=list)

    def pieces(self):
        for coef, specs in self.terms:
            for s in specs:
                yield coef, s

    def check_disjoint(self):
        K = self.line
        all_specs = [s for _, s in self.pieces()]
        for s, t in combinations(all_specs, 2):
            if L.meets(K, s, t):
                raise OverlappingSets(f"{s.format(K)} meets {t.format(K)}")

    def as_function(self) -> Fn:
        K = self.line
        out = None
        for coef, s in self.pieces():
            term = indicator(K, s, coef)
            out = term if out is None else add(out, term)
        if out is None:
            out = indicator(K, L.IntervalSpec(K.zero, K.zero, True, True), 0)
        return out


def simple_function_integral(phi: SimpleFunction, G):
    """(KS value, Σ c_k μ_G(B_k), defect)."""
    G = as_integrator(G)
    phi.check_disjoint()
    ks = integrate(phi.as_function(), G).value
    M = MeasureView(G)
    meas = 0
    for coef, s in phi.pieces():
        meas += coef * mu_interval(M, s)
    return ks, meas, abs(ks - meas)


# ----------------------------------------------------------------------------
# convergence theorems

def _sample_points(K, extra=()):
    pts = set(extra)
    if K.points() is not None:
        return list(K.points())
    if isinstance(K, TimeScaleLine):
        for a, b in K.components:
            pts |= {a, b}
            if a < b:
                pts |= {a + (b - a) * Fraction(i, 32) for i in range(1, 32)}
        return sorted(pts)
    if isinstance(K, OrdinalLine):
        return sorted(pts | set(K.points() or []) | {K.zero, K.one}, key=K.key)
    return list(pts)


def _rational_at_zero(hs, vals):
    """Bulirsch–Stoer rational extrapolation to h = 0 (hs decreasing)."""
    T = [[v] for v in vals]
    for i in range(1, len(vals)):
        for k in range(1, i + 1):
            a, b = T[i][k - 1], T[i - 1][k - 1]
            c = T[i - 1][k - 2] if k >= 2 else 0
            diff = a - b
            den = None if diff == 0 or a == c else (hs[i - k] / hs[i]) * (1 - diff / (a - c)) - 1
            T[i].append(a if not den else a + diff / den)
    return T[-1][-1]


def extrapolate_to_zero(hs, vals):
    """(estimate, indicator, method): the polynomial or rational tableau, whichever settles better.

    The indicator is the change caused by the last (smallest-h) point.
    """
    best = None
    for name, fn in (("rational", _rational_at_zero), ("polynomial", _neville_at_zero)):
        est = fn(hs, vals)
        ind = abs(est - fn(hs[:-1], vals[:-1])) if len(hs) > 1 else math.inf
        if best is None or ind < best[1]:
            best = (est, ind, name)
    return best


@dataclass
class ConvergenceReport:
    mode: str
    integrals: list
    extrapolated: object
    target: object
    defect: object
    log: list


def convergence_harness(mode: str, family: Callable[[int], Fn], limit: Fn, G, m_max: int = 64, tol=1e-6,
                        lower: Fn | None = None, upper: Fn | None = None) -> ConvergenceReport:
    """Integrate f_m for m ≤ m_max, extrapolate in h = 1/m, compare with ∫ f dG.

    Hypotheses are checked on sample points: monotone in m (MCT), trapped
    between ``lower`` and ``upper`` (DCT), bounded below by ``lower`` or 0
    (Fatou). Extrapolation runs over m_max, m_max/2, …, so powers of two work
    best. Integrals rational in 1/m are extrapolated exactly; geometric terms
    such as q^m, from an atom of G where f_m = x^m decays, are only damped.
    """
    G = as_integrator(G)
    K = G.line
    mode = mode.upper() if mode.lower() != "fatou" else "Fatou"
    if mode not in ("MCT", "DCT", "Fatou"):
        raise ValueError(f"unknown mode {mode!r}")
    extra = set(limit.breakpoints())
    fams = {m: family(m) for m in range(1, m_max + 1)}
    for fm in fams.values():
        extra |= set(fm.breakpoints())
    pts = _sample_points(K, extra)
    log = []
    if mode == "MCT":
        up = all(fams[1](x) <= fams[2](x) for x in pts)
        for m in range(1, m_max):
            for x in pts:
                a, b = fams[m](x), fams[m + 1](x)
                if (up and b < a) or (not up and b > a):
                    raise HypothesisViolated("MCT", x, m, "sequence is not monotone")
        log.append(f"monotone {'increasing' if up else 'decreasing'} on {len(pts)} points")
    elif mode == "DCT":
        if lower is None or upper is None:
            raise ValueError("DCT needs lower and upper envelopes")
        for m, fm in fams.items():
            for x in pts:
                if not lower(x) <= fm(x) <= upper(x):
                    raise HypothesisViolated("DCT", x, m, "outside the envelope")
        log.append(f"dominated on {len(pts)} points")
    else:
        for m, fm in fams.items():
            for x in pts:
                floor = lower(x) if lower is not None else 0
                if fm(x) < floor:
                    raise HypothesisViolated("Fatou", x, m, "below the lower bound")
        log.append(f"bounded below on {len(pts)} points")
    ints = [integrate(fams[m], G, tol=tol).value for m in range(1, m_max + 1)]
    ms = []
    m = m_max
    while m >= 2 and len(ms) < 6:
        ms.append(m)
        m //= 2
    hs = [Fraction(1, m) for m in ms]
    vals = [ints[m - 1] for m in ms]
    extrap, indicator, method = extrapolate_to_zero(hs, vals)
    log.append(f"{method} extrapolation in 1/m over m = {', '.join(map(str, ms))}; last change {float(indicator):.3g}")
    target = integrate(limit, G, tol=tol).value
    if mode == "Fatou":
        defect = max(0, target - extrap)
        log.append(f"liminf of integrals {float(extrap):.12g} vs integral of liminf {float(target):.12g}")
    else:
        defect = abs(extrap - target)
    return ConvergenceReport(mode, ints, extrap, target, defect, log)


# ----------------------------------------------------------------------------
# Vitali

def dyadic_class(mu_I, mu_K):
    """n with μ(K)/2^n < μ(I) ≤ μ(K)/2^(n−1); None for μ(I) = 0."""
    if mu_I == 0:
        return None
    n = 1
    while not mu_I > mu_K / (2 ** n):
        n += 1
    return n


def vitali_select(F, M: MeasureView):
    """Greedy disjoint selection through dyadic measure classes.

    Returns (indices of the selection, hull map index → IntervalSpec).
    """
    K = M.line
    F = list(F)
    mus = [mu_interval(M, I) for I in F]
    mu_K = mu_interval(M, K.whole())
    classes = {}
    for i, m in enumerate(mus):
        classes.setdefault(dyadic_class(m, mu_K) if mu_K > 0 else None, []).append(i)
    order = sorted(k for k in classes if k is not None) + ([None] if None in classes else [])
    chosen = []
    for k in order:
        for i in classes[k]:
            if L.is_empty(K, F[i]):
                continue
            if all(not L.meets(K, F[i], F[j]) for j in chosen):
                chosen.append(i)
    phi = {}
    for j in chosen:
        members = [F[j]] + [F[i] for i in range(len(F)) if L.meets(K, F[i], F[j]) and 2 * mus[j] >= mus[i]]
        phi[j] = L.hull(K, members)
    return chosen, phi


def admissibility_witness(A, F, K):
    """None when F is admissible for A, else (a, disjoint subfamily hitting every member containing a)."""
    F = list(F)
    for a in A:
        hosts = [I for I in F if L.contains(K, I, a)]
        avoid = [J for J in F if not L.contains(K, J, a) and not L.is_empty(K, J)]

        def search(chosen):
            for I in hosts:
                if not any(L.meets(K, I, J) for J in chosen):
                    break
            else:
                return list(chosen)
            for J in avoid:
                if L.meets(K, I, J) and all(not L.meets(K, J, C) for C in chosen):
                    found = search(chosen + [J])
                    if found is not None:
                        return found
            return None

        w = search([])
        if w is not None:
            return a, w
    return None


@dataclass
class CoverReport:
    selection: list
    threshold: object
    uncovered: list
    defect: object


def vitali_cover_finite(A, F, M: MeasureView, eps, check: bool = True) -> CoverReport:
    """Finite disjoint H ⊆ F with μ*(A ∖ ∪H) < ε, via the large members of the Vitali selection."""
    K = M.line
    F = list(F)
    if check:
        w = admissibility_witness(A, F, K)
        if w is not None:
            raise NotAdmissible(*w)
    chosen, _ = vitali_select(F, M)
    mus = {j: mu_interval(M, F[j]) for j in chosen}
    cands = sorted(set(mus.values()))
    budget = N.exact(eps) / 5
    delta = math.inf
    for d in reversed(cands + [math.inf]):
        if sum(m for m in mus.values() if m < d) < budget:
            delta = d
            break
    H = [F[j] for j in chosen if mus[j] >= delta]
    uncovered = [a for a in A if not any(L.contains(K, I, a) for I in H)]
    return CoverReport(H, delta, uncovered, outer_measure_bound(M, uncovered))


# ----------------------------------------------------------------------------
# series on [0, w]

def omega_line() -> OrdinalLine:
    return OrdinalLine("w")


def series_terms(kind: str, **params):
    """(term rule, alternating flag, nonnegative flag, exact total or None)."""
    if kind == "alt-harmonic":
        return (lambda i: (-1.0 if i % 2 else 1.0) / (i + 1)), True, False, None
    if kind == "geometric":
        r = float(N.exact(params.get("ratio", "1/2")))
        a0 = float(N.exact(params.get("first", 1)))
        if not abs(r) < 1:
            raise SeriesDivergent("geometric ratio must lie in (-1, 1)")
        return (lambda i: a0 * r ** i), r < 0, r >= 0 and a0 >= 0, a0 / (1 - r)
    if kind == "rearranged":
        p, q = int(params.get("positive", 1)), int(params.get("negative", 2))

        def term(i):
            blk, r = divmod(i, p + q)
            if r < p:
                return 1.0 / (2 * (blk * p + r) + 1)
            return -1.0 / (2 * (blk * q + r - p) + 2)

        return term, False, False, None
    if kind == "explicit":
        cs = [N.exact(c) for c in params["coefficients"]]
        return (lambda i: cs[i] if i < len(cs) else 0), False, all(c >= 0 for c in cs), sum(cs)
    raise ValueError(f"unknown series kind {kind!r}")


def series_integrator(kind: str = "alt-harmonic", line: OrdinalLine | None = None, **params) -> Integrator:
    """G(n) = Σ_{i≤n} a_i on [0, w], continuous at w."""
    term, alt, nonneg, total = series_terms(kind, **params)
    K = line or omega_line()
    fn = OrdinalSeries(K, PartialSums(term), at_limit=None, limit=total, alternating=alt,
                       nondecreasing=nonneg, name=kind)
    fn.term = term
    return Integrator(fn, "nondecreasing" if nonneg else "amenable", validate=False)


def series_integrand(values: Callable[[int], float] | None = None, at_limit=0.0,
                     line: OrdinalLine | None = None) -> OrdinalSeries:
    K = line or omega_line()
    rule = values or (lambda n: 1.0)
    return OrdinalSeries(K, rule, at_limit=at_limit, limit=None, name="f")


def accelerate_limit(seq: Callable[[int], float], alternating: bool, tol=1e-12, max_n: int = 1 << 22):
    """(estimate, Cauchy width) for lim seq(n) over doubling windows."""
    ests, n = [], 4
    while n <= max_n:
        e = (seq(n) + seq(n + 1)) / 2 if alternating else seq(n)
        ests.append(e)
        if len(ests) >= 3:
            w = max(ests[-3:]) - min(ests[-3:])
            if w <= tol:
                return ests[-1], w
        n *= 2
    if len(ests) >= 3:
        return ests[-1], max(ests[-3:]) - min(ests[-3:])
    return None, math.inf


def _index(x):
    return x.coeffs[0] if x.degree == 0 else None


def series_integral(f: Fn, G, a, b, tol=1e-6, max_n: int = 1 << 22, accelerate: bool | None = None) -> IntegralResult:
    """∫_a^b f dG on [0, w] from the Riemann sums of the partitions
    {([i−1, i], i) : a < i ≤ N} ∪ {([N, w], w)}, certified by a Cauchy window.
    """
    G = as_integrator(G)
    g = G.fn
    K = G.line
    ia, ib = _index(a), _index(b)
    if ia is None:
        v = f(a) * G(a)
        return IntegralResult(v, 0, EXACT, [("degenerate", v)])
    lead = f(a) * G(a)
    if ib is not None:
        s = lead
        for i in range(ia + 1, ib + 1):
            s += f(L.Ordinal(i)) * (G(L.Ordinal(i)) - G(L.Ordinal(i - 1)))
        return IntegralResult(s, 0, EXACT, [("finite sum", s)])
    alt = getattr(g, "alternating", False) if accelerate is None else accelerate
    fw = f(b)
    Gw = G(b) if fw != 0 else 0
    fr = f.rule if isinstance(f, OrdinalSeries) else (lambda i: f(L.Ordinal(i)))
    gr = g.rule if isinstance(g, OrdinalSeries) else (lambda i: g(L.Ordinal(i)))

    def riemann(n):
        return W + fw * (Gw - gr(n)) if fw != 0 else W

    W, done, prev_g = lead, ia, gr(ia)
    trace, diffs, stalls = [], [], 0
    n = max(4, ia + 4)
    while n <= max_n:
        for i in range(done + 1, n + 1):
            gi = gr(i)
            W += fr(i) * (gi - prev_g)
            prev_g = gi
        done = n
        s_n = riemann(n)
        if alt:
            gi = gr(n + 1)
            s_n1 = W + fr(n + 1) * (gi - prev_g) + (fw * (Gw - gi) if fw != 0 else 0)
            est = (s_n + s_n1) / 2
        else:
            est = s_n
        trace.append((f"N={n}" + (" (mean of consecutive sums)" if alt else ""), est))
        if len(trace) >= 2:
            d = abs(trace[-1][1] - trace[-2][1])
            diffs.append(d)
            if len(trace) >= 3:
                w = max(t[1] for t in trace[-3:]) - min(t[1] for t in trace[-3:])
                if w <= tol:
                    return IntegralResult(est, w, CERTIFIED, trace)
            if len(diffs) >= 2 and diffs[-2] > 0 and d / diffs[-2] >= 0.9 and d > tol:
                stalls += 1
                if stalls >= 3:
                    raise SeriesDivergent(f"partial sums fail the Cauchy test (window change {d:.3g})")
            else:
                stalls = 0
        n *= 2
    w = max(t[1] for t in trace[-3:]) - min(t[1] for t in trace[-3:])
    return IntegralResult(trace[-1][1], w, NO_CERTIFICATE, trace)


def ordinal_series_integral(G, f: Fn | None = None, tol=1e-6, max_n: int = 1 << 22) -> IntegralResult:
    """Σ f(i)a_i as ∫_{[0,w]} f dG with G the partial sums of a."""
    G = as_integrator(G)
    f = f or series_integrand()
    return series_integral(f, G, G.line.zero, G.line.one, tol, max_n)


def series_primitive(f: Fn, G) -> OrdinalSeries:
    G = as_integrator(G)
    g = G.fn
    K = G.line
    fr = f.rule if isinstance(f, OrdinalSeries) else (lambda i: f(L.Ordinal(i)))
    gr = g.rule if isinstance(g, OrdinalSeries) else (lambda i: g(L.Ordinal(i)))

    def inc(i):
        if i == 0:
            return fr(0) * gr(0)
        return fr(i) * (gr(i) - gr(i - 1))

    alt = getattr(g, "alternating", False)
    cache = {}

    def at_limit():
        if "v" not in cache:
            try:
                cache["v"] = series_integral(f, G, K.zero, K.one).value
            except SeriesDivergent:
                cache["v"] = math.nan
        return cache["v"]

    return OrdinalSeries(K, PartialSums(inc), at_limit=at_limit, limit=None, alternating=alt, name="F")


# ----------------------------------------------------------------------------
# a small catalog of sequences for the convergence harness

def standard_sequence(name: str, K: TimeScaleLine):
    """(family, limit, lower, upper) for a named sequence on a time scale inside [0, 1]."""
    if not isinstance(K, TimeScaleLine) or K.zero < 0 or K.one > 1:
        raise UnsupportedLine("catalog sequences live on time scales inside [0, 1]")
    PP = PiecewisePoly
    zero = PP.constant(K, 0)
    one_at_1 = PP.indicator(K, IntervalSpec(K.one, K.one)) if K.one == 1 else zero
    if name == "power":
        return (lambda m: PP.polynomial(K, [0] * m + [1])), one_at_1, zero, PP.constant(K, 1)
    if name == "bump":
        return (lambda m: PP.polynomial(K, [0] * m + [1] + [0] * (m - 1) + [-1])), zero, zero, PP.constant(K, Fraction(1, 4))
    if name == "alternating":
        def alt(m):
            p = [0] * m + [(-1) ** m, (-1) ** (m + 1)]
            return PP.polynomial(K, p)

        return alt, zero, PP.constant(K, -1), PP.constant(K, 1)
    if name == "ramp":
        def ramp(m):
            c = Fraction(1, m)
            if c >= K.one:
                return PP.polynomial(K, [0, m])
            return PP.from_pieces(K, [(K.zero, c, [0, m]), (c, K.one, [1])])

        pos = PP.from_assignments(K, [(IntervalSpec(K.zero, K.one, True, False), [1])])
        return ramp, pos, zero, PP.constant(K, 1)
    if name == "spike":
        def spike(m):
            c = Fraction(1, m)
            return PP.from_assignments(K, [(IntervalSpec(K.zero, c, True, False), [m])])

        return spike, zero, zero, None
    raise ValueError(f"unknown sequence {name!r}")
