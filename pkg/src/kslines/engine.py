"""Riemann sums, exact and adaptive G-integration, and the derived identities."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction

from . import _num as N
from . import lines as L
from .errors import (
    InvalidRegularity,
    NoProgress,
    NotAmenable,
    NotNondecreasing,
    SystemNotFine,
    UnsupportedLine,
)
from .functions import (
    BlackBox,
    Fn,
    OrdinalEventual,
    OrdinalSeries,
    PiecewisePoly,
    Table,
    absolute,
    poly_integral,
)
from .integrators import Integrator, as_integrator, total_variation
from .lines import CompactLine, IntervalSpec, Ordinal
from .partitions import Component, Gauge, TaggedPartition, cousin_partition, is_fine, refine_and_expose

EXACT, CERTIFIED, NO_CERTIFICATE, DIVERGENT = "Exact", "Certified", "NoCertificate", "Divergent"

DEFAULT_MAX_REFINE = 40
CONTRACTION_RATIO = 0.9
MAX_COMPONENTS = 1 << 16


@dataclass
class IntegralResult:
    value: object
    error_bound: object
    status: str
    trace: list = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return self.status in (EXACT, CERTIFIED)

    def status_label(self) -> str:
        if self.status == CERTIFIED:
            return f"Certified({float(self.error_bound):.3g})"
        return self.status


def riemann_sum(f: Fn, G, P: TaggedPartition):
    """f(0_I)G(0_I) + Σ f(t_i)(G(x_i) − G(x_{i−1})), summed left to right."""
    s = f(P.start) * G(P.start)
    for c in P.components:
        s += f(c.tag) * (G(c.hi) - G(c.lo))
    return s


# ----------------------------------------------------------------------------
# exact reduction

def _bounds(K, I):
    if I is None:
        return K.zero, K.one
    L.validate(K, I)
    if I.lower_open or I.upper_open:
        raise ValueError("integration intervals are closed")
    return I.lower, I.upper


def exact_integral(f: Fn, G, a, b):
    """∫_a^b f dG by structural reduction, or None when no exact route applies.

    The reduction is f(a)G(a) plus ∫ f·G′ over smooth cells plus f(c) times
    every jump of G in (a, b], right jumps included.
    """
    K = G.line
    g = G.fn if isinstance(G, Integrator) else G
    if a == b:
        return f(a) * g(a)
    if isinstance(K, L.TimeScaleLine) and isinstance(g, PiecewisePoly):
        smooth_f = isinstance(f, PiecewisePoly)
        if not smooth_f and any(not N.is_const(p) for _, _, p in g.cells(a, b)):
            return None
        grid = set(g.breaks) | {a, b}
        if smooth_f:
            grid |= set(f.breaks)
        grid = sorted(p for p in grid if a <= p <= b)
        val = f(a) * g(a)
        for u, v in zip(grid, grid[1:]):
            pg = g.poly_on(u, v)
            if pg is None:
                continue
            dg = N.pderiv(pg)
            if N.is_const(pg):
                continue
            val += poly_integral(N.pmul(f.poly_on(u, v), dg), u, v)
        for c in grid:
            if c != a:
                val += f(c) * (g(c) - g.left_limit(c))
            if c != b and K.right_dense(c):
                rj = g.right_limit(c) - g(c)
                if rj != 0:
                    val += f(c) * rj
        return val
    pts = K.points()
    if pts is not None:
        val = f(a) * g(a)
        prev = a
        for p in pts:
            if K.lt(a, p) and K.le(p, b):
                val += f(p) * (g(p) - g(prev))
                prev = p
        return val
    if isinstance(g, OrdinalEventual):
        val = f(a) * g(a)
        for c in g.support_points(a, b):
            val += f(c) * (g(c) - g.left_limit(c))
        return val
    return None


# ----------------------------------------------------------------------------
# gauge schedules

def _structural_points(f, G, a, b):
    K = G.line
    pts = set()
    for src in (f, G):
        for c in src.breakpoints():
            if K.lt(a, c) and K.le(c, b):
                pts.add(c)
    return sorted(pts, key=K.key)


def schedule_gauge(f: Fn, G, a, b, n: int) -> Gauge:
    """Round-n gauge of the refinement schedule on [a, b]."""
    K = G.line
    C = _structural_points(f, G, a, b)
    if isinstance(K, L.TimeScaleLine):
        width = (b - a) if b != a else 1
        r = width / (1 << n) if not isinstance(width, float) else width * 2.0 ** -n
        rb = r / (1 << (3 * n)) if not isinstance(r, float) else r * 2.0 ** (-3 * n)
        bset = set(C) | {a}
        guards = [c for c in bset if c != b and K.right_dense(c) and G.right_limit(c) != G(c)]

        def rule(x):
            s = K.ball(x, rb if x in bset else r)
            for c in guards:
                if x > c:
                    s = L.intersect(K, s, IntervalSpec(K.floor((c + x) / 2), K.one, True, False))
            return s

        base = Gauge(K, rule, f"radius 2^-{n}")
        return refine_and_expose(K, base, None, [c for c in C if c != K.zero])
    if K.points() is not None:
        return Gauge(K, _round_rule(K, n), "points")
    if isinstance(K, L.OrdinalLine):
        return Gauge(K, _round_rule(K, n), f"tails 2^{n + 2}")
    base = Gauge(K, _round_rule(K, n), f"round {n}")
    return refine_and_expose(K, base, None, [c for c in C if c != K.zero])


def _round_rule(K, n):
    """Round-n neighbourhoods ignoring the operands; composite lines recurse into their factors."""
    if K.points() is not None:
        def rule(x):
            p, s = K.predecessor(x), K.successor(x)
            return IntervalSpec(x if p is None else p, x if s is None else s, p is not None, s is not None)

        return rule
    if isinstance(K, L.TimeScaleLine):
        r = (K.one - K.zero) / (1 << n)
        return lambda x: K.ball(x, r)
    if isinstance(K, L.OrdinalLine) and K.alpha.degree <= 1:
        tail = 1 << (n + 2)

        def rule(x):
            if x.is_limit():
                return IntervalSpec(Ordinal(tail, x.coeffs[1] - 1), x, True, False)
            p = K.predecessor(x)
            return IntervalSpec(x if p is None else p, x, p is not None, False)

        return rule
    if isinstance(K, L.LexLine):
        outer, inner = _round_rule(K.outer, n), _round_rule(K.inner, n)

        def rule(x):
            a, b = x.left, x.right
            if not K.left_dense(x):
                lo, lo_open = x, False
            elif b != K.inner.zero:
                si = inner(b)
                lo, lo_open = L.Pair(a, si.lower), si.lower_open
            else:
                so = outer(a)
                lo, lo_open = (L.Pair(so.lower, K.inner.one), True) if so.lower_open else (L.Pair(so.lower, K.inner.zero), False)
            if not K.right_dense(x):
                hi, hi_open = x, False
            elif b != K.inner.one:
                si = inner(b)
                hi, hi_open = L.Pair(a, si.upper), si.upper_open
            else:
                so = outer(a)
                hi, hi_open = (L.Pair(so.upper, K.inner.zero), True) if so.upper_open else (L.Pair(so.upper, K.inner.one), False)
            return IntervalSpec(lo, hi, lo_open, hi_open)

        return rule
    if isinstance(K, L.DoubleArrowLine):
        base = _round_rule(K.base, n)

        def rule(x):
            s = base(x.base)
            if not K.left_dense(x):
                lo, lo_open = x, False
            elif s.lower_open:
                lo, lo_open = K._top(s.lower), True
            else:
                lo, lo_open = L.Arrow(s.lower, 0), False
            if not K.right_dense(x):
                hi, hi_open = x, False
            elif s.upper_open:
                hi, hi_open = L.Arrow(s.upper, 0), True
            else:
                hi, hi_open = K._top(s.upper), False
            return IntervalSpec(lo, hi, lo_open, hi_open)

        return rule
    raise UnsupportedLine(f"no refinement schedule for {K!r}")


# ----------------------------------------------------------------------------
# integrate

def integrate(f: Fn, G, I: IntervalSpec | None = None, tol=1e-9, max_refine: int = DEFAULT_MAX_REFINE,
              method: str = "auto") -> IntegralResult:
    """∫_I f dG with the restriction semantics: the leading term is f(0_I)G(0_I)."""
    G = as_integrator(G)
    K = G.line
    a, b = _bounds(K, I)
    if (a != K.zero or b != K.one) and not G.at_least("amenable"):
        raise InvalidRegularity("subinterval integrals need an amenable integrator")
    if isinstance(G.fn, OrdinalSeries) or isinstance(f, OrdinalSeries):
        from .bridges import series_integral

        return series_integral(f, G, a, b, tol)
    if method in ("auto", "exact"):
        v = exact_integral(f, G, a, b)
        if v is not None:
            return IntegralResult(v, 0, EXACT, [("exact", v)])
        if method == "exact":
            raise UnsupportedLine("no exact route for these operands")
    return adaptive_integral(f, G, a, b, tol, max_refine)


def adaptive_integral(f: Fn, G, a, b, tol, max_refine) -> IntegralResult:
    """Riemann sums over the refining gauge schedule, certified by a Cauchy window."""
    G = as_integrator(G)
    K = G.line
    if a == b:
        v = f(a) * G(a)
        return IntegralResult(v, 0, CERTIFIED, [("degenerate", v)])
    trace = []
    diffs = []
    stalls = 0
    for n in range(max_refine + 1):
        delta = schedule_gauge(f, G, a, b, n)
        try:
            P = cousin_partition(K, delta, a, b, max_steps=MAX_COMPONENTS)
        except NoProgress:
            break
        s = riemann_sum(f, G, P)
        trace.append((f"{delta.provenance}; {len(P)} components", s))
        if len(trace) >= 2:
            d = abs(s - trace[-2][1])
            diffs.append(d)
            window = [t[1] for t in trace[-3:]]
            eps = max(abs(x - y) for x in window for y in window)
            if len(trace) >= 3 and eps <= tol:
                return IntegralResult(s, eps, CERTIFIED, trace)
            if len(diffs) >= 2 and diffs[-2] > 0 and d / diffs[-2] >= CONTRACTION_RATIO and d > tol:
                stalls += 1
                if stalls >= 3:
                    break
            else:
                stalls = 0
        if len(P) * 2 > MAX_COMPONENTS:
            break
    est = diffs[-1] if diffs else math.inf
    return IntegralResult(trace[-1][1] if trace else math.nan, est, NO_CERTIFICATE, trace)


# ----------------------------------------------------------------------------
# derived operations

def singleton_integral(G, c):
    """∫_K χ_{c} dG = G(c) − L_G(c)."""
    G = as_integrator(G)
    if not G.at_least("amenable"):
        raise NotAmenable("singleton formula needs an amenable integrator")
    G.line.check(c)
    return G(c) - G.left_limit(c)


def indicator_integral(f: Fn, G, I: IntervalSpec, tol=1e-9) -> IntegralResult:
    """∫_K f_I dG = ∫_I f dG − f(0_I)·L_G(0_I)."""
    G = as_integrator(G)
    if not G.at_least("amenable"):
        raise NotAmenable("indicator formula needs an amenable integrator")
    r = integrate(f, G, I, tol)
    v = r.value - f(I.lower) * G.left_limit(I.lower)
    return IntegralResult(v, r.error_bound, r.status, r.trace)


@dataclass
class AdditivityReport:
    lhs: object
    rhs: object
    defect: object
    bound: object


def additivity_check(f: Fn, G, a, c, b, tol=1e-9) -> AdditivityReport:
    G = as_integrator(G)
    K = G.line
    if not (K.le(a, c) and K.le(c, b)):
        raise ValueError("additivity needs a ≤ c ≤ b")
    whole = integrate(f, G, IntervalSpec.closed(a, b), tol)
    left = integrate(f, G, IntervalSpec.closed(a, c), tol)
    right = integrate(f, G, IntervalSpec.closed(c, b), tol)
    rhs = left.value + right.value - f(c) * G(c)
    return AdditivityReport(whole.value, rhs, abs(whole.value - rhs),
                            whole.error_bound + left.error_bound + right.error_bound)


def saks_henstock_residual(f: Fn, G, S, delta: Gauge, eps=None, tol=1e-12, cache: dict | None = None):
    """(signed, absolute) residuals of a δ-fine tagged system against subinterval integrals.

    ``cache`` maps (lo, hi) to ∫_lo^hi f dG and may be shared between systems
    drawn from one partition.
    """
    G = as_integrator(G)
    K = G.line
    if not is_fine(K, S, delta):
        raise SystemNotFine("tagged system is not δ-fine")
    cache = {} if cache is None else cache
    signed, absolute_sum = 0, 0
    for comp in S:
        key = (comp.lo, comp.hi)
        if key not in cache:
            cache[key] = integrate(f, G, IntervalSpec.closed(comp.lo, comp.hi), tol).value
        ref = cache[key]
        term = f(comp.tag) * (G(comp.hi) - G(comp.lo)) + f(comp.lo) * G(comp.lo) - ref
        signed += term
        absolute_sum += abs(term)
    return signed, absolute_sum


def _poly_sup(p, u, v):
    """Upper bound of |p| on [u, v]."""
    m = max(abs(u), abs(v))
    return sum(abs(c) * m ** k for k, c in enumerate(p))


def epsilon_gauge(f: Fn, G, eps) -> Gauge:
    """Gauge whose fine partitions all have Riemann sums within ε of the integral.

    Structural breakpoints are exposed; on time scales the radius is chosen
    from bounds on |f|, |f′| and |G′| over the smooth cells.
    """
    G = as_integrator(G)
    K = G.line
    a, b = K.zero, K.one
    C = [c for c in _structural_points(f, G, a, b) if c != K.zero]
    if isinstance(K, L.TimeScaleLine):
        g = G.fn
        if not isinstance(g, PiecewisePoly) or not isinstance(f, PiecewisePoly):
            raise UnsupportedLine("ε-gauges need piecewise-polynomial operands")
        lip, mg, sup_f, length = 0, 0, 0, 0
        for u, v, p in g.cells():
            mg = max(mg, _poly_sup(N.pderiv(p), u, v))
            length += v - u
        for u, v, p in f.cells():
            lip = max(lip, _poly_sup(N.pderiv(p), u, v))
            sup_f = max(sup_f, _poly_sup(p, u, v))
        sup_f = max([sup_f] + [abs(x) for x in f.values])
        denom = 2 * lip * mg * length + 4 * (len(C) + 1) * sup_f * mg
        r = Fraction(eps) / (denom + 1) if not isinstance(eps, float) else eps / (float(denom) + 1.0)
        r = Fraction(r).limit_denominator(10 ** 12) if isinstance(r, float) else r
        r = min(r, (b - a) if b != a else 1)
        guards = [c for c in [K.zero] + C if c != K.one and K.right_dense(c) and G.right_limit(c) != G(c)]

        def rule(x):
            s = K.ball(x, r)
            for c in guards:
                if x > c:
                    s = L.intersect(K, s, IntervalSpec(K.floor((c + x) / 2), K.one, True, False))
            return s

        return refine_and_expose(K, Gauge(K, rule, f"epsilon {eps}"), None, C)
    if K.points() is not None:
        return schedule_gauge(f, G, a, b, 0)
    if isinstance(K, L.OrdinalLine) and K.alpha.degree <= 1:
        horizon = max([c.coeffs[0] for c in _structural_points(f, G, a, b)] + [0]) + 1

        def rule(x):
            if x.is_limit():
                return IntervalSpec(Ordinal(horizon, x.coeffs[1] - 1), x, True, False)
            p = K.predecessor(x)
            return IntervalSpec(x if p is None else p, x, p is not None, False)

        return Gauge(K, rule, f"epsilon {eps}")
    raise UnsupportedLine(f"no ε-gauge construction for {K!r}")


# ----------------------------------------------------------------------------
# primitives and absolute integrability

def primitive(f: Fn, G) -> Fn:
    """F(x) = ∫_{0_K}^x f dG, structured whenever the operands are."""
    G = as_integrator(G)
    K = G.line
    g = G.fn
    if isinstance(K, L.TimeScaleLine) and isinstance(g, PiecewisePoly) and isinstance(f, PiecewisePoly):
        grid = sorted(set(g.breaks) | set(f.breaks))
        values, polys = [], []
        acc = f(grid[0]) * g(grid[0])
        values.append(acc)
        for u, v in zip(grid, grid[1:]):
            pg = g.poly_on(u, v)
            if pg is None:
                acc = acc + f(v) * (g(v) - g(u))
                polys.append(None)
                values.append(acc)
                continue
            P = N.pinteg(N.pmul(f.poly_on(u, v), N.pderiv(pg)))
            start = acc + f(u) * (g.right_limit(u) - g(u)) - N.peval(P, u)
            cell = N.padd(P, [start])
            polys.append(cell)
            acc = N.peval(cell, v) + f(v) * (g(v) - g.left_limit(v))
            values.append(acc)
        return PiecewisePoly(K, grid, values, polys).simplified()
    pts = K.points()
    if pts is not None:
        vals, acc, prev = {}, None, None
        for p in pts:
            acc = f(p) * g(p) if prev is None else acc + f(p) * (g(p) - g(prev))
            vals[p] = acc
            prev = p
        return Table(K, vals)
    if isinstance(g, OrdinalEventual):
        horizon = max(len(v) for v, _ in g.blocks) + 2
        if isinstance(f, OrdinalEventual):
            horizon = max(horizon, max(len(v) for v, _ in f.blocks) + 2)
        return OrdinalEventual.from_func(
            K, lambda x: exact_integral(f, G, K.zero, x), horizon=horizon)
    if isinstance(g, OrdinalSeries) or isinstance(f, OrdinalSeries):
        from .bridges import series_primitive

        return series_primitive(f, G)
    return BlackBox(K, lambda x: integrate(f, G, IntervalSpec.closed(K.zero, x)).value,
                    breakpoints=_structural_points(f, G, K.zero, K.one))


def absolute_integrate(f: Fn, G, tol=1e-9) -> IntegralResult:
    """∫|f| dG through |f(0_K)|G(0_K) + Var(F); Divergent when Var(F) diverges."""
    G = as_integrator(G)
    K = G.line
    F = primitive(f, G)
    V = total_variation(Integrator(F, "arbitrary", validate=False))
    if V.divergent:
        return IntegralResult(V.value, math.inf, DIVERGENT, [("variation lower bound", V.value)])
    if G.regularity != "nondecreasing":
        raise NotNondecreasing("absolute integrability needs a nondecreasing amenable integrator")
    v = abs(f(K.zero)) * G(K.zero) + V.value
    status = EXACT if V.exact else CERTIFIED
    return IntegralResult(v, 0 if V.exact else tol, status, [("|f(0)|G(0) + Var(F)", v)])


def continuity_bound(f: Fn, G):
    """|f(0_K)G(0_K)| + sup|f|·Var(G) for structured operands."""
    G = as_integrator(G)
    K = G.line
    if isinstance(f, PiecewisePoly):
        sup = max([abs(v) for v in f.values] + [_cell_sup_exact(p, u, v) for u, v, p in f.cells()])
    elif isinstance(f, Table):
        sup = max(abs(v) for v in f.values.values())
    elif isinstance(f, OrdinalEventual):
        sup = max(abs(v) for vals, t in f.blocks for v in vals + [t])
    else:
        raise UnsupportedLine("sup|f| needs a structured integrand")
    return abs(f(K.zero) * G(K.zero)) + sup * total_variation(G).value


def _cell_sup_exact(p, u, v):
    pts = [u, v] + N.real_roots_in(N.pderiv(p), u, v)
    return max(abs(N.peval(p, x)) for x in pts)
