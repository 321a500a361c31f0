"""Integrators with declared regularity, L_G, variation and the interval measure μ_G."""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from . import lines as L
from .errors import InvalidRegularity, NotNBV, NotRegulated, UnsupportedSet
from .functions import BlackBox, Fn, OrdinalEventual, OrdinalSeries, PiecewisePoly, Table, poly_variation
from .lines import CompactLine, IntervalSpec

LEVELS = ("arbitrary", "amenable", "nbv", "nondecreasing")

VARIATION_CEILING = 1e9


class Integrator:
    """G together with its regularity level.

    Levels are cumulative: nbv implies amenable; nondecreasing means amenable,
    nonnegative and nondecreasing. Declarations are checked against the
    structure whenever the structure allows it.
    """

    def __init__(self, fn: Fn, regularity: str = "arbitrary", validate: bool = True):
        if regularity not in LEVELS:
            raise InvalidRegularity(f"unknown regularity {regularity!r}")
        self.fn = fn
        self.line = fn.line
        self.regularity = regularity
        if validate:
            self.validate()

    def __repr__(self):
        return f"Integrator({type(self.fn).__name__}, {self.regularity})"

    def __call__(self, x):
        return self.fn(x)

    def left_limit(self, x):
        return self.fn.left_limit(x)

    def right_limit(self, x):
        return self.fn.right_limit(x)

    def breakpoints(self):
        return self.fn.breakpoints()

    def at_least(self, level: str) -> bool:
        return LEVELS.index(self.regularity) >= LEVELS.index(level)

    def validate(self):
        fn = self.fn
        if self.at_least("amenable"):
            if isinstance(fn, PiecewisePoly) and not fn.is_right_continuous():
                c, _ = fn.right_jumps()[0]
                raise InvalidRegularity(f"declared amenable but not right-continuous at {self.line.format_point(c)}")
        if self.at_least("nbv"):
            tv = total_variation(self)
            if tv.divergent:
                raise InvalidRegularity("declared NBV but the variation diverges")
        if self.regularity == "nondecreasing":
            ok = True
            if isinstance(fn, PiecewisePoly):
                ok = fn.is_nondecreasing() and fn(self.line.zero) >= 0
            elif isinstance(fn, (Table, OrdinalEventual)):
                ok = _sequence_nondecreasing(self)
            elif isinstance(fn, OrdinalSeries):
                ok = fn.nondecreasing
            if not ok:
                raise InvalidRegularity("declared nondecreasing but the structure is not")
        return self

    def scale(self, lam, regularity=None):
        reg = regularity or ("nbv" if self.at_least("nbv") else self.regularity if self.regularity != "nondecreasing" else "nbv")
        if self.regularity == "nondecreasing" and lam >= 0 and regularity is None:
            reg = "nondecreasing"
        from .functions import scale

        return Integrator(scale(self.fn, lam), reg)


def _sequence_nondecreasing(G: Integrator) -> bool:
    K = G.line
    if G(K.zero) < 0:
        return False
    pts = G.fn.breakpoints()
    pts = sorted(pts, key=K.key)
    for x in pts:
        if x != K.zero and G(x) < G.left_limit(x):
            return False
    return True


def as_integrator(G) -> Integrator:
    if isinstance(G, Integrator):
        return G
    return Integrator(G, "arbitrary", validate=False)


def combine(G1: Integrator, G2: Integrator, lam=1) -> Integrator:
    """λ·G1 + G2 with the weaker of the two regularities."""
    from .functions import add, scale

    i = min(LEVELS.index(G1.regularity), LEVELS.index(G2.regularity), LEVELS.index("nbv"))
    return Integrator(add(scale(G1.fn, lam), G2.fn), LEVELS[i])


def left_limit(G, x):
    """L_G(x)."""
    G = as_integrator(G)
    G.line.check(x)
    return G.left_limit(x)


# ----------------------------------------------------------------------------
# variation

@dataclass(frozen=True)
class Variation:
    value: object
    divergent: bool = False
    exact: bool = True


def _jump_terms(G, a, b):
    """|G(c) - L_G(c)| for c in (a, b] and right jumps on [a, b)."""
    fn = G.fn
    K = G.line
    total = 0
    for c in fn.breakpoints():
        if K.lt(a, c) and K.le(c, b):
            total += abs(fn(c) - fn.left_limit(c))
        if K.le(a, c) and K.lt(c, b) and K.right_dense(c):
            total += abs(fn.right_limit(c) - fn(c))
    return total


def total_variation(G, I: IntervalSpec | None = None, ceiling=VARIATION_CEILING, max_rounds: int = 24) -> Variation:
    """Var(G) over the closed interval I (default the whole line)."""
    G = as_integrator(G)
    K = G.line
    a, b = (K.zero, K.one) if I is None else (I.lower, I.upper)
    fn = G.fn
    if K.le(b, a):
        return Variation(0)
    if isinstance(fn, PiecewisePoly):
        v = sum(poly_variation(p, u, w) for u, w, p in fn.cells(a, b)) + _jump_terms(G, a, b)
        return Variation(v, v > ceiling)
    if isinstance(fn, (Table, OrdinalEventual)):
        v = _jump_terms(G, a, b)
        return Variation(v, v > ceiling)
    if isinstance(fn, OrdinalSeries):
        return _series_variation(fn, a, b, ceiling, max_rounds)
    return _sampled_variation(G, a, b, ceiling, max_rounds)


def _series_variation(fn: OrdinalSeries, a, b, ceiling, max_rounds):
    """Variation of n ↦ f(n) on [0, w] by doubling windows.

    The partial variations increase; a window increment that fails to shrink
    by the contraction ratio three times running is read as divergence.
    """
    start = a.coeffs[0] if a.degree == 0 else None
    if start is None:
        return Variation(0)
    if b.degree == 0:
        n_end = b.coeffs[0]
        v = sum(abs(fn.rule(n) - fn.rule(n - 1)) for n in range(start + 1, n_end + 1))
        return Variation(v, v > ceiling)
    acc, n, size = 0.0, start, 64
    prev_inc, stalls = None, 0
    for _ in range(max_rounds):
        inc = 0.0
        for m in range(n + 1, n + size + 1):
            inc += abs(fn.rule(m) - fn.rule(m - 1))
        acc += inc
        n += size
        size *= 2
        if acc > ceiling:
            return Variation(acc, True, False)
        if inc < 1e-13:
            break
        if prev_inc is not None and prev_inc > 0 and inc / prev_inc >= 0.9:
            stalls += 1
            if stalls >= 3:
                return Variation(acc, True, False)
        else:
            stalls = 0
        prev_inc = inc
    lim, _ = fn.limit_value()
    acc += abs(fn.at_limit - lim) if lim is not None else 0.0
    return Variation(acc, False, False)


def _sampled_variation(G, a, b, ceiling, max_rounds):
    K = G.line
    if not isinstance(K, L.TimeScaleLine):
        raise NotRegulated("variation of an unstructured integrator needs a time scale")
    best = 0
    for k in range(min(max_rounds, 16)):
        pts = sorted({p for p in _grid(K, a, b, 2 ** k)}, key=K.key)
        v = sum(abs(G(y) - G(x)) for x, y in zip(pts, pts[1:]))
        best = max(best, v)
        if best > ceiling:
            return Variation(best, True, False)
    return Variation(best, False, False)


def _grid(K, a, b, n):
    out = [a, b]
    for lo, hi in K.components:
        if hi < a or lo > b:
            continue
        lo, hi = max(lo, a), min(hi, b)
        out += [lo, hi]
        if lo < hi:
            h = (hi - lo) / n
            out += [lo + i * h for i in range(1, n)]
    return out


# ----------------------------------------------------------------------------
# interval measures

class MeasureView:
    def __init__(self, G: Integrator):
        G = as_integrator(G)
        if not G.at_least("nbv"):
            raise NotNBV("interval measures need an NBV integrator")
        self.G = G
        self.line = G.line

    def mu(self, spec: IntervalSpec):
        return mu_interval(self, spec)

    def total(self):
        return self.G(self.line.one)


def mu_interval(M: MeasureView, spec: IntervalSpec):
    """μ_G of an order interval, from G and L_G at its ends."""
    K, G = M.line, M.G
    c = L.canonicalize(K, spec)
    if L.is_empty(K, c):
        return 0
    y, x = c.lower, c.upper
    upper = G.left_limit(x) if c.upper_open else G(x)
    if c.lower_open:
        lower = G(y)
    elif y == K.zero:
        lower = 0
    else:
        lower = G.left_limit(y)
    return upper - lower


def abs_mu_interval(M: MeasureView, spec: IntervalSpec):
    """|μ_G| of an order interval for structured integrators."""
    K, G = M.line, M.G
    c = L.canonicalize(K, spec)
    if L.is_empty(K, c):
        return 0
    y, x = c.lower, c.upper
    v = total_variation(G, IntervalSpec(y, x)).value
    if not c.lower_open:
        v += abs(G(y)) if y == K.zero else abs(G(y) - G.left_limit(y))
    if c.upper_open:
        v -= abs(G(x) - G.left_limit(x))
    return v


def outer_measure_bound(M: MeasureView, S) -> object:
    """Upper bound on |μ_G|*(S) for a finite list of points and interval specs."""
    K, G = M.line, M.G
    if S is None:
        return 0
    total = 0
    for item in S:
        if isinstance(item, IntervalSpec):
            total += abs_mu_interval(M, item)
        elif K.contains(item):
            total += abs(G(item) - G.left_limit(item))
        else:
            raise UnsupportedSet(f"cannot measure {item!r}")
    return total
