"""G-derivatives, straddle diagnostics and both directions of the FTC."""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction

from . import _num as N
from . import lines as L
from .engine import integrate, primitive
from .errors import (
    KSError,
    NotGDifferentiable,
    NotNondecreasing,
    PreconditionViolated,
    ProbeFailed,
    UnsupportedLine,
)
from .functions import Fn, PiecewisePoly
from .integrators import Integrator, MeasureView, as_integrator, outer_measure_bound
from .lines import IntervalSpec, TimeScaleLine

JUMP = "JumpCase"
DENSE = "DenseCase"

MAX_LEVELS = 60


@dataclass
class DerivativeResult:
    value: object
    case: str
    certificate: object = None


def _require_nondecreasing(G) -> Integrator:
    G = as_integrator(G)
    if not G.at_least("nondecreasing"):
        raise NotNondecreasing("G-derivatives need a nondecreasing amenable integrator")
    return G


def _side_limit(K: TimeScaleLine, x, side, fns):
    """Nearest structural point strictly on ``side`` of x within x's component."""
    i = K.component_index(x)
    a, b = K.components[i]
    bound = a if side < 0 else b
    for fn in fns:
        for p in fn.breakpoints():
            if side < 0 and bound < p < x or side > 0 and x < p < bound:
                bound = p
    return bound


def _locally_constant(G, K, x, sides) -> bool:
    g = G.fn
    if isinstance(g, PiecewisePoly):
        for side, lim in sides:
            u, v = (lim, x) if side < 0 else (x, lim)
            p = g.poly_on(u, v)
            if not (N.is_const(p) and N.peval(p, x) == g(x)):
                return False
        return True
    return False


def g_derivative(f: Fn, G, x, tol=1e-6) -> DerivativeResult:
    """df/dG at x: the exact jump quotient, or a stabilized difference quotient."""
    G = _require_nondecreasing(G)
    K = G.line
    K.check(x)
    gx, lgx = G(x), G.left_limit(x)
    if gx != lgx:
        if K.right_dense(x) and x != K.one:
            if f.right_limit(x) != f(x):
                raise NotGDifferentiable("NotRightContinuous", x, "f jumps to the right of a G-atom")
        lf = f.left_limit(x)
        q = N.div(f(x) - lf, gx - lgx)
        return DerivativeResult(q, JUMP, f"({N.fmt(f(x))} - {N.fmt(lf)}) / ({N.fmt(gx)} - {N.fmt(lgx)})")
    if not K.left_dense(x) and f(x) != f.left_limit(x):
        raise NotGDifferentiable("LeftJumpMismatch", x, "f(x) differs from L_f(x) at a left-isolated point")
    sides = []
    if x != K.zero and K.left_dense(x):
        sides.append(-1)
    if x != K.one and K.right_dense(x):
        sides.append(1)
    if not sides:
        raise NotGDifferentiable("GConstant", x, "x is isolated, so G is constant on {x}")
    if not isinstance(K, TimeScaleLine):
        raise UnsupportedLine("dense-case derivatives are probed on time scales")
    lims = [(s, _side_limit(K, x, s, [f, G.fn])) for s in sides]
    if _locally_constant(G, K, x, lims):
        raise NotGDifferentiable("GConstant", x, "G is constant on a neighbourhood")
    r0 = {s: abs(lim - x) / 2 for s, lim in lims}
    fx = f(x)
    trace, ests = [], []
    for k in range(MAX_LEVELS):
        qs, bad = [], False
        for s in sides:
            y = x + s * r0[s] / (1 << k)
            dg = G(y) - gx
            df = f(y) - fx
            if dg == 0:
                bad = bad or df != 0
                continue
            qs.append(N.div(df, dg))
        if bad or not qs:
            ests.append(None)
            trace.append((k, None))
            continue
        est = sum(qs) / len(qs)
        spread = max(qs) - min(qs)
        ests.append((est, spread))
        trace.append((k, est))
        last = ests[-3:]
        if len(last) == 3 and all(e is not None for e in last):
            change = max(abs(last[1][0] - last[0][0]), abs(last[2][0] - last[1][0]))
            if change < tol / 4 and last[2][1] < tol:
                return DerivativeResult(est, DENSE, {"trace": trace, "eps": change})
    raise NotGDifferentiable("NoStabilization", x, "difference quotients do not settle")


# ----------------------------------------------------------------------------
# straddle

def _pairs(K, t, I: IntervalSpec, samples):
    """Sample pairs x ≤ t ≤ y with (x, y] ⊆ I; exhaustive on finite lines."""
    pts = K.points()
    if pts is None:
        pts = {t, I.lower, I.upper}
        for j in range(1, samples + 1):
            pts.add(t + (I.upper - t) * Fraction(j, samples + 1))
            pts.add(t - (t - I.lower) * Fraction(j, samples + 1))
        pts = [p for p in pts if K.contains(p)]
    inside = [p for p in pts if L.contains(K, I, p)]
    ys = [p for p in inside if K.le(t, p)]
    xs = [p for p in inside if K.le(p, t)]
    p = K.predecessor(t)
    if p is not None and p not in xs:
        xs.append(p)
    return [(x, y) for x in xs for y in ys]


def straddle_probe(f: Fn, G, t, eps, samples: int = 16) -> IntervalSpec:
    """Open interval I ∋ t on which the straddle inequality holds at every sampled pair."""
    G = _require_nondecreasing(G)
    K = G.line
    D = g_derivative(f, G, t).value
    jump = G(t) != G.left_limit(t)
    if jump and K.left_dense(t):
        raise ProbeFailed("no straddle bound at a left-dense G-atom")

    def ok(I):
        for x, y in _pairs(K, t, I, samples):
            lhs = abs(f(y) - f(x) - D * (G(y) - G(x)))
            rhs = eps * ((G(y) - G.left_limit(x)) if jump else (G(y) - G(x)))
            if lhs > rhs:
                return False
        return True

    if K.points() is not None:
        I = _isolating(K, t)
        if ok(I):
            return I
        raise ProbeFailed(f"straddle inequality fails at {K.format_point(t)}")
    if not isinstance(K, TimeScaleLine):
        raise UnsupportedLine("straddle probes run on finite lines and time scales")
    i = K.component_index(t)
    a, b = K.components[i]
    r = max(b - a, 1)
    for _ in range(MAX_LEVELS):
        I = K.ball(t, r)
        if ok(I):
            return I
        r = r / 2
    raise ProbeFailed(f"no interval passes at {K.format_point(t)}")


def _isolating(K, t) -> IntervalSpec:
    """Smallest open interval containing t on a finite line."""
    p, s = K.predecessor(t), K.successor(t)
    lo, lo_open = (p, True) if p is not None else (K.zero, False)
    hi, hi_open = (s, True) if s is not None else (K.one, False)
    return IntervalSpec(lo, hi, lo_open, hi_open)


# ----------------------------------------------------------------------------
# fundamental theorem, both directions

@dataclass
class FTCReport:
    lhs: object
    rhs: object
    defect: object
    status: str
    violations: list = field(default_factory=list)
    rows: list = field(default_factory=list)


def _checkable_points(K, fns):
    pts = K.points()
    if pts is not None:
        return list(pts)
    out = set()
    for fn in fns:
        out |= set(fn.breakpoints())
    if isinstance(K, TimeScaleLine):
        for a, b in K.components:
            out |= {a, b}
    return sorted(out, key=K.key)


def ftc_integrate_derivative(F: Fn, f: Fn, G, exceptions=(), strict: bool = False, tol=1e-9) -> FTCReport:
    """Both sides of ∫ f dG = F(1) − (F(0) − f(0)G(0)), with the precondition audit.

    Exceptions may sit only at 0_K or at left-dense points. Points where F is
    checkably not G-differentiable with derivative f join the exceptions.
    """
    G = _require_nondecreasing(G)
    K = G.line
    exc = {K.check(e) for e in exceptions}
    rows, violations = [], []
    if not F.continuous:
        violations.append((None, "F is not continuous"))
    for x in _checkable_points(K, [F, f, G.fn]):
        try:
            d = g_derivative(F, G, x, tol=max(tol, 1e-6))
            status = "ok" if abs(d.value - f(x)) <= max(tol, 1e-6) else "mismatch"
            rows.append((x, d.case, d.value, f(x), status))
        except (NotGDifferentiable, UnsupportedLine) as e:
            status = getattr(e, "kind", "unsupported")
            rows.append((x, None, None, f(x), status))
        if status != "ok":
            exc.add(x)
    for x in sorted(exc, key=K.key):
        if x != K.zero and not K.left_dense(x):
            violations.append((x, "exception at a left-isolated point"))
    lhs = integrate(f, G, tol=tol).value
    rhs = F(K.one) - (F(K.zero) - f(K.zero) * G(K.zero))
    status = "PreconditionViolated" if violations else "ok"
    if strict and violations:
        p, why = violations[0]
        raise PreconditionViolated(p, why)
    return FTCReport(lhs, rhs, abs(lhs - rhs), status, violations, rows)


@dataclass
class DiffReport:
    rows: list
    exceptional: list
    outer_bound: object


def ftc_differentiate_integral(f: Fn, G, probes, tol=1e-6) -> DiffReport:
    """Compare dF/dG with f at each probe, F the primitive of f.

    Jump probes are exact; dense probes are stabilized quotients. Probes that
    fail or deviate by more than ``tol`` are listed with an outer-measure bound.
    """
    G = _require_nondecreasing(G)
    K = G.line
    F = primitive(f, G)
    rows, bad = [], []
    for x in probes:
        K.check(x)
        fx = f(x)
        try:
            d = g_derivative(F, G, x, tol)
        except KSError as e:
            rows.append((x, getattr(e, "kind", type(e).__name__), None, fx, None))
            bad.append(x)
            continue
        dev = abs(d.value - fx)
        if d.case == JUMP and d.value != fx:
            raise AssertionError(f"jump relation fails at {K.format_point(x)}")
        rows.append((x, d.case, d.value, fx, dev))
        if dev > tol:
            bad.append(x)
    bound = outer_measure_bound(MeasureView(G), bad)
    return DiffReport(rows, bad, bound)
