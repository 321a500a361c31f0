"""Random problem generators and the seeded property suite run by ``kslines check``."""

from __future__ import annotations

import math
import random
from dataclasses import dataclass
from fractions import Fraction

from . import lines as L
from .bridges import (
    SimpleFunction,
    nabla_integrate,
    ordinal_series_integral,
    series_integrator,
    simple_function_integral,
    vitali_select,
)
from .calculus import ftc_integrate_derivative
from .engine import additivity_check, epsilon_gauge, exact_integral, riemann_sum, saks_henstock_residual, singleton_integral
from .functions import PiecewisePoly, Table
from .integrators import Integrator, MeasureView, mu_interval
from .lines import IntervalSpec
from .partitions import TaggedSystem, cousin_partition, is_fine, random_gauge, refine_and_expose

# ----------------------------------------------------------------------------
# generators


def rand_rational(rng: random.Random, lo, hi, den: int = 8) -> Fraction:
    lo, hi = Fraction(lo), Fraction(hi)
    n = rng.randint(0, den)
    return lo + (hi - lo) * Fraction(n, den)


def random_timescale(rng: random.Random, max_components: int = 3) -> L.TimeScaleLine:
    """Disjoint components in [0, 4] with small denominators, some of them single points."""
    k = rng.randint(1, max_components)
    cuts = sorted(rng.sample(range(1, 16), 2 * k - 1))
    ends = [0] + cuts
    comps = []
    for i in range(k):
        a = Fraction(ends[2 * i], 4)
        b = Fraction(ends[2 * i + 1], 4) if 2 * i + 1 < len(ends) else Fraction(4)
        if rng.random() < 0.25 and i > 0:
            b = a
        comps.append((a, b))
    return L.TimeScaleLine(comps)


def random_poly(rng: random.Random, deg: int, nonneg: bool = False):
    lo = 0 if nonneg else -3
    return [Fraction(rng.randint(lo, 3)) for _ in range(deg + 1)]


def random_piecewise(rng: random.Random, K: L.TimeScaleLine, deg: int = 2, n_breaks: int = 2,
                     n_jumps: int = 2) -> PiecewisePoly:
    """Piecewise polynomial with random interior breaks and right-continuous jumps."""
    breaks = {K.zero}
    for _ in range(n_breaks):
        a, b = K.components[rng.randrange(len(K.components))]
        if a < b:
            breaks.add(rand_rational(rng, a, b))
    bs = sorted(breaks)
    pieces = [(u, v, random_poly(rng, deg)) for u, v in zip(bs, bs[1:] + [K.one])]
    jumps = []
    for _ in range(n_jumps):
        jumps.append((K.random_point(rng), Fraction(rng.randint(-3, 3))))
    return PiecewisePoly.from_pieces(K, pieces, jumps)


def random_nondecreasing(rng: random.Random, K: L.TimeScaleLine, deg: int = 2, n_jumps: int = 2) -> Integrator:
    """Nonnegative-coefficient polynomial plus positive right-continuous jumps."""
    g = PiecewisePoly.polynomial(K, random_poly(rng, deg, nonneg=True))
    for _ in range(n_jumps):
        c = K.random_point(rng)
        g = g + PiecewisePoly.from_assignments(K, [(IntervalSpec(c, K.one), [Fraction(rng.randint(1, 3))])])
    return Integrator(g, "nondecreasing")


def random_finite(rng: random.Random, n: int | None = None) -> L.FiniteLine:
    n = n or rng.randint(2, 7)
    return L.FiniteLine(list(range(n)))


def random_table(rng: random.Random, K, lo=-3, hi=3) -> Table:
    return Table.from_func(K, lambda _: Fraction(rng.randint(lo, hi)))


def family_lines():
    """One representative line per family."""
    T = L.TimeScaleLine([(0, 1), (Fraction(3, 2), Fraction(3, 2)), (2, 3)])
    F = L.FiniteLine(list(range(6)))
    O = L.OrdinalLine("w^2+3")
    X = L.LexLine(L.FiniteLine([0, 1, 2]), L.real_line(0, 1))
    D = L.DoubleArrowLine(L.real_line(0, 1), "all")
    return {"timescale": T, "finite": F, "ordinal": O, "lex": X, "double-arrow": D}


# ----------------------------------------------------------------------------
# property suite

@dataclass
class CheckRow:
    name: str
    value: object
    bound: object
    passed: bool


def _cousin(rng, n):
    worst = 0
    fails = 0
    for fam, K in family_lines().items():
        for i in range(n):
            seed = rng.randrange(1 << 30)
            d = random_gauge(K, seed)
            P = cousin_partition(K, d)
            P.check()
            if not is_fine(K, P, d):
                fails += 1
            worst = max(worst, len(P))
    return CheckRow("cousin partitions are fine and span", fails, 0, fails == 0)


def _bilinearity(rng, n):
    worst = 0
    for _ in range(n):
        K = random_timescale(rng)
        f1, f2 = random_piecewise(rng, K), random_piecewise(rng, K)
        G1, G2 = random_piecewise(rng, K), random_piecewise(rng, K)
        lam = Fraction(rng.randint(-5, 5), rng.randint(1, 4))
        a, b = K.zero, K.one
        lhs = exact_integral(lam * f1 + f2, G1, a, b)
        rhs = lam * exact_integral(f1, G1, a, b) + exact_integral(f2, G1, a, b)
        worst = max(worst, abs(lhs - rhs))
        lhs = exact_integral(f1, lam * G1 + G2, a, b)
        rhs = lam * exact_integral(f1, G1, a, b) + exact_integral(f1, G2, a, b)
        worst = max(worst, abs(lhs - rhs))
    return CheckRow("bilinearity defect", worst, 0, worst == 0)


def _additivity(rng, n):
    worst = 0
    for _ in range(n):
        K = random_timescale(rng)
        f = random_piecewise(rng, K)
        G = Integrator(random_piecewise(rng, K), "amenable")
        pts = sorted(K.random_point(rng) for _ in range(3))
        rep = additivity_check(f, G, *pts)
        worst = max(worst, rep.defect)
    return CheckRow("additivity defect", worst, 0, worst == 0)


def _riemann_telescopes(rng, n):
    worst = 0
    for _ in range(n):
        K = random_timescale(rng)
        G = random_piecewise(rng, K)
        P = cousin_partition(K, random_gauge(K, rng.randrange(1 << 30)))
        one = PiecewisePoly.constant(K, 1)
        worst = max(worst, abs(riemann_sum(one, G, P) - G(K.one)))
    return CheckRow("riemann sum of 1 telescopes to G(1)", worst, 0, worst == 0)


def _singleton(rng, n):
    worst = 0
    for _ in range(n):
        K = random_timescale(rng)
        G = random_nondecreasing(rng, K)
        c = K.random_point(rng)
        chi = PiecewisePoly.indicator(K, IntervalSpec(c, c))
        v = exact_integral(chi, G, K.zero, K.one)
        worst = max(worst, abs(v - singleton_integral(G, c)))
    return CheckRow("singleton integral equals G(c) - L_G(c)", worst, 0, worst == 0)


def _saks_henstock(rng, n):
    ok = True
    worst = 0
    for _ in range(n):
        K = random_timescale(rng, 2)
        f = random_piecewise(rng, K, deg=1, n_breaks=1, n_jumps=1)
        G = random_nondecreasing(rng, K, deg=1, n_jumps=1)
        eps = Fraction(rng.randint(1, 4), 4)
        d = epsilon_gauge(f, G, eps)
        P = cousin_partition(K, refine_and_expose(K, d, random_gauge(K, rng.randrange(1 << 30))))
        cache = {}
        for _ in range(5):
            comps = [c for c in P if rng.random() < 0.5]
            signed, absolute = saks_henstock_residual(f, G, TaggedSystem(K, comps), d, cache=cache)
            ok = ok and abs(signed) <= 2 * eps and absolute <= 4 * eps
            worst = max(worst, absolute / eps)
    return CheckRow("saks-henstock absolute residual / eps", round(float(worst), 9), 4, ok)


def _measure(rng, n):
    worst = 0
    for _ in range(n):
        K = random_timescale(rng)
        G = random_nondecreasing(rng, K)
        M = MeasureView(G)
        xs = sorted({K.random_point(rng) for _ in range(4)} | {K.zero, K.one})
        total = mu_interval(M, IntervalSpec(K.zero, K.zero))
        for u, v in zip(xs, xs[1:]):
            total += mu_interval(M, IntervalSpec(u, v, True, False))
        worst = max(worst, abs(total - G(K.one)))
    return CheckRow("interval measures add up to G(1)", worst, 0, worst == 0)


def _simple(rng, n):
    worst = 0
    for _ in range(n):
        K = L.real_line(0, 4)
        G = random_nondecreasing(rng, K)
        cuts = sorted(rng.sample(range(0, 17), 4))
        specs = [IntervalSpec(Fraction(cuts[0], 4), Fraction(cuts[1], 4), False, True),
                 IntervalSpec(Fraction(cuts[2], 4), Fraction(cuts[3], 4), True, False)]
        phi = SimpleFunction(K, [(Fraction(rng.randint(-4, 4)), [specs[0]]), (Fraction(rng.randint(-4, 4)), [specs[1]])])
        _, _, defect = simple_function_integral(phi, G)
        worst = max(worst, defect)
    return CheckRow("simple-function defect", worst, 0, worst == 0)


def _nabla(rng, n):
    worst = 0
    for _ in range(n):
        K = random_timescale(rng)
        f = random_piecewise(rng, K, n_jumps=1)
        G = random_nondecreasing(rng, K)
        worst = max(worst, nabla_integrate(f, G, K).defect)
    return CheckRow("nabla bridge defect", worst, 0, worst == 0)


def _vitali(rng, n):
    ok = True
    K = L.real_line(0, 1)
    G = Integrator(PiecewisePoly.polynomial(K, [0, 1]), "nondecreasing")
    M = MeasureView(G)
    for _ in range(n):
        F = []
        for _ in range(rng.randint(2, 8)):
            a, b = sorted((rand_rational(rng, 0, 1, 16), rand_rational(rng, 0, 1, 16)))
            F.append(IntervalSpec(a, b))
        chosen, phi = vitali_select(F, M)
        for i in range(len(F)):
            if not any(L.meets(K, F[i], F[j]) and 2 * mu_interval(M, F[j]) >= mu_interval(M, F[i]) for j in chosen):
                ok = False
        for j in chosen:
            ok = ok and mu_interval(M, phi[j]) <= 5 * mu_interval(M, F[j])
    return CheckRow("vitali selection properties", n, n, ok)


def _series(rng, n):
    G = series_integrator("alt-harmonic")
    r = ordinal_series_integral(G, tol=1e-6)
    err = abs(r.value - math.log(2))
    return CheckRow("alternating harmonic series on [0,w]", round(r.value, 9), 1e-6, err <= 1e-6)


def _twopoint(rng, n):
    K = L.FiniteLine([0, 1])
    G = Integrator(Table(K, {0: 1, 1: 1}), "nondecreasing")
    F = Table(K, {0: 2, 1: 3})
    rep = ftc_integrate_derivative(F, F, G)
    ok = rep.lhs == 2 and rep.rhs == 3 and rep.status == "PreconditionViolated" and rep.violations[0][0] == 1
    return CheckRow("two-point counterexample is rejected", f"{rep.lhs} vs {rep.rhs}", "", ok)


SUITE = [
    (_cousin, 8),
    (_riemann_telescopes, 20),
    (_bilinearity, 20),
    (_additivity, 20),
    (_singleton, 20),
    (_measure, 20),
    (_saks_henstock, 20),
    (_simple, 20),
    (_nabla, 10),
    (_vitali, 40),
    (_series, 1),
    (_twopoint, 1),
]


def run_suite(seed: int = 0, scale: float = 1.0):
    """Rows in a fixed order; each check draws from its own seeded stream."""
    rows = []
    for i, (fn, n) in enumerate(SUITE):
        rng = random.Random(f"{seed}|{i}")
        rows.append(fn(rng, max(1, int(n * scale))))
    return rows
