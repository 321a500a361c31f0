import random
from fractions import Fraction

import pytest
from hypothesis import given, settings, strategies as st

from kslines import lines as L
from kslines.calculus import DENSE, JUMP, ftc_differentiate_integral, ftc_integrate_derivative, g_derivative, straddle_probe
from kslines.errors import NotGDifferentiable, NotNondecreasing, PreconditionViolated, ProbeFailed
from kslines.functions import PiecewisePoly, Table
from kslines.integrators import Integrator
from kslines.lines import IntervalSpec

from oracles import pderiv, peval


def increasing_table(rng, K, start=1):
    vals, acc = {}, Fraction(start)
    for p in K.points():
        vals[p] = acc
        acc += rng.randint(1, 4)
    return vals


@settings(max_examples=40, deadline=None)
@given(st.integers(2, 8), st.integers(0, 10**6))
def test_finite_line_derivative_is_difference_quotient(n, seed):
    rng = random.Random(seed)
    K = L.FiniteLine(list(range(n)))
    gv = increasing_table(rng, K)
    fv = {p: Fraction(rng.randint(-9, 9)) for p in range(n)}
    G, f = Integrator(Table(K, gv), "nondecreasing"), Table(K, fv)
    for x in range(n):
        prev_f = fv[x - 1] if x else 0
        prev_g = gv[x - 1] if x else 0
        d = g_derivative(f, G, x)
        assert d.case == JUMP
        assert d.value == (fv[x] - prev_f) / (gv[x] - prev_g)


@settings(max_examples=30, deadline=None)
@given(st.lists(st.integers(-4, 4), min_size=1, max_size=4), st.lists(st.integers(0, 3), min_size=1, max_size=3),
       st.integers(1, 15))
def test_dense_derivative_matches_ratio_of_derivatives(fc, gc, k):
    K = L.real_line(0, 1)
    g_coeffs = [0, 1] + gc  # g' ≥ 1 on [0, 1]
    f = PiecewisePoly.polynomial(K, fc)
    G = Integrator(PiecewisePoly.polynomial(K, g_coeffs), "nondecreasing")
    x = Fraction(k, 16)
    d = g_derivative(f, G, x)
    want = peval(pderiv(fc), x) / peval(pderiv(g_coeffs), x)
    assert d.case == DENSE
    assert abs(d.value - want) <= 1e-6


def test_derivative_failure_kinds():
    K = L.real_line(0, 1)
    G = Integrator(PiecewisePoly.from_pieces(K, [(0, Fraction(1, 2), [0, 1]), (Fraction(1, 2), 1, [Fraction(1, 2)])]),
                   "nondecreasing")
    f = PiecewisePoly.polynomial(K, [0, 1])
    with pytest.raises(NotGDifferentiable) as e:
        g_derivative(f, G, Fraction(3, 4))
    assert e.value.kind == "GConstant"
    atom = Integrator(PiecewisePoly.from_pieces(K, [(0, 1, [0, 1])], [(Fraction(1, 2), 1)]), "nondecreasing")
    jumpy = PiecewisePoly.indicator(K, IntervalSpec(Fraction(1, 2), Fraction(1), True, False))
    with pytest.raises(NotGDifferentiable) as e:
        g_derivative(jumpy, atom, Fraction(1, 2))
    assert e.value.kind == "NotRightContinuous"
    T = L.FiniteLine([0, 1])
    flat = Integrator(Table(T, {0: 1, 1: 1}), "nondecreasing")
    with pytest.raises(NotGDifferentiable) as e:
        g_derivative(Table(T, {0: 2, 1: 3}), flat, 1)
    assert e.value.kind == "LeftJumpMismatch"
    with pytest.raises(NotNondecreasing):
        g_derivative(f, Integrator(PiecewisePoly.polynomial(K, [0, -1]), "arbitrary"), Fraction(1, 2))


def test_straddle_probe():
    K = L.FiniteLine([0, 1, 2])
    G = Integrator(Table(K, {0: 0, 1: 1, 2: 2}), "nondecreasing")
    f = Table(K, {0: 0, 1: 1, 2: 4})
    I = straddle_probe(f, G, 1, Fraction(1, 10))
    assert (I.lower, I.upper, I.lower_open, I.upper_open) == (0, 2, True, True)
    R = L.real_line(0, 1)
    Gr = Integrator(PiecewisePoly.polynomial(R, [0, 1]), "nondecreasing")
    I = straddle_probe(PiecewisePoly.polynomial(R, [0, 0, 1]), Gr, Fraction(1, 2), Fraction(1, 8))
    assert L.contains(R, I, Fraction(1, 2)) and I.upper - I.lower <= Fraction(1, 4)
    atom = Integrator(PiecewisePoly.from_pieces(R, [(0, 1, [0, 1])], [(Fraction(1, 2), 1)]), "nondecreasing")
    with pytest.raises(ProbeFailed):
        straddle_probe(PiecewisePoly.polynomial(R, [0, 1]), atom, Fraction(1, 2), Fraction(1, 8))


@settings(max_examples=30, deadline=None)
@given(st.integers(2, 8), st.integers(0, 10**6))
def test_ftc_on_finite_lines(n, seed):
    rng = random.Random(seed)
    K = L.FiniteLine(list(range(n)))
    gv = increasing_table(rng, K)
    Fv = {p: Fraction(rng.randint(-9, 9)) for p in range(n)}
    fv = {p: (Fv[p] - (Fv[p - 1] if p else 0)) / (gv[p] - (gv[p - 1] if p else 0)) for p in range(n)}
    rep = ftc_integrate_derivative(Table(K, Fv), Table(K, fv), Integrator(Table(K, gv), "nondecreasing"))
    assert rep.status == "ok"
    assert rep.lhs == rep.rhs == Fv[n - 1] - (Fv[0] - fv[0] * gv[0])


@settings(max_examples=20, deadline=None)
@given(st.lists(st.integers(-4, 4), min_size=2, max_size=4), st.integers(0, 3))
def test_ftc_on_an_interval_with_atom_at_zero(Fc, c):
    K = L.real_line(0, 1)
    F = PiecewisePoly.polynomial(K, Fc)
    f = PiecewisePoly.polynomial(K, pderiv(Fc))
    G = Integrator(PiecewisePoly.polynomial(K, [c, 1]), "nondecreasing")
    rep = ftc_integrate_derivative(F, f, G)
    assert rep.status == "ok"
    assert rep.defect == 0


def test_two_point_precondition():
    K = L.FiniteLine([0, 1])
    G = Integrator(Table(K, {0: 1, 1: 1}), "nondecreasing")
    F = Table(K, {0: 2, 1: 3})
    rep = ftc_integrate_derivative(F, F, G)
    assert (rep.lhs, rep.rhs, rep.status) == (2, 3, "PreconditionViolated")
    assert rep.violations[0][0] == 1
    with pytest.raises(PreconditionViolated):
        ftc_integrate_derivative(F, F, G, strict=True)


def test_differentiate_integral():
    K = L.real_line(0, 1)
    G = Integrator(PiecewisePoly.from_pieces(K, [(0, 1, [0, 1, 1])], [(Fraction(1, 2), 2)]), "nondecreasing")
    f = PiecewisePoly.polynomial(K, [1, 0, 3])
    probes = [Fraction(k, 8) for k in range(1, 8)]
    rep = ftc_differentiate_integral(f, G, probes)
    assert rep.exceptional == [] and rep.outer_bound == 0
    jump = [r for r in rep.rows if r[0] == Fraction(1, 2)][0]
    assert jump[1] == JUMP and jump[2] == f(Fraction(1, 2))
    c = Fraction(1, 3)
    chi = PiecewisePoly.indicator(K, IntervalSpec(c, c))
    Gx = Integrator(PiecewisePoly.polynomial(K, [0, 1]), "nondecreasing")
    rep = ftc_differentiate_integral(chi, Gx, [c, Fraction(1, 2)])
    assert rep.exceptional == [c] and rep.outer_bound == 0
