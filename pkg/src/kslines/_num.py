"""Exact-or-binary64 scalars and small polynomial helpers.

Coefficient lists run from the constant term upward.
"""

from __future__ import annotations

import math
from fractions import Fraction
from numbers import Rational

from .errors import InvalidInput


def exact(v):
    """Coerce ``v`` to a Fraction when it is rational, else keep a float.

    >>> exact("1/3")
    Fraction(1, 3)
    >>> exact(2)
    Fraction(2, 1)
    >>> exact(0.5)
    0.5
    """
    if isinstance(v, bool):
        raise InvalidInput(f"not a number: {v!r}")
    if isinstance(v, Fraction):
        return v
    if isinstance(v, Rational):
        return Fraction(v)
    if isinstance(v, float):
        if not math.isfinite(v):
            raise InvalidInput(f"non-finite number: {v!r}")
        return v
    if isinstance(v, str):
        try:
            return Fraction(v.strip())
        except (ValueError, ZeroDivisionError) as exc:
            raise InvalidInput(f"cannot parse number {v!r}") from exc
    raise InvalidInput(f"not a number: {v!r}")


def fmt(v) -> str:
    if isinstance(v, Fraction):
        return str(v.numerator) if v.denominator == 1 else f"{v.numerator}/{v.denominator}"
    if isinstance(v, float):
        return repr(v)
    return str(v)


def div(a, b):
    """a / b, exact unless either side is a float."""
    if isinstance(a, float) or isinstance(b, float):
        return a / b
    return Fraction(a) / b


def as_float(v) -> float:
    return float(v)


def trim(p):
    p = list(p)
    while len(p) > 1 and p[-1] == 0:
        p.pop()
    return p or [Fraction(0)]


def peval(p, x):
    acc = 0
    for c in reversed(p):
        acc = acc * x + c
    return acc


def padd(p, q):
    n = max(len(p), len(q))
    return trim([(p[i] if i < len(p) else 0) + (q[i] if i < len(q) else 0) for i in range(n)])


def pscale(p, lam):
    return trim([lam * c for c in p])


def pmul(p, q):
    out = [0] * (len(p) + len(q) - 1)
    for i, a in enumerate(p):
        if a == 0:
            continue
        for j, b in enumerate(q):
            out[i + j] += a * b
    return trim(out)


def pderiv(p):
    return trim([i * p[i] for i in range(1, len(p))])


def pinteg(p):
    """Antiderivative vanishing at 0."""
    out = [Fraction(0)]
    for i, c in enumerate(p):
        out.append(c / (i + 1) if isinstance(c, float) else Fraction(c) / (i + 1))
    return trim(out)


def is_const(p) -> bool:
    return all(c == 0 for c in p[1:])


def real_roots_in(p, lo, hi):
    """Sorted roots of ``p`` strictly inside ``(lo, hi)``.

    Degree one and two are handled in closed form; higher degree uses numpy
    eigenvalue roots polished by bisection on sign changes.
    """
    p = trim(p)
    deg = len(p) - 1
    if deg <= 0:
        return []
    if deg == 1:
        r = -Fraction(p[0]) / p[1] if not isinstance(p[0], float) and not isinstance(p[1], float) else -p[0] / p[1]
        return [r] if lo < r < hi else []
    if deg == 2:
        c, b, a = p
        disc = b * b - 4 * a * c
        if disc < 0:
            return []
        if disc == 0:
            r = -b / (2 * a) if isinstance(a, float) or isinstance(b, float) else Fraction(-b) / (2 * a)
            return [r] if lo < r < hi else []
        sq = _exact_sqrt(disc)
        rs = sorted({(-b - sq) / (2 * a), (-b + sq) / (2 * a)})
        return [r for r in rs if lo < r < hi]
    import numpy as np

    coeffs = [float(c) for c in reversed(p)]
    out = []
    for z in np.roots(coeffs):
        if abs(z.imag) > 1e-9 * max(1.0, abs(z.real)):
            continue
        r = float(z.real)
        if float(lo) < r < float(hi):
            out.append(_polish(p, r, float(lo), float(hi)))
    return sorted(set(out))


def _exact_sqrt(v):
    if isinstance(v, Fraction):
        n, d = v.numerator, v.denominator
        rn, rd = math.isqrt(n), math.isqrt(d)
        if rn * rn == n and rd * rd == d:
            return Fraction(rn, rd)
    return math.sqrt(float(v))


def _polish(p, r, lo, hi):
    h = 1e-12 * max(1.0, abs(r))
    a, b = max(lo, r - 1e3 * h), min(hi, r + 1e3 * h)
    fa, fb = float(peval(p, a)), float(peval(p, b))
    if fa == 0:
        return a
    if fb == 0 or fa * fb > 0:
        return r
    for _ in range(80):
        m = (a + b) / 2
        fm = float(peval(p, m))
        if fm == 0:
            return m
        if fa * fm < 0:
            b = m
        else:
            a, fa = m, fm
    return (a + b) / 2
