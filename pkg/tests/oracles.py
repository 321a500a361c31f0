"""Independent reference computations used by the tests.

Nothing here calls the package's integration, variation or measure code.
Problems are kept in raw form (pieces and jumps) and evaluated directly.
"""

from __future__ import annotations

import math
import random
from dataclasses import dataclass, field
from fractions import Fraction


def peval(coeffs, x):
    return sum(Fraction(c) * Fraction(x) ** i for i, c in enumerate(coeffs))


def pmul(p, q):
    out = [Fraction(0)] * (len(p) + len(q) - 1)
    for i, a in enumerate(p):
        for j, b in enumerate(q):
            out[i + j] += Fraction(a) * Fraction(b)
    return out


def pderiv(p):
    return [i * Fraction(c) for i, c in enumerate(p)][1:] or [Fraction(0)]


def pint_def(p, u, v):
    """∫_u^v p(x) dx."""
    return sum(Fraction(c) * (Fraction(v) ** (i + 1) - Fraction(u) ** (i + 1)) / (i + 1) for i, c in enumerate(p))


@dataclass
class Raw:
    """Function on a time scale: polynomial pieces (right piece wins at shared ends) plus jumps c ↦ s·𝟙[x ≥ c]."""

    components: list
    pieces: list
    jumps: list = field(default_factory=list)

    def _piece_at(self, x):
        best = None
        for a, b, p in self.pieces:
            if a <= x <= b and (best is None or a > best[0]):
                best = (a, b, p)
        return best

    def _piece_left_of(self, x):
        for a, b, p in self.pieces:
            if a < x <= b:
                return p
        raise ValueError("no piece to the left")

    def __call__(self, x):
        x = Fraction(x)
        return peval(self._piece_at(x)[2], x) + sum(s for c, s in self.jumps if c <= x)

    def left_limit_dense(self, x):
        x = Fraction(x)
        return peval(self._piece_left_of(x), x) + sum(s for c, s in self.jumps if c < x)

    def poly_between(self, u, v):
        """Polynomial on the open cell (u, v), jumps at or before u folded into the constant."""
        mid = (Fraction(u) + Fraction(v)) / 2
        p = [Fraction(c) for c in self._piece_at(mid)[2]]
        p[0] += sum(s for c, s in self.jumps if c < mid)
        return p

    def breaks(self):
        out = set()
        for a, b, _ in self.pieces:
            out |= {Fraction(a), Fraction(b)}
        out |= {Fraction(c) for c, _ in self.jumps}
        return out

    def args(self):
        return self.pieces, self.jumps


def random_raw(rng: random.Random, components, deg=2, n_breaks=2, n_jumps=2, nonneg=False) -> Raw:
    lo_all, hi_all = components[0][0], components[-1][1]
    cuts = {Fraction(lo_all)}
    for _ in range(n_breaks):
        a, b = components[rng.randrange(len(components))]
        if a < b:
            cuts.add(Fraction(a) + (Fraction(b) - Fraction(a)) * Fraction(rng.randint(1, 7), 8))
    cuts = sorted(cuts) + [Fraction(hi_all)]
    lo_c = 0 if nonneg else -3
    if nonneg:
        p = [Fraction(rng.randint(0, 3)) for _ in range(deg + 1)]
        pieces = [(cuts[0], cuts[-1], p)]
    else:
        pieces = [(u, v, [Fraction(rng.randint(lo_c, 3)) for _ in range(deg + 1)]) for u, v in zip(cuts, cuts[1:])]
    pts = _points(components)
    jumps = []
    for _ in range(n_jumps):
        c = rng.choice(pts)
        s = Fraction(rng.randint(1, 3)) if nonneg else Fraction(rng.randint(-3, 3))
        jumps.append((c, s))
    return Raw(components, pieces, jumps)


def _points(components):
    pts = []
    for a, b in components:
        a, b = Fraction(a), Fraction(b)
        if a == b:
            pts.append(a)
        else:
            pts += [a + (b - a) * Fraction(i, 4) for i in range(5)]
    return pts


def random_components(rng: random.Random, max_k=3):
    k = rng.randint(1, max_k)
    cuts = sorted(rng.sample(range(1, 16), 2 * k - 1))
    ends = [0] + cuts + [16]
    comps = []
    for i in range(k):
        a, b = Fraction(ends[2 * i], 4), Fraction(ends[2 * i + 1], 4)
        if i > 0 and rng.random() < 0.25:
            b = a
        comps.append((a, b))
    return comps


def ks_integral_timescale(components, f: Raw, G: Raw, lo=None, hi=None):
    """∫_{[lo,hi]} f dG for right-continuous G built from raw parts.

    f(lo)G(lo) + Σ over components of the Stieltjes integral on (a, b] (smooth
    part Σ∫ f g' plus f(c)·jump at atoms) + Σ over gaps f(a')(G(a') − G(b)).
    """
    comps = [(Fraction(a), Fraction(b)) for a, b in components]
    lo = comps[0][0] if lo is None else Fraction(lo)
    hi = comps[-1][1] if hi is None else Fraction(hi)
    clipped = [(max(a, lo), min(b, hi)) for a, b in comps if b >= lo and a <= hi]
    total = f(lo) * G(lo)
    breaks = f.breaks() | G.breaks()
    for k, (a, b) in enumerate(clipped):
        if k > 0:
            pb = clipped[k - 1][1]
            total += f(a) * (G(a) - G(pb))
        if a == b:
            continue
        cuts = sorted({a, b} | {c for c in breaks if a < c < b})
        for u, v in zip(cuts, cuts[1:]):
            fp, gp = f.poly_between(u, v), G.poly_between(u, v)
            total += pint_def(pmul(fp, pderiv(gp)), u, v)
            total += f(v) * (G(v) - G.left_limit_dense(v))
    return total


def finite_integral(points, f, G):
    """Integral on a finite line: the only fine partition of the finest gauge."""
    total = f(points[0]) * G(points[0])
    for p, q in zip(points, points[1:]):
        total += f(q) * (G(q) - G(p))
    return total


def variation_sampled(g, a, b, n=20000):
    """Sup over a fine uniform division: a lower bound converging to Var."""
    xs = [a + (b - a) * i / n for i in range(n + 1)]
    ys = [g(x) for x in xs]
    return sum(abs(y2 - y1) for y1, y2 in zip(ys, ys[1:]))


def alternating_harmonic_rearranged(p, q):
    """Classical value of the rearrangement taking p positive then q negative terms."""
    return math.log(2) + 0.5 * math.log(p / q)


def brute_admissible(A, F, contains, meets):
    """Admissibility by enumerating every subfamily (exponential, tiny families only)."""
    n = len(F)
    for a in A:
        hosts = [I for I in F if contains(I, a)]
        for mask in range(1 << n):
            C = [F[i] for i in range(n) if mask >> i & 1]
            if any(contains(J, a) for J in C):
                continue
            if any(meets(C[i], C[j]) for i in range(len(C)) for j in range(i + 1, len(C))):
                continue
            if all(any(meets(I, J) for J in C) for I in hosts):
                return False
    return True


def ordinal_eventual_integral(k, m, f_blocks, g_blocks):
    """Integral on [0, w·k + m] of block-eventually-constant f against G.

    Walks the points in order; past the explicit values every increment of G
    vanishes, so the walk stops there in each block.
    """

    def val(blocks, j, n):
        vals, tail = blocks[j]
        return Fraction(vals[n] if n < len(vals) else tail)

    total = val(f_blocks, 0, 0) * val(g_blocks, 0, 0)
    for j in range(k + 1):
        horizon = max(len(f_blocks[j][0]), len(g_blocks[j][0])) + 1
        top = m if j == k else horizon
        for n in range(0 if j > 0 else 1, top + 1):
            if n == 0:
                prev = Fraction(g_blocks[j - 1][1])
            else:
                prev = val(g_blocks, j, n - 1)
            total += val(f_blocks, j, n) * (val(g_blocks, j, n) - prev)
    return total
