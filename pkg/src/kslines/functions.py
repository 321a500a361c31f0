"""Real-valued functions on compact lines, with optional exact structure.

Every function exposes evaluation, the left-limit functional L_f, right
limits, and its structural breakpoints. Structured kinds support exact
Kurzweil–Stieltjes reduction, variation and algebra.
"""

from __future__ import annotations

import bisect
import math
from fractions import Fraction
from typing import Callable

from . import _num as N
from . import lines as L
from .errors import InvalidInput, NotRegulated, UnsupportedLine
from .lines import CompactLine, IntervalSpec, Ordinal


class Fn:
    line: CompactLine
    continuous: bool = False

    def __call__(self, x):
        raise NotImplementedError

    def left_limit(self, x):
        """L_f(x): 0 at 0_K, f(x⁻) at left-isolated x, the left limit otherwise."""
        K = self.line
        if x == K.zero:
            return 0
        iso, p = K._left(x)
        if iso:
            return self(p)
        return self._dense_left_limit(x)

    def _dense_left_limit(self, x):
        raise NotRegulated(f"left limit of an unstructured function at {self.line.format_point(x)}")

    def right_limit(self, x):
        """f(x+) at right-dense x; f(x) when x is right-isolated."""
        K = self.line
        if x == K.one or not K.right_dense(x):
            return self(x)
        return self._dense_right_limit(x)

    def _dense_right_limit(self, x):
        raise NotRegulated(f"right limit of an unstructured function at {self.line.format_point(x)}")

    def breakpoints(self):
        return []

    def __add__(self, other):
        return add(self, other)

    def __sub__(self, other):
        return add(self, scale(other, -1))

    def __rmul__(self, lam):
        return scale(self, lam)

    def __neg__(self):
        return scale(self, -1)


class BlackBox(Fn):
    """Evaluation-only function; optional continuity and Lipschitz declarations."""

    def __init__(self, line, func: Callable, continuous: bool = False, lipschitz=None, breakpoints=(), name="f"):
        self.line, self.func = line, func
        self.continuous, self.lipschitz = continuous, lipschitz
        self._breaks = list(breakpoints)
        self.name = name

    def __call__(self, x):
        return self.func(x)

    def breakpoints(self):
        return list(self._breaks)

    def _dense_left_limit(self, x):
        if self.continuous:
            return self(x)
        return super()._dense_left_limit(x)

    def _dense_right_limit(self, x):
        if self.continuous:
            return self(x)
        return super()._dense_right_limit(x)


class Table(Fn):
    """Function on a finite line given by a value table."""

    def __init__(self, line: CompactLine, values: dict):
        pts = line.points()
        if pts is None:
            raise UnsupportedLine("value tables need a finite line")
        missing = [p for p in pts if p not in values]
        if missing:
            raise InvalidInput(f"value table misses point {line.format_point(missing[0])}")
        self.line = line
        self.values = {p: values[p] for p in pts}
        self.continuous = True

    @classmethod
    def from_func(cls, line, func):
        return cls(line, {p: func(p) for p in line.points()})

    def __call__(self, x):
        return self.values[x]

    def breakpoints(self):
        return list(self.values)

    def oscillation(self, a, b):
        K = self.line
        vs = [v for p, v in self.values.items() if K.le(a, p) and K.le(p, b)]
        return max(vs) - min(vs)


# ----------------------------------------------------------------------------
# piecewise polynomials on time scales

class PiecewisePoly(Fn):
    """Exact piecewise-polynomial function on a time scale.

    ``breaks`` is sorted and contains every component endpoint; ``values``
    holds the value at each break; ``polys[j]`` is the polynomial on the open
    cell (breaks[j], breaks[j+1]) or None when that cell is a gap of K.
    """

    def __init__(self, line: L.TimeScaleLine, breaks, values, polys):
        if not isinstance(line, L.TimeScaleLine):
            raise UnsupportedLine("piecewise polynomials live on time scales")
        self.line = line
        self.breaks = list(breaks)
        self.values = list(values)
        self.polys = [None if p is None else N.trim(p) for p in polys]
        if len(self.values) != len(self.breaks) or len(self.polys) != len(self.breaks) - 1:
            raise InvalidInput("inconsistent piecewise description")
        self.continuous = self.is_continuous()

    # construction ---------------------------------------------------------

    @classmethod
    def _grid(cls, K: L.TimeScaleLine, extra):
        pts = {a for a, _ in K.components} | {b for _, b in K.components}
        for p in extra:
            if K.contains(p):
                pts.add(p)
        return sorted(pts)

    @classmethod
    def _is_gap(cls, K, u, v):
        return K.component_index(u) != K.component_index(v)

    @classmethod
    def from_assignments(cls, K: L.TimeScaleLine, assigns, default=0, require_cover=False) -> "PiecewisePoly":
        """Later assignments override earlier ones; uncovered points take ``default``."""
        extra = []
        for spec, _ in assigns:
            extra += [spec.lower, spec.upper]
        grid = cls._grid(K, extra)
        values, polys = [], []
        for b in grid:
            v, hit = default, False
            for spec, p in assigns:
                if L.contains(K, spec, b):
                    v, hit = N.peval(p, b), True
            if require_cover and not hit:
                raise InvalidInput(f"pieces do not cover {K.format_point(b)}")
            values.append(v)
        for u, v in zip(grid, grid[1:]):
            if cls._is_gap(K, u, v):
                polys.append(None)
                continue
            mid = (u + v) / 2
            poly, hit = [default], False
            for spec, p in assigns:
                if L.contains(K, spec, mid):
                    poly, hit = list(p), True
            if require_cover and not hit:
                raise InvalidInput(f"pieces do not cover ({K.format_point(u)}, {K.format_point(v)})")
            polys.append(poly)
        return cls(K, grid, values, polys).simplified()

    @classmethod
    def from_pieces(cls, K: L.TimeScaleLine, pieces, jumps=()) -> "PiecewisePoly":
        """Pieces (lo, hi, poly) must cover K; at a shared end the right piece wins.

        Each jump (c, size) adds size·𝟙[x ≥ c].
        """
        pieces = sorted(((N.exact(a), N.exact(b), [N.exact(c) for c in p]) for a, b, p in pieces), key=lambda t: t[0])
        assigns = []
        for a, b, p in pieces:
            lo, hi = K.ceil(a), K.floor(b)
            if lo is None or hi is None or hi < lo:
                raise InvalidInput(f"piece [{N.fmt(a)}, {N.fmt(b)}] misses the line")
            assigns.append((IntervalSpec(lo, hi), p))
        if not assigns:
            raise InvalidInput("no pieces given")
        base = cls.from_assignments(K, assigns, require_cover=True)
        for c, size in jumps:
            c = K.check(N.exact(c))
            base = base + cls.from_assignments(K, [(IntervalSpec(c, K.one), [N.exact(size)])])
        return base

    @classmethod
    def polynomial(cls, K: L.TimeScaleLine, coeffs) -> "PiecewisePoly":
        return cls.from_assignments(K, [(K.whole(), [N.exact(c) for c in coeffs])])

    @classmethod
    def constant(cls, K, c) -> "PiecewisePoly":
        return cls.polynomial(K, [c])

    @classmethod
    def step(cls, K: L.TimeScaleLine, points, values) -> "PiecewisePoly":
        """Right-continuous step: values[j] on [points[j], points[j+1])."""
        points = [K.check(N.exact(p)) for p in points]
        if points[0] != K.zero:
            raise InvalidInput("step functions start at 0_K")
        assigns = []
        for j, p in enumerate(points):
            hi = points[j + 1] if j + 1 < len(points) else K.one
            last = j + 1 == len(points)
            assigns.append((IntervalSpec(p, hi, False, not last), [N.exact(values[j])]))
        return cls.from_assignments(K, assigns)

    @classmethod
    def indicator(cls, K: L.TimeScaleLine, spec: IntervalSpec, value=1) -> "PiecewisePoly":
        return cls.from_assignments(K, [(spec, [N.exact(value)])])

    # evaluation -------------------------------------------------------------

    def _locate(self, x):
        j = bisect.bisect_right(self.breaks, x) - 1
        return j, (j >= 0 and self.breaks[j] == x)

    def __call__(self, x):
        j, at = self._locate(x)
        if at:
            return self.values[j]
        if j < 0 or j >= len(self.polys) or self.polys[j] is None:
            raise L.PointNotInLine(f"{x!r} is not a point of the line")
        return N.peval(self.polys[j], x)

    def poly_on(self, u, v):
        """Polynomial on the open cell containing (u, v); None across a gap."""
        j = bisect.bisect_right(self.breaks, u) - 1
        return self.polys[j]

    def _dense_left_limit(self, x):
        j, at = self._locate(x)
        if at:
            return N.peval(self.polys[j - 1], x)
        return N.peval(self.polys[j], x)

    def _dense_right_limit(self, x):
        j, at = self._locate(x)
        return N.peval(self.polys[j], x)

    def breakpoints(self):
        return list(self.breaks)

    def is_continuous(self) -> bool:
        K = self.line
        for j, b in enumerate(self.breaks):
            if j > 0 and self.polys[j - 1] is not None and N.peval(self.polys[j - 1], b) != self.values[j]:
                return False
            if j < len(self.polys) and self.polys[j] is not None and N.peval(self.polys[j], b) != self.values[j]:
                return False
        return True

    def is_right_continuous(self) -> bool:
        return all(
            self.polys[j] is None or N.peval(self.polys[j], b) == self.values[j]
            for j, b in enumerate(self.breaks[:-1])
        )

    def right_jumps(self):
        return [
            (b, N.peval(self.polys[j], b) - self.values[j])
            for j, b in enumerate(self.breaks[:-1])
            if self.polys[j] is not None and N.peval(self.polys[j], b) != self.values[j]
        ]

    # algebra ----------------------------------------------------------------

    def _combine(self, other: "PiecewisePoly", pointwise, polywise):
        K = self.line
        grid = sorted(set(self.breaks) | set(other.breaks))
        values = [pointwise(self(b), other(b)) for b in grid]
        polys = []
        for u, v in zip(grid, grid[1:]):
            p, q = self.poly_on(u, v), other.poly_on(u, v)
            polys.append(None if p is None else polywise(p, q))
        return PiecewisePoly(K, grid, values, polys).simplified()

    def add(self, other):
        return self._combine(other, lambda a, b: a + b, N.padd)

    def mul(self, other):
        return self._combine(other, lambda a, b: a * b, N.pmul)

    def scale(self, lam):
        return PiecewisePoly(self.line, self.breaks, [lam * v for v in self.values],
                             [None if p is None else N.pscale(p, lam) for p in self.polys]).simplified()

    def times_indicator(self, spec: IntervalSpec) -> "PiecewisePoly":
        return self.mul(PiecewisePoly.indicator(self.line, spec))

    def abs(self) -> "PiecewisePoly":
        grid = list(self.breaks)
        for j, p in enumerate(self.polys):
            if p is not None:
                grid += N.real_roots_in(p, self.breaks[j], self.breaks[j + 1])
        grid = sorted(set(grid))
        values = [abs(self(b)) for b in grid]
        polys = []
        for u, v in zip(grid, grid[1:]):
            p = self.poly_on(u, v)
            if p is None:
                polys.append(None)
                continue
            mid = (u + v) / 2
            polys.append(N.pscale(p, -1) if N.peval(p, mid) < 0 else p)
        return PiecewisePoly(self.line, grid, values, polys).simplified()

    def simplified(self) -> "PiecewisePoly":
        K = self.line
        ends = {a for a, _ in K.components} | {b for _, b in K.components}
        breaks, values = [self.breaks[0]], [self.values[0]]
        for j in range(1, len(self.breaks)):
            b = self.breaks[j]
            left = self.polys[j - 1]
            right = self.polys[j] if j < len(self.polys) else None
            if (
                b not in ends
                and left is not None
                and right is not None
                and N.trim(left) == N.trim(right)
                and N.peval(left, b) == self.values[j]
            ):
                continue
            breaks.append(b)
            values.append(self.values[j])
        polys = [self.poly_on(u, v) for u, v in zip(breaks, breaks[1:])]
        obj = PiecewisePoly.__new__(PiecewisePoly)
        obj.line, obj.breaks, obj.values, obj.polys = K, breaks, values, [None if p is None else N.trim(p) for p in polys]
        obj.continuous = obj.is_continuous()
        return obj

    # analysis ---------------------------------------------------------------

    def cells(self, a=None, b=None):
        """Open non-gap cells (u, v, poly) inside [a, b]."""
        a = self.line.zero if a is None else a
        b = self.line.one if b is None else b
        out = []
        for j, p in enumerate(self.polys):
            u, v = self.breaks[j], self.breaks[j + 1]
            if p is None or v <= a or u >= b:
                continue
            out.append((max(u, a), min(v, b), p))
        return out

    def oscillation(self, a, b):
        vals = [self.values[j] for j, p in enumerate(self.breaks) if a <= p <= b]
        for u, v, p in self.cells(a, b):
            vals += [N.peval(p, u), N.peval(p, v)]
            vals += [N.peval(p, r) for r in N.real_roots_in(N.pderiv(p), u, v)]
        if a not in self.breaks:
            vals.append(self(a))
        if b not in self.breaks:
            vals.append(self(b))
        return max(vals) - min(vals)

    def is_nondecreasing(self) -> bool:
        K = self.line
        prev = None
        for j, b in enumerate(self.breaks):
            v = self.values[j]
            if j > 0:
                lv = self.left_limit(b)
                if v < lv:
                    return False
            if prev is not None and j > 0 and self.polys[j - 1] is None and v < prev:
                return False
            if j < len(self.polys) and self.polys[j] is not None:
                p = self.polys[j]
                u, w = b, self.breaks[j + 1]
                if N.peval(p, u) < v:
                    return False
                d = N.pderiv(p)
                crit = [u, w] + N.real_roots_in(N.pderiv(d), u, w)
                if min(N.peval(d, c) for c in crit) < 0:
                    return False
            prev = v
        return True


def poly_variation(p, u, v):
    pts = [u] + N.real_roots_in(N.pderiv(p), u, v) + [v]
    return sum(abs(N.peval(p, y) - N.peval(p, x)) for x, y in zip(pts, pts[1:]))


def poly_integral(p, u, v):
    P = N.pinteg(p)
    return N.peval(P, v) - N.peval(P, u)


# ----------------------------------------------------------------------------
# ordinal-indexed functions

def _degree_one_line(K):
    if not isinstance(K, L.OrdinalLine) or K.alpha.degree > 1:
        raise UnsupportedLine("structured ordinal functions need an ordinal line below w^2")


class OrdinalEventual(Fn):
    """Function on [0, w·k + m] constant from some index on inside every w-block.

    Block j lists explicit values at w·j + n for n < len(values) and a tail
    value for the rest.
    """

    def __init__(self, line: L.OrdinalLine, blocks):
        _degree_one_line(line)
        k = line.alpha.coeffs[1] if line.alpha.degree == 1 else 0
        if len(blocks) != k + 1:
            raise InvalidInput(f"need {k + 1} blocks for {line.alpha}")
        self.line = line
        self.blocks = [(list(vals), tail) for vals, tail in blocks]
        self.continuous = all(self._block_start(j + 1) == tail for j, (_, tail) in enumerate(self.blocks[:-1]))

    def _block_start(self, j):
        vals, tail = self.blocks[j]
        return vals[0] if vals else tail

    @classmethod
    def from_func(cls, line, func, horizon: int = 64):
        """Sample ``func``; assumes it is constant past ``horizon`` in each block."""
        _degree_one_line(line)
        k = line.alpha.coeffs[1] if line.alpha.degree == 1 else 0
        blocks = []
        for j in range(k + 1):
            n_max = line.alpha.coeffs[0] if j == k else horizon
            vals = [func(Ordinal(n, j)) for n in range(n_max + 1)]
            blocks.append((vals, vals[-1]))
        return cls(line, blocks)

    def __call__(self, x):
        j = x.coeffs[1] if x.degree >= 1 else 0
        n = x.coeffs[0]
        vals, tail = self.blocks[j]
        return vals[n] if n < len(vals) else tail

    def _dense_left_limit(self, x):
        j = x.coeffs[1]
        return self.blocks[j - 1][1]

    def breakpoints(self):
        out = []
        for j, (vals, _) in enumerate(self.blocks):
            top = len(vals) + 1
            if j == len(self.blocks) - 1:
                top = min(top, self.line.alpha.coeffs[0] + 1)
            out += [Ordinal(n, j) for n in range(top)]
        return out

    def _combine(self, other, op):
        blocks = []
        for (va, ta), (vb, tb) in zip(self.blocks, other.blocks):
            n = max(len(va), len(vb))
            vals = [op(va[i] if i < len(va) else ta, vb[i] if i < len(vb) else tb) for i in range(n)]
            blocks.append((vals, op(ta, tb)))
        return OrdinalEventual(self.line, blocks)

    def add(self, other):
        return self._combine(other, lambda a, b: a + b)

    def mul(self, other):
        return self._combine(other, lambda a, b: a * b)

    def scale(self, lam):
        return OrdinalEventual(self.line, [([lam * v for v in vals], lam * t) for vals, t in self.blocks])

    def abs(self):
        return OrdinalEventual(self.line, [([abs(v) for v in vals], abs(t)) for vals, t in self.blocks])

    def support_points(self, a, b):
        """Points c in (a, b] where an integrator may have G(c) ≠ L_G(c)."""
        K = self.line
        return [c for c in self.breakpoints() if K.lt(a, c) and K.le(c, b)]


class OrdinalSeries(Fn):
    """Function on [0, w] from an index rule, binary64 valued.

    ``at_limit`` is the value at w (None: the limit of the rule, computed).
    ``limit`` optionally declares lim f(n) exactly.
    """

    def __init__(self, line: L.OrdinalLine, rule: Callable[[int], float], at_limit=None, limit=None,
                 alternating: bool = False, tail_bound: Callable[[int], float] | None = None,
                 nondecreasing: bool = False, name: str = "series"):
        if not isinstance(line, L.OrdinalLine) or line.alpha != Ordinal(0, 1):
            raise UnsupportedLine("ordinal series live on [0, w]")
        self.line, self.rule = line, rule
        self._at_limit, self.limit = at_limit, limit
        self.alternating = alternating
        self.tail_bound = tail_bound
        self.nondecreasing = nondecreasing
        self.name = name
        self.continuous = at_limit is None or (limit is not None and at_limit == limit)

    def value_at(self, n: int):
        return self.rule(n)

    def __call__(self, x):
        if x.degree >= 1:
            return self.at_limit
        return self.rule(x.coeffs[0])

    @property
    def at_limit(self):
        if callable(self._at_limit):
            return self._at_limit()
        if self._at_limit is not None:
            return self._at_limit
        return self.limit_value()[0]

    def limit_value(self, tol: float = 1e-12, max_n: int = 1 << 22):
        """(value, error) for lim f(n)."""
        if self.limit is not None:
            return self.limit, 0
        from .bridges import accelerate_limit

        return accelerate_limit(self.rule, self.alternating, tol, max_n)

    def _dense_left_limit(self, x):
        v, err = self.limit_value()
        if v is None:
            raise NotRegulated("sequence limit could not be certified")
        return v

    def tail_oscillation(self, n: int):
        if self.tail_bound is None:
            raise NotRegulated("no tail bound declared")
        return self.tail_bound(n)

    def breakpoints(self):
        return [self.line.one]

    def scale(self, lam):
        al = None if self._at_limit is None else (lambda: lam * self.at_limit) if callable(self._at_limit) else lam * self._at_limit
        lim = None if self.limit is None else lam * self.limit
        return OrdinalSeries(self.line, lambda n: lam * self.rule(n), al, lim, self.alternating, None,
                             self.nondecreasing and lam >= 0, self.name)


class PartialSums:
    """Cached cumulative sums of a term rule."""

    def __init__(self, term: Callable[[int], float]):
        self.term = term
        self.sums: list = []

    def __call__(self, n: int):
        s = self.sums
        if n >= len(s):
            acc = s[-1] if s else 0.0
            t = self.term
            for i in range(len(s), n + 1):
                acc += t(i)
                s.append(acc)
        return s[n]


# ----------------------------------------------------------------------------
# generic algebra

def add(f: Fn, g: Fn) -> Fn:
    if type(f) is type(g) and hasattr(f, "add"):
        return f.add(g)
    if isinstance(f, Table) and isinstance(g, Table):
        return Table(f.line, {p: f(p) + g(p) for p in f.values})
    K = f.line
    return BlackBox(K, lambda x: f(x) + g(x), f.continuous and g.continuous,
                    breakpoints=sorted(set(f.breakpoints()) | set(g.breakpoints()), key=K.key))


def scale(f: Fn, lam) -> Fn:
    if hasattr(f, "scale"):
        return f.scale(lam)
    if isinstance(f, Table):
        return Table(f.line, {p: lam * v for p, v in f.values.items()})
    return BlackBox(f.line, lambda x: lam * f(x), f.continuous, breakpoints=f.breakpoints())


def mul(f: Fn, g: Fn) -> Fn:
    if type(f) is type(g) and hasattr(f, "mul"):
        return f.mul(g)
    if isinstance(f, Table) and isinstance(g, Table):
        return Table(f.line, {p: f(p) * g(p) for p in f.values})
    return BlackBox(f.line, lambda x: f(x) * g(x), f.continuous and g.continuous,
                    breakpoints=sorted(set(f.breakpoints()) | set(g.breakpoints()), key=f.line.key))


def absolute(f: Fn) -> Fn:
    if hasattr(f, "abs"):
        return f.abs()
    if isinstance(f, Table):
        return Table(f.line, {p: abs(v) for p, v in f.values.items()})
    return BlackBox(f.line, lambda x: abs(f(x)), f.continuous, breakpoints=f.breakpoints())


def indicator(K: CompactLine, spec: IntervalSpec, value=1) -> Fn:
    """χ of an interval as the most structured function the line allows."""
    if isinstance(K, L.TimeScaleLine):
        return PiecewisePoly.indicator(K, spec, value)
    if K.points() is not None:
        return Table(K, {p: (value if L.contains(K, spec, p) else 0) for p in K.points()})
    if isinstance(K, L.OrdinalLine) and K.alpha.degree <= 1:
        return OrdinalEventual.from_func(K, lambda x: value if L.contains(K, spec, x) else 0,
                                         horizon=_ordinal_horizon(K, spec))
    return BlackBox(K, lambda x: value if L.contains(K, spec, x) else 0, breakpoints=[spec.lower, spec.upper])


def _ordinal_horizon(K, spec):
    h = 2
    for p in (spec.lower, spec.upper):
        h = max(h, p.coeffs[0] + 2)
    return h


def restrict_to(f: Fn, spec: IntervalSpec) -> Fn:
    """f_I: f on I, zero elsewhere."""
    return mul(f, indicator(f.line, spec))


def constant(K: CompactLine, c) -> Fn:
    if isinstance(K, L.TimeScaleLine):
        return PiecewisePoly.constant(K, c)
    if K.points() is not None:
        return Table(K, {p: c for p in K.points()})
    if isinstance(K, L.OrdinalLine) and K.alpha.degree <= 1:
        k = K.alpha.coeffs[1] if K.alpha.degree == 1 else 0
        return OrdinalEventual(K, [([], c) for _ in range(k + 1)])
    return BlackBox(K, lambda x: c, True)
