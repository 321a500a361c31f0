"""Compact lines, their points, point classification and order intervals."""

from __future__ import annotations

import bisect
import re
from dataclasses import dataclass
from fractions import Fraction
from functools import total_ordering

from ._num import exact, fmt
from .errors import EndpointsOutOfOrder, FamilyMismatch, InvalidInput, PointNotInLine


# ----------------------------------------------------------------------------
# points

@total_ordering
class Ordinal:
    """Ordinal below omega^(d+1) in Cantor normal form.

    ``coeffs[k]`` multiplies omega^k.

    >>> Ordinal.parse("w*2+3")
    Ordinal('w*2+3')
    >>> Ordinal(3) < Ordinal.parse("w")
    True
    """

    __slots__ = ("coeffs",)

    def __init__(self, *coeffs: int):
        cs = [int(c) for c in coeffs] or [0]
        if any(c < 0 for c in cs):
            raise InvalidInput("ordinal coefficients must be nonnegative")
        while len(cs) > 1 and cs[-1] == 0:
            cs.pop()
        self.coeffs = tuple(cs)

    _TERM = re.compile(r"^(?:(w)(?:\^(\d+))?(?:\*(\d+))?|(\d+))$")

    @classmethod
    def parse(cls, text) -> "Ordinal":
        if isinstance(text, Ordinal):
            return text
        if isinstance(text, int) and not isinstance(text, bool):
            return cls(text)
        if isinstance(text, (list, tuple)):
            return cls(*text)
        if not isinstance(text, str):
            raise InvalidInput(f"cannot parse ordinal {text!r}")
        s = text.replace(" ", "").replace("ω", "w").replace("**", "^")
        if not s:
            raise InvalidInput("empty ordinal")
        coeffs: dict[int, int] = {}
        last = None
        for term in s.split("+"):
            m = cls._TERM.match(term)
            if not m:
                raise InvalidInput(f"cannot parse ordinal term {term!r} in {text!r}")
            if m.group(4) is not None:
                deg, c = 0, int(m.group(4))
            else:
                deg = int(m.group(2)) if m.group(2) else 1
                c = int(m.group(3)) if m.group(3) else 1
            if last is not None and deg >= last:
                raise InvalidInput(f"ordinal {text!r} is not in Cantor normal form")
            last = deg
            coeffs[deg] = c
        top = max(coeffs)
        return cls(*[coeffs.get(k, 0) for k in range(top + 1)])

    @property
    def degree(self) -> int:
        return len(self.coeffs) - 1

    def key(self):
        return (self.degree,) + tuple(reversed(self.coeffs))

    def is_zero(self) -> bool:
        return self.coeffs == (0,)

    def is_limit(self) -> bool:
        return self.coeffs[0] == 0 and not self.is_zero()

    def finite(self):
        return self.coeffs[0] if self.degree == 0 else None

    def succ(self) -> "Ordinal":
        return Ordinal(self.coeffs[0] + 1, *self.coeffs[1:])

    def pred(self) -> "Ordinal":
        if self.coeffs[0] == 0:
            raise ValueError("limit or zero ordinal has no predecessor")
        return Ordinal(self.coeffs[0] - 1, *self.coeffs[1:])

    def __eq__(self, other):
        if isinstance(other, Ordinal):
            return self.coeffs == other.coeffs
        return NotImplemented

    def __lt__(self, other):
        if isinstance(other, Ordinal):
            return self.key() < other.key()
        return NotImplemented

    def __hash__(self):
        return hash(("Ordinal", self.coeffs))

    def __str__(self):
        parts = []
        for k in range(self.degree, -1, -1):
            c = self.coeffs[k]
            if c == 0:
                continue
            if k == 0:
                parts.append(str(c))
            else:
                base = "w" if k == 1 else f"w^{k}"
                parts.append(base if c == 1 else f"{base}*{c}")
        return "+".join(parts) or "0"

    def __repr__(self):
        return f"Ordinal({str(self)!r})"


@dataclass(frozen=True)
class Pair:
    """Point of a lexicographic product."""

    left: object
    right: object

    def __repr__(self):
        return f"Pair({self.left!r}, {self.right!r})"


@dataclass(frozen=True)
class Arrow:
    """Point of a double-arrow line; ``side`` is 0 or 1."""

    base: object
    side: int

    def __repr__(self):
        return f"Arrow({self.base!r}, {self.side})"


@dataclass(frozen=True)
class PointClass:
    left_isolated: bool
    predecessor: object
    right_isolated: bool
    successor: object

    def describe(self, K: "CompactLine") -> str:
        def side(name, iso, nb):
            if not iso:
                return f"{name}Dense"
            return f"{name}Isolated({'none' if nb is None else K.format_point(nb)})"

        return f"{side('Left', self.left_isolated, self.predecessor)}, {side('Right', self.right_isolated, self.successor)}"


# ----------------------------------------------------------------------------
# lines

class CompactLine:
    """Common interface of the five line families.

    Subclasses provide ``key``, ``contains``, ``_right`` and ``_left``; the
    latter two return ``(isolated, neighbour)`` with neighbour None at the
    ends or on the dense side.
    """

    family = "abstract"

    zero: object
    one: object

    def key(self, x):
        raise NotImplementedError

    def contains(self, x) -> bool:
        raise NotImplementedError

    def _right(self, x):
        raise NotImplementedError

    def _left(self, x):
        raise NotImplementedError

    def check(self, x):
        if not self.contains(x):
            raise PointNotInLine(f"{x!r} is not a point of {self!r}")
        return x

    def compare(self, x, y) -> int:
        kx, ky = self._safe_key(x), self._safe_key(y)
        return (kx > ky) - (kx < ky)

    def _safe_key(self, x):
        if not self._same_family(x):
            raise FamilyMismatch(f"{x!r} does not belong to the {self.family} family")
        return self.key(self.check(x))

    def _same_family(self, x) -> bool:
        return True

    def lt(self, x, y) -> bool:
        return self.key(x) < self.key(y)

    def le(self, x, y) -> bool:
        return self.key(x) <= self.key(y)

    def max(self, *xs):
        return max(xs, key=self.key)

    def min(self, *xs):
        return min(xs, key=self.key)

    def sup(self, xs):
        return max(xs, key=self.key)

    def inf(self, xs):
        return min(xs, key=self.key)

    def successor(self, x):
        """x⁺ when x is right-isolated and below 1_K, else None."""
        return self._right(x)[1]

    def predecessor(self, x):
        return self._left(x)[1]

    def right_dense(self, x) -> bool:
        return not self._right(x)[0]

    def left_dense(self, x) -> bool:
        return not self._left(x)[0]

    def classify(self, x) -> PointClass:
        self.check(x)
        li, p = self._left(x)
        ri, s = self._right(x)
        return PointClass(li, p, ri, s)

    def approach(self, y, hi):
        """A point strictly between ``y`` and the left-dense point ``hi``."""
        raise NotImplementedError

    def limit_ceilings(self, y):
        """Left-dense points above ``y`` reached only through infinitely many successor steps."""
        return []

    def points(self):
        """All points when the line is finite, else None."""
        return None

    def sample_below(self, x, rng):
        raise NotImplementedError

    def sample_above(self, x, rng):
        raise NotImplementedError

    def random_point(self, rng):
        raise NotImplementedError

    def format_point(self, x) -> str:
        return str(x)

    def parse_point(self, v):
        raise NotImplementedError

    def whole(self) -> "IntervalSpec":
        return IntervalSpec(self.zero, self.one, False, False)


class FiniteLine(CompactLine):
    """Finitely many labels in the given order."""

    family = "finite"

    def __init__(self, labels):
        labels = list(labels)
        if not labels:
            raise InvalidInput("a finite line needs at least one label")
        self.labels = labels
        self._index = {}
        for i, lab in enumerate(labels):
            if lab in self._index:
                raise InvalidInput(f"duplicate label {lab!r}")
            self._index[lab] = i
        self.zero, self.one = labels[0], labels[-1]

    def __repr__(self):
        return f"FiniteLine({self.labels!r})"

    def contains(self, x):
        try:
            return x in self._index
        except TypeError:
            return False

    def key(self, x):
        return self._index[x]

    def index(self, x) -> int:
        return self._index[x]

    def _right(self, x):
        i = self._index[x]
        return True, (self.labels[i + 1] if i + 1 < len(self.labels) else None)

    def _left(self, x):
        i = self._index[x]
        return True, (self.labels[i - 1] if i > 0 else None)

    def approach(self, y, hi):
        raise ValueError("finite lines have no left-dense points")

    def points(self):
        return list(self.labels)

    def sample_below(self, x, rng):
        return self.labels[rng.randrange(self._index[x])]

    def sample_above(self, x, rng):
        i = self._index[x]
        return self.labels[rng.randrange(i + 1, len(self.labels))]

    def random_point(self, rng):
        return rng.choice(self.labels)

    def format_point(self, x):
        return fmt(x) if not isinstance(x, str) else x

    def parse_point(self, v):
        for cand in (v, _maybe_exact(v)):
            if cand is not None and self.contains(cand):
                return cand
        raise PointNotInLine(f"{v!r} is not a label of this line")


def _maybe_exact(v):
    try:
        return exact(v)
    except InvalidInput:
        return None


class TimeScaleLine(CompactLine):
    """Finite union of disjoint closed real intervals.

    >>> T = TimeScaleLine([(0, 1), (2, 2)])
    >>> T.classify(Fraction(1)).describe(T)
    'LeftDense, RightIsolated(2)'
    """

    family = "timescale"

    def __init__(self, intervals):
        comps = []
        for iv in intervals:
            if len(iv) != 2:
                raise InvalidInput(f"time-scale component must be a pair, got {iv!r}")
            a, b = exact(iv[0]), exact(iv[1])
            if b < a:
                raise InvalidInput(f"component [{fmt(a)}, {fmt(b)}] has right end below left end")
            comps.append((a, b))
        if not comps:
            raise InvalidInput("a time scale needs at least one component")
        for (a0, b0), (a1, b1) in zip(comps, comps[1:]):
            if not b0 < a1:
                raise InvalidInput("time-scale components must be sorted and pairwise disjoint")
        self.components = comps
        self._lefts = [a for a, _ in comps]
        self.zero, self.one = comps[0][0], comps[-1][1]

    def __repr__(self):
        return "TimeScaleLine([" + ", ".join(f"[{fmt(a)}, {fmt(b)}]" for a, b in self.components) + "])"

    def _same_family(self, x):
        return isinstance(x, (Fraction, float, int)) and not isinstance(x, bool)

    def component_index(self, x):
        i = bisect.bisect_right(self._lefts, x) - 1
        if i < 0 or x > self.components[i][1]:
            return None
        return i

    def contains(self, x):
        if not self._same_family(x):
            return False
        return self.component_index(x) is not None

    def key(self, x):
        return x

    def _right(self, x):
        i = self.component_index(x)
        a, b = self.components[i]
        if x < b:
            return False, None
        if i + 1 < len(self.components):
            return True, self.components[i + 1][0]
        return True, None

    def _left(self, x):
        i = self.component_index(x)
        a, b = self.components[i]
        if x > a:
            return False, None
        if i > 0:
            return True, self.components[i - 1][1]
        return True, None

    def floor(self, v):
        """Largest point ≤ v, or None."""
        i = bisect.bisect_right(self._lefts, v) - 1
        if i < 0:
            return None
        a, b = self.components[i]
        return v if v <= b else b

    def ceil(self, v):
        """Smallest point ≥ v, or None."""
        i = bisect.bisect_right(self._lefts, v) - 1
        if i >= 0 and v <= self.components[i][1]:
            return v
        return self.components[i + 1][0] if i + 1 < len(self.components) else None

    def approach(self, y, hi):
        i = self.component_index(hi)
        a = self.components[i][0]
        base = y if y > a else a
        z = hi - (hi - base) / 1024
        if not (y < z < hi):
            z = (base + hi) / 2
        if not (y < z < hi):
            z = Fraction(base) + (Fraction(hi) - Fraction(base)) / 2
        return z

    def points(self):
        if all(a == b for a, b in self.components):
            return [a for a, _ in self.components]
        return None

    def is_discrete(self) -> bool:
        return all(a == b for a, b in self.components)

    def ball(self, x, r) -> "IntervalSpec":
        """The open set (x - r, x + r) ∩ K written with endpoints in K."""
        return self.clip(x - r, x + r)

    def clip(self, u, v) -> "IntervalSpec":
        if u < self.zero:
            lo, lo_open = self.zero, False
        else:
            lo, lo_open = self.floor(u), True
        if v > self.one:
            hi, hi_open = self.one, False
        elif self.contains(v):
            hi, hi_open = v, True
        else:
            hi, hi_open = self.floor(v), False
        return IntervalSpec(lo, hi, lo_open, hi_open)

    def _rand_real(self, lo, hi, rng):
        return lo + (hi - lo) * Fraction(rng.randint(1, 999), 1000)

    def sample_below(self, x, rng):
        i = self.component_index(x)
        if x > self.components[i][0] and rng.random() < 0.8:
            return self._rand_real(self.components[i][0], x, rng)
        pts = [p for p in (self.random_point(rng) for _ in range(8)) if p < x]
        return pts[0] if pts else self.zero

    def sample_above(self, x, rng):
        i = self.component_index(x)
        if x < self.components[i][1] and rng.random() < 0.8:
            return x + (self.components[i][1] - x) * Fraction(rng.randint(1, 999), 1000)
        pts = [p for p in (self.random_point(rng) for _ in range(8)) if p > x]
        return pts[0] if pts else self.one

    def random_point(self, rng):
        a, b = self.components[rng.randrange(len(self.components))]
        if a == b or rng.random() < 0.15:
            return a if rng.random() < 0.5 else b
        return self._rand_real(a, b, rng)

    def format_point(self, x):
        return fmt(x)

    def parse_point(self, v):
        return self.check(exact(v))


class OrdinalLine(CompactLine):
    """The ordinal interval [0, alpha] with alpha < omega^(d+1).

    >>> K = OrdinalLine("w")
    >>> K.classify(Ordinal.parse("w")).describe(K)
    'LeftDense, RightIsolated(none)'
    """

    family = "ordinal"

    def __init__(self, alpha, d: int = 3):
        alpha = Ordinal.parse(alpha)
        if alpha.degree > d:
            raise InvalidInput(f"ordinal {alpha} exceeds the configured degree {d}")
        self.alpha, self.d = alpha, d
        self.zero, self.one = Ordinal(0), alpha

    def __repr__(self):
        return f"OrdinalLine({str(self.alpha)!r})"

    def _same_family(self, x):
        return isinstance(x, Ordinal)

    def contains(self, x):
        return isinstance(x, Ordinal) and x.degree <= self.d and not self.alpha < x

    def key(self, x):
        return x.key()

    def _right(self, x):
        if x == self.alpha:
            return True, None
        return True, x.succ()

    def _left(self, x):
        if x.is_zero():
            return True, None
        if x.is_limit():
            return False, None
        return True, x.pred()

    def approach(self, y, hi):
        return y.succ()

    def limit_ceilings(self, y):
        out = []
        for k in range(self.alpha.degree, 0, -1):
            cs = list(y.coeffs) + [0] * (k + 1 - len(y.coeffs))
            cs = [0] * k + [cs[k] + 1] + cs[k + 1:]
            lam = Ordinal(*cs)
            if not self.alpha < lam and y < lam:
                out.append(lam)
        return sorted(set(out), key=Ordinal.key, reverse=True)

    def points(self):
        fin = self.alpha.finite()
        return [Ordinal(i) for i in range(fin + 1)] if fin is not None else None

    def sample_below(self, x, rng):
        nz = [k for k, c in enumerate(x.coeffs) if c > 0]
        k = rng.choice(nz)
        cs = list(x.coeffs)
        cs[k] = rng.randrange(cs[k])
        for j in range(k):
            cs[j] = rng.randrange(5)
        return Ordinal(*cs)

    def sample_above(self, x, rng):
        for _ in range(16):
            p = self.random_point(rng)
            if x < p:
                return p
        return x.succ() if rng.random() < 0.5 else self.alpha

    def random_point(self, rng):
        cs = [0] * (self.alpha.degree + 1)
        tight = True
        for k in range(self.alpha.degree, -1, -1):
            bound = self.alpha.coeffs[k] if tight else 4
            cs[k] = rng.randint(0, bound)
            tight = tight and cs[k] == bound
        return Ordinal(*cs)

    def parse_point(self, v):
        return self.check(Ordinal.parse(v))


class LexLine(CompactLine):
    """Lexicographic product outer × inner."""

    family = "lex"

    def __init__(self, outer: CompactLine, inner: CompactLine):
        self.outer, self.inner = outer, inner
        self.zero = Pair(outer.zero, inner.zero)
        self.one = Pair(outer.one, inner.one)

    def __repr__(self):
        return f"LexLine({self.outer!r}, {self.inner!r})"

    def _same_family(self, x):
        return isinstance(x, Pair)

    def contains(self, x):
        return isinstance(x, Pair) and self.outer.contains(x.left) and self.inner.contains(x.right)

    def key(self, x):
        return (self.outer.key(x.left), self.inner.key(x.right))

    def _right(self, x):
        a, b = x.left, x.right
        if b != self.inner.one:
            iso, s = self.inner._right(b)
            return (True, Pair(a, s)) if iso else (False, None)
        iso, s = self.outer._right(a)
        if not iso:
            return False, None
        return True, (Pair(s, self.inner.zero) if s is not None else None)

    def _left(self, x):
        a, b = x.left, x.right
        if b != self.inner.zero:
            iso, p = self.inner._left(b)
            return (True, Pair(a, p)) if iso else (False, None)
        iso, p = self.outer._left(a)
        if not iso:
            return False, None
        return True, (Pair(p, self.inner.one) if p is not None else None)

    def approach(self, y, hi):
        h, q = hi.left, hi.right
        if q == self.inner.zero:
            return Pair(self.outer.approach(y.left, h), self.inner.one)
        base = y.right if y.left == h else self.inner.zero
        return Pair(h, self.inner.approach(base, q))

    def limit_ceilings(self, y):
        out = [Pair(lam, self.inner.zero) for lam in self.outer.limit_ceilings(y.left)]
        out += [Pair(y.left, lam) for lam in self.inner.limit_ceilings(y.right)]
        return sorted(out, key=self.key, reverse=True)

    def points(self):
        po, pi = self.outer.points(), self.inner.points()
        if po is None or pi is None:
            return None
        return [Pair(a, b) for a in po for b in pi]

    def sample_below(self, x, rng):
        a, b = x.left, x.right
        if b != self.inner.zero and (a == self.outer.zero or rng.random() < 0.6):
            return Pair(a, self.inner.sample_below(b, rng))
        if a == self.outer.zero:
            return self.zero
        return Pair(self.outer.sample_below(a, rng), self.inner.random_point(rng))

    def sample_above(self, x, rng):
        a, b = x.left, x.right
        if b != self.inner.one and (a == self.outer.one or rng.random() < 0.6):
            return Pair(a, self.inner.sample_above(b, rng))
        if a == self.outer.one:
            return self.one
        return Pair(self.outer.sample_above(a, rng), self.inner.random_point(rng))

    def random_point(self, rng):
        return Pair(self.outer.random_point(rng), self.inner.random_point(rng))

    def format_point(self, x):
        return f"({self.outer.format_point(x.left)}, {self.inner.format_point(x.right)})"

    def parse_point(self, v):
        if not isinstance(v, (list, tuple)) or len(v) != 2:
            raise InvalidInput(f"lex point must be a pair, got {v!r}")
        return Pair(self.outer.parse_point(v[0]), self.inner.parse_point(v[1]))


class DoubleArrowLine(CompactLine):
    """K × {0} ∪ L × {1} ordered lexicographically.

    ``subset`` is ``"all"``, a list of points, or ``("intervals", [(a, b), ...])``
    describing L as a finite union of closed subintervals.
    """

    family = "double-arrow"

    def __init__(self, base: CompactLine, subset="all"):
        self.base = base
        if subset == "all":
            self._mode, self._pts, self._ivs = "all", frozenset(), []
        elif isinstance(subset, tuple) and subset and subset[0] == "intervals":
            ivs = []
            for a, b in subset[1]:
                base.check(a)
                base.check(b)
                if base.lt(b, a):
                    raise InvalidInput("subset interval with right end below left end")
                ivs.append((a, b))
            self._mode, self._pts, self._ivs = "intervals", frozenset(), ivs
        else:
            pts = [base.check(p) for p in subset]
            self._mode, self._pts, self._ivs = "points", frozenset(pts), []
        self.zero = Arrow(base.zero, 0)
        self.one = Arrow(base.one, 1 if self.in_subset(base.one) else 0)

    def __repr__(self):
        return f"DoubleArrowLine({self.base!r}, {self._mode})"

    def in_subset(self, x) -> bool:
        if self._mode == "all":
            return True
        if self._mode == "points":
            return x in self._pts
        return any(self.base.le(a, x) and self.base.le(x, b) for a, b in self._ivs)

    def _same_family(self, x):
        return isinstance(x, Arrow)

    def contains(self, x):
        if not isinstance(x, Arrow) or x.side not in (0, 1) or not self.base.contains(x.base):
            return False
        return x.side == 0 or self.in_subset(x.base)

    def key(self, x):
        return (self.base.key(x.base), x.side)

    def _top(self, b):
        return Arrow(b, 1) if self.in_subset(b) else Arrow(b, 0)

    def _right(self, x):
        if x.side == 0 and self.in_subset(x.base):
            return True, Arrow(x.base, 1)
        iso, s = self.base._right(x.base)
        if not iso:
            return False, None
        return True, (Arrow(s, 0) if s is not None else None)

    def _left(self, x):
        if x.side == 1:
            return True, Arrow(x.base, 0)
        iso, p = self.base._left(x.base)
        if not iso:
            return False, None
        return True, (self._top(p) if p is not None else None)

    def approach(self, y, hi):
        return self._top(self.base.approach(y.base, hi.base))

    def limit_ceilings(self, y):
        return [Arrow(lam, 0) for lam in self.base.limit_ceilings(y.base)]

    def points(self):
        pb = self.base.points()
        if pb is None:
            return None
        out = []
        for b in pb:
            out.append(Arrow(b, 0))
            if self.in_subset(b):
                out.append(Arrow(b, 1))
        return out

    def sample_below(self, x, rng):
        if x.side == 1 and rng.random() < 0.3:
            return Arrow(x.base, 0)
        if x.base == self.base.zero:
            return self.zero
        b = self.base.sample_below(x.base, rng)
        return self._top(b) if rng.random() < 0.5 else Arrow(b, 0)

    def sample_above(self, x, rng):
        if x.side == 0 and self.in_subset(x.base) and rng.random() < 0.3:
            return Arrow(x.base, 1)
        if x.base == self.base.one:
            return self.one
        b = self.base.sample_above(x.base, rng)
        return self._top(b) if rng.random() < 0.5 else Arrow(b, 0)

    def random_point(self, rng):
        b = self.base.random_point(rng)
        return self._top(b) if rng.random() < 0.5 else Arrow(b, 0)

    def format_point(self, x):
        return f"({self.base.format_point(x.base)}, {x.side})"

    def parse_point(self, v):
        if not isinstance(v, (list, tuple)) or len(v) != 2 or v[1] not in (0, 1):
            raise InvalidInput(f"double-arrow point must be [base, side], got {v!r}")
        return self.check(Arrow(self.base.parse_point(v[0]), int(v[1])))


def real_line(a, b) -> TimeScaleLine:
    return TimeScaleLine([(a, b)])


# ----------------------------------------------------------------------------
# order intervals

@dataclass(frozen=True)
class IntervalSpec:
    """Order interval between two points of a line, each end open or closed."""

    lower: object
    upper: object
    lower_open: bool = False
    upper_open: bool = False

    @staticmethod
    def closed(a, b) -> "IntervalSpec":
        return IntervalSpec(a, b, False, False)

    @staticmethod
    def point(c) -> "IntervalSpec":
        return IntervalSpec(c, c, False, False)

    @staticmethod
    def left_open(a, b) -> "IntervalSpec":
        return IntervalSpec(a, b, True, False)

    def format(self, K: CompactLine) -> str:
        lb = "(" if self.lower_open else "["
        rb = ")" if self.upper_open else "]"
        return f"{lb}{K.format_point(self.lower)}, {K.format_point(self.upper)}{rb}"


def validate(K: CompactLine, I: IntervalSpec) -> IntervalSpec:
    K.check(I.lower)
    K.check(I.upper)
    if K.lt(I.upper, I.lower):
        raise EndpointsOutOfOrder(f"{I.format(K)} has upper end below lower end")
    return I


def contains(K: CompactLine, I: IntervalSpec, x) -> bool:
    kx, kl, ku = K.key(x), K.key(I.lower), K.key(I.upper)
    if kx < kl or (kx == kl and I.lower_open):
        return False
    if kx > ku or (kx == ku and I.upper_open):
        return False
    return True


def is_empty(K: CompactLine, I: IntervalSpec) -> bool:
    c = canonicalize(K, I)
    return c.lower == c.upper and (c.lower_open or c.upper_open)


EMPTY_MARK = "empty"


def canonicalize(K: CompactLine, I: IntervalSpec) -> IntervalSpec:
    """Unique spec for the point set of ``I``.

    Lower ends are written open whenever possible, upper ends closed whenever
    possible; empty sets map to (0_K, 0_K).

    >>> K = OrdinalLine("w")
    >>> canonicalize(K, IntervalSpec.closed(Ordinal(3), Ordinal.parse("w"))).format(K)
    '(2, w]'
    """
    validate(K, I)
    lo, lo_open = I.lower, I.lower_open
    hi, hi_open = I.upper, I.upper_open
    if not lo_open and lo != K.zero:
        iso, p = K._left(lo)
        if iso:
            lo, lo_open = p, True
    if hi_open:
        iso, p = K._left(hi)
        if iso:
            if p is None:
                return IntervalSpec(K.zero, K.zero, True, True)
            hi, hi_open = p, False
    # emptiness
    if K.lt(hi, lo) or (lo == hi and (lo_open or hi_open)):
        return IntervalSpec(K.zero, K.zero, True, True)
    if lo_open and not hi_open and lo == hi:
        return IntervalSpec(K.zero, K.zero, True, True)
    return IntervalSpec(lo, hi, lo_open, hi_open)


def is_open_set(K: CompactLine, I: IntervalSpec) -> bool:
    """Openness in the order topology.

    A closed lower end at x ≠ 0_K is harmless exactly when x is left-isolated;
    dually for the upper end.
    """
    validate(K, I)
    if is_empty(K, I):
        return True
    if not I.lower_open and I.lower != K.zero and K.left_dense(I.lower):
        return False
    if not I.upper_open and I.upper != K.one and K.right_dense(I.upper):
        return False
    return True


def intersect(K: CompactLine, I: IntervalSpec, J: IntervalSpec) -> IntervalSpec:
    kl1, kl2 = K.key(I.lower), K.key(J.lower)
    if kl1 > kl2:
        lo, lo_open = I.lower, I.lower_open
    elif kl2 > kl1:
        lo, lo_open = J.lower, J.lower_open
    else:
        lo, lo_open = I.lower, I.lower_open or J.lower_open
    ku1, ku2 = K.key(I.upper), K.key(J.upper)
    if ku1 < ku2:
        hi, hi_open = I.upper, I.upper_open
    elif ku2 < ku1:
        hi, hi_open = J.upper, J.upper_open
    else:
        hi, hi_open = I.upper, I.upper_open or J.upper_open
    if K.key(hi) < K.key(lo):
        return IntervalSpec(K.zero, K.zero, True, True)
    return IntervalSpec(lo, hi, lo_open, hi_open)


def meets(K: CompactLine, I: IntervalSpec, J: IntervalSpec) -> bool:
    return not is_empty(K, intersect(K, I, J))


def hull(K: CompactLine, specs) -> IntervalSpec:
    specs = [s for s in specs if not is_empty(K, s)]
    lo = min(specs, key=lambda s: (K.key(s.lower), s.lower_open))
    hi = max(specs, key=lambda s: (K.key(s.upper), not s.upper_open))
    return IntervalSpec(lo.lower, hi.upper, lo.lower_open, hi.upper_open)


def subset(K: CompactLine, I: IntervalSpec, J: IntervalSpec) -> bool:
    """Whether the point set of I lies inside J."""
    I = canonicalize(K, I)
    if is_empty(K, I):
        return True
    return canonicalize(K, intersect(K, I, J)) == I
