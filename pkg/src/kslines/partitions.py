"""Gauges, tagged partitions, and the greedy Cousin construction."""

from __future__ import annotations

import random
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, NamedTuple

from . import lines as L
from .errors import ExposeZero, JunctionMismatch, NoProgress, NotContinuousDeclared, TagAbsent, UnsupportedLine
from .lines import CompactLine, IntervalSpec


class Component(NamedTuple):
    lo: object
    hi: object
    tag: object


@dataclass
class Gauge:
    """Total map from points to open intervals containing them.

    A rule returning None is read as the whole line.
    """

    line: CompactLine
    rule: Callable
    provenance: str = "composed"

    def __call__(self, x) -> IntervalSpec:
        spec = self.rule(x)
        if spec is None:
            return self.line.whole()
        return spec


def full_gauge(K: CompactLine) -> Gauge:
    return Gauge(K, lambda x: K.whole(), "full")


def uniform_gauge(K: L.TimeScaleLine, r) -> Gauge:
    return Gauge(K, lambda x: K.ball(x, r), f"uniform radius {r}")


@dataclass
class TaggedPartition:
    line: CompactLine
    components: list = field(default_factory=list)

    @property
    def start(self):
        return self.components[0].lo

    @property
    def end(self):
        return self.components[-1].hi

    def __len__(self):
        return len(self.components)

    def __iter__(self):
        return iter(self.components)

    def tags(self):
        return [c.tag for c in self.components]

    def division(self):
        return [self.start] + [c.hi for c in self.components]

    def check(self, whole: bool = True) -> "TaggedPartition":
        K = self.line
        if not self.components:
            raise ValueError("empty partition")
        if whole and (self.start != K.zero or self.end != K.one):
            raise ValueError("partition does not span the line")
        prev = None
        for c in self.components:
            if K.lt(c.hi, c.lo) or not (K.le(c.lo, c.tag) and K.le(c.tag, c.hi)):
                raise ValueError(f"malformed component {c!r}")
            if prev is not None and prev.hi != c.lo:
                raise ValueError("consecutive components do not share endpoints")
            prev = c
        return self

    def format(self):
        K = self.line
        return [[K.format_point(c.lo), K.format_point(c.hi), K.format_point(c.tag)] for c in self.components]


@dataclass
class TaggedSystem:
    line: CompactLine
    components: list = field(default_factory=list)

    def __iter__(self):
        return iter(self.components)

    def __len__(self):
        return len(self.components)

    def check(self) -> "TaggedSystem":
        K = self.line
        for c in self.components:
            if K.lt(c.hi, c.lo) or not (K.le(c.lo, c.tag) and K.le(c.tag, c.hi)):
                raise ValueError(f"malformed component {c!r}")
        for a, b in zip(self.components, self.components[1:]):
            if K.lt(b.lo, a.hi):
                raise ValueError("system components overlap")
        return self


def half_open_inside(K: CompactLine, lo, hi, spec: IntervalSpec) -> bool:
    """Whether (lo, hi] ⊆ spec."""
    if K.le(hi, lo):
        return True
    if not L.contains(K, spec, hi):
        return False
    kl, ks = K.key(lo), K.key(spec.lower)
    if ks < kl:
        return True
    if ks == kl:
        return True
    iso, s = K._right(lo)
    if not iso:
        return False
    # (lo, hi] starts at lo⁺
    return L.contains(K, spec, s)


def is_fine(K: CompactLine, P, delta: Gauge) -> bool:
    """δ-fineness: (x_{i-1}, x_i] ⊆ δ(t_i); degenerate components always pass."""
    for c in P:
        if c.lo == c.hi:
            continue
        if not half_open_inside(K, c.lo, c.hi, delta(c.tag)):
            return False
    return True


def _reach(K: CompactLine, t, spec: IntervalSpec):
    """Largest z ≥ t with (t, z] ⊆ spec, assuming t ∈ spec."""
    hi = spec.upper
    if not spec.upper_open:
        return hi
    iso, p = K._left(hi)
    if iso:
        return p if p is not None else t
    return K.approach(t, hi)


def cousin_partition(K: CompactLine, delta: Gauge, start=None, end=None, max_steps: int = 1_000_000) -> TaggedPartition:
    """Greedy left-to-right δ-fine partition of [start, end] (default the whole line).

    At a right-isolated point the walk steps to the successor, tagging it,
    unless a left-dense point further right already covers the gap. At a
    right-dense point it advances as far as δ(y) allows with tag y, or
    further with the tag at the upper end of δ(y) when that point's gauge
    reaches back to y.
    """
    a = K.zero if start is None else start
    b = K.one if end is None else end
    kb = K.key(b)
    comps = []
    y = a
    if a == b:
        return TaggedPartition(K, [Component(a, a, a)])

    def spec_at(x):
        s = delta(x)
        if not L.contains(K, s, x):
            raise NoProgress(f"gauge value at {K.format_point(x)} does not contain the point")
        return s

    def cap(z):
        return b if K.key(z) > kb else z

    steps = 0
    while K.key(y) < kb:
        steps += 1
        if steps > max_steps:
            raise NoProgress(f"no fine partition found within {max_steps} steps (stalled near {K.format_point(y)})")
        iso, s = K._right(y)
        if iso:
            jumped = False
            for lam in K.limit_ceilings(y):
                if K.key(lam) > kb:
                    continue
                sl = spec_at(lam)
                if half_open_inside(K, y, lam, sl):
                    z = cap(_reach(K, lam, sl))
                    comps.append(Component(y, z, lam))
                    y = z
                    jumped = True
                    break
            if jumped:
                continue
            if s is None:
                raise NoProgress("walk passed the right end of the line")
            spec_at(s)
            comps.append(Component(y, s, s))
            y = s
            continue
        sy = spec_at(y)
        za = cap(_reach(K, y, sy))
        best = Component(y, za, y)
        u = sy.upper
        if K.key(u) <= kb and u != y:
            su = spec_at(u)
            if half_open_inside(K, y, u, su):
                zb = cap(_reach(K, u, su))
                if K.key(zb) > K.key(za):
                    best = Component(y, zb, u)
        if best.hi == y:
            raise NoProgress(f"gauge at {K.format_point(y)} admits no step")
        comps.append(best)
        y = best.hi
    return TaggedPartition(K, comps)


def refine_and_expose(K: CompactLine, delta: Gauge, eta: Gauge | None = None, C=()) -> Gauge:
    """Pointwise intersection with η, cut so each c ∈ C must appear as a tag."""
    C = list(C)
    if any(c == K.zero for c in C):
        raise ExposeZero("0_K cannot be exposed")
    if eta is None and not C:
        return delta
    keys = [(K.key(c), c) for c in C]

    def rule(x):
        s = delta(x)
        if eta is not None:
            s = L.intersect(K, s, eta(x))
        kx = K.key(x)
        for kc, c in keys:
            if kx < kc:
                s = L.intersect(K, s, IntervalSpec(K.zero, c, False, True))
            elif kx > kc:
                s = L.intersect(K, s, IntervalSpec(c, K.one, True, False))
        return s

    return Gauge(K, rule, "composed")


def merge_partitions(parts) -> TaggedPartition:
    parts = list(parts)
    if not parts:
        raise ValueError("nothing to merge")
    K = parts[0].line
    comps = list(parts[0].components)
    for p in parts[1:]:
        if comps[-1].hi != p.start:
            raise JunctionMismatch(f"{K.format_point(comps[-1].hi)} != {K.format_point(p.start)}")
        comps.extend(p.components)
    return TaggedPartition(K, comps)


def split_at_tags(P: TaggedPartition, C) -> TaggedPartition:
    C = list(C)
    tags = set(P.tags())
    for c in C:
        if c not in tags:
            raise TagAbsent(f"{P.line.format_point(c)} is not a tag")
    Cs = set(C)
    out = []
    for comp in P:
        if comp.tag in Cs:
            out.append(Component(comp.lo, comp.tag, comp.tag))
            out.append(Component(comp.tag, comp.hi, comp.tag))
        else:
            out.append(comp)
    return TaggedPartition(P.line, out)


def restrict_gauge(delta: Gauge, lo, hi) -> Gauge:
    K = delta.line
    box = IntervalSpec(lo, hi, False, False)
    return Gauge(K, lambda x: L.intersect(K, delta(x), box), delta.provenance)


# ----------------------------------------------------------------------------
# random gauges, used by tests and the property suite

def random_neighbourhood(K: CompactLine, x, rng: random.Random) -> IntervalSpec:
    if x == K.zero:
        lo, lo_open = K.zero, False
    elif not K.left_dense(x) and rng.random() < 0.4:
        lo, lo_open = x, False
    else:
        lo, lo_open = K.sample_below(x, rng), True
    if x == K.one:
        hi, hi_open = K.one, False
    elif not K.right_dense(x) and rng.random() < 0.4:
        hi, hi_open = x, False
    else:
        hi, hi_open = K.sample_above(x, rng), True
    return IntervalSpec(lo, hi, lo_open, hi_open)


def random_gauge(K: CompactLine, seed) -> Gauge:
    """Deterministic pseudo-random gauge: the value at x depends only on (seed, x)."""

    def rule(x):
        return random_neighbourhood(K, x, random.Random(f"{seed}|{K.format_point(x)}"))

    return Gauge(K, rule, f"random seed {seed}")


# ----------------------------------------------------------------------------
# uniform-continuity divisions

def uniform_division(K: CompactLine, f, eps) -> list:
    """Division whose cells end at a left-isolated point or have oscillation of f below ε."""
    from .functions import BlackBox, OrdinalSeries, PiecewisePoly, Table

    if not getattr(f, "continuous", True):
        raise NotContinuousDeclared("integrand is not declared continuous")
    if isinstance(f, Table) or K.points() is not None:
        if f.oscillation(K.zero, K.one) < eps:
            return [K.zero, K.one]
        return list(K.points())
    if isinstance(f, PiecewisePoly):
        if f.oscillation(K.zero, K.one) < eps:
            return [K.zero, K.one]
        div = [K.zero]
        for a, b in K.components:
            if a != K.zero:
                div.append(a)
            if a == b:
                continue
            n = 1
            while True:
                h = (b - a) / n
                if all(f.oscillation(a + i * h, a + (i + 1) * h) < eps for i in range(n)):
                    break
                n *= 2
            div.extend(a + i * h for i in range(1, n + 1))
        return div
    if isinstance(f, OrdinalSeries):
        N = 0
        while f.tail_oscillation(N) >= eps:
            N = 2 * N + 1
        return [L.Ordinal(i) for i in range(N + 1)] + [K.one]
    if isinstance(f, BlackBox) and f.lipschitz is not None and isinstance(K, L.TimeScaleLine):
        div = [K.zero]
        for a, b in K.components:
            if a != K.zero:
                div.append(a)
            if a == b:
                continue
            n = max(1, int(f.lipschitz * (b - a) / eps) + 1)
            h = (b - a) / n
            div.extend(a + i * h for i in range(1, n + 1))
        return div
    raise UnsupportedLine("uniform division needs a structured integrand")
