"""Finitely described compact sets and their Minkowski algebra."""
from __future__ import annotations

import math
import random
from dataclasses import dataclass, field
from typing import Iterable

from .exact import Q, Point, vadd, vscale
from .geom import (AxisBox, DimensionError, GeometryError, Interval, box_union_volume,
                   interval_union_measure, merge_intervals)

POINTS = "points"
BOXES = "boxes"
INTERVALS = "intervals"
REPS = (POINTS, BOXES, INTERVALS)

#: boxes are checked pairwise for containment only below this count
CONTAINMENT_PRUNE_LIMIT = 2000


class BudgetExceeded(RuntimeError):
    def __init__(self, count: int, budget: int):
        super().__init__(f"{count} boxes exceeds the budget of {budget}")
        self.count = count
        self.budget = budget


def _drop_contained(boxes: list[AxisBox]) -> list[AxisBox]:
    if len(boxes) > CONTAINMENT_PRUNE_LIMIT:
        return boxes
    by_size = sorted(boxes, key=lambda b: (-b.volume, b))
    kept: list[AxisBox] = []
    for b in by_size:
        if not any(k.contains_box(b) for k in kept):
            kept.append(b)
    return sorted(kept)


@dataclass(frozen=True)
class CompactSet:
    """A compact subset of R^dim: finite point set, box union or interval union.

    ``items`` is kept in a normal form (sorted, deduplicated; intervals merged;
    boxes contained in another box dropped). Equal ``items`` therefore means
    equal sets; the converse only holds for points and intervals, see
    :func:`same_set`.

    ``hull_volume`` optionally carries the exact volume of the convex hull
    when it is known analytically (the cross construction and its averages).
    """

    dim: int
    rep: str
    items: tuple
    hull_volume: Q | None = field(default=None, compare=False)

    def __post_init__(self):
        if self.rep not in REPS:
            raise ValueError(f"unknown representation {self.rep!r}")
        if self.dim < 1:
            raise DimensionError("dimension must be >= 1")
        items = list(self.items)
        if not items:
            raise GeometryError("empty set")
        if self.rep == POINTS:
            items = [tuple(Q(c) for c in p) for p in items]
            if any(len(p) != self.dim for p in items):
                raise DimensionError("point dimension mismatch")
            items = sorted(set(items))
        elif self.rep == INTERVALS:
            if self.dim != 1:
                raise DimensionError("interval sets live in dimension 1")
            items = merge_intervals(iv if isinstance(iv, Interval) else Interval(*iv)
                                    for iv in items)
        else:
            items = [b if isinstance(b, AxisBox) else AxisBox(*b) for b in items]
            if any(b.dim != self.dim for b in items):
                raise DimensionError("box dimension mismatch")
            items = _drop_contained(sorted(set(items)))
        object.__setattr__(self, "items", tuple(items))

    def __len__(self) -> int:
        return len(self.items)

    def as_boxes(self) -> list[AxisBox]:
        if self.rep == BOXES:
            return list(self.items)
        if self.rep == POINTS:
            return [AxisBox(p, p) for p in self.items]
        return [AxisBox((iv.lo,), (iv.hi,)) for iv in self.items]

    def as_intervals(self) -> list[Interval]:
        if self.dim != 1:
            raise DimensionError("interval view needs dimension 1")
        if self.rep == INTERVALS:
            return list(self.items)
        if self.rep == POINTS:
            return [Interval(p[0], p[0]) for p in self.items]
        return [Interval(b.lo[0], b.hi[0]) for b in self.items]

    def hull_points(self) -> list[Point]:
        """A finite set with the same convex hull."""
        if self.rep == POINTS:
            return list(self.items)
        if self.rep == INTERVALS:
            return sorted({(iv.lo,) for iv in self.items} | {(iv.hi,) for iv in self.items})
        return sorted({c for b in self.items for c in b.corners()})

    def volume(self) -> Q:
        """Exact Lebesgue measure of the set in R^dim."""
        if self.rep == POINTS:
            return Q(0)
        if self.dim == 1:
            return interval_union_measure(self.as_intervals())
        return box_union_volume(self.items)


def points(pts: Iterable, dim: int | None = None) -> CompactSet:
    pts = [tuple(p) if isinstance(p, (tuple, list)) else (p,) for p in pts]
    return CompactSet(dim or len(pts[0]), POINTS, tuple(pts))


def boxes(bxs: Iterable) -> CompactSet:
    bxs = [b if isinstance(b, AxisBox) else AxisBox(*b) for b in bxs]
    return CompactSet(bxs[0].dim, BOXES, tuple(bxs))


def intervals(ivs: Iterable) -> CompactSet:
    return CompactSet(1, INTERVALS, tuple(ivs))


def _common_rep(a: CompactSet, b: CompactSet) -> str:
    if a.rep == b.rep:
        return a.rep
    if a.dim == 1 and INTERVALS in (a.rep, b.rep):
        return INTERVALS
    return BOXES


def minkowski_sum(a: CompactSet, b: CompactSet, budget: int | None = None) -> CompactSet:
    if a.dim != b.dim:
        raise DimensionError(f"cannot add sets of dimension {a.dim} and {b.dim}")
    rep = _common_rep(a, b)
    if rep == POINTS:
        items = {vadd(p, q) for p in a.items for q in b.items}
    elif rep == INTERVALS:
        items = [x + y for x in a.as_intervals() for y in b.as_intervals()]
    else:
        items = {x + y for x in a.as_boxes() for y in b.as_boxes()}
    if budget is not None and rep == BOXES and len(items) > budget:
        raise BudgetExceeded(len(items), budget)
    return CompactSet(a.dim, rep, tuple(items))


def scale(a: CompactSet, t) -> CompactSet:
    t = Q(t)
    if t <= 0:
        raise ValueError("scale factor must be positive")
    if a.rep == POINTS:
        items = tuple(vscale(t, p) for p in a.items)
    elif a.rep == INTERVALS:
        items = tuple(iv.scaled(t) for iv in a.items)
    else:
        items = tuple(bx.scaled(t) for bx in a.items)
    hv = None if a.hull_volume is None else a.hull_volume * t ** a.dim
    return CompactSet(a.dim, a.rep, items, hv)


def translate(a: CompactSet, x: Point) -> CompactSet:
    shift = CompactSet(a.dim, POINTS, (tuple(x),))
    out = minkowski_sum(a, shift)
    return CompactSet(out.dim, out.rep, out.items, a.hull_volume)


def sum_power(a: CompactSet, k: int, budget: int | None = None) -> CompactSet:
    """A + ... + A (k times)."""
    if k < 1:
        raise ValueError("k must be >= 1")
    s = a
    for _ in range(k - 1):
        s = minkowski_sum(s, a, budget)
    return s


def average(a: CompactSet, k: int, budget: int | None = None) -> CompactSet:
    """The Minkowski average A(k) = (A + ... + A) / k."""
    if k == 1:
        return a
    s = scale(sum_power(a, k, budget), Q(1, k))
    # conv(A(k)) = conv(A)
    return CompactSet(s.dim, s.rep, s.items, a.hull_volume)


def same_set(a: CompactSet, b: CompactSet) -> bool:
    """Set equality.

    Exact for points and intervals. For box unions it is measure-theoretic
    equality (symmetric difference of volume zero) plus a containment check
    on every box corner and centre.
    """
    if a.dim != b.dim:
        return False
    if a.dim == 1 and a.rep != POINTS and b.rep != POINTS:
        return merge_intervals(a.as_intervals()) == merge_intervals(b.as_intervals())
    if a.rep == POINTS or b.rep == POINTS:
        if a.rep == b.rep:
            return a.items == b.items
        # a finite set equals a box union only if every box is a point
        bxs = a.as_boxes() + b.as_boxes()
        if any(bx.lo != bx.hi for bx in bxs):
            return False
        return set(p.lo for p in a.as_boxes()) == set(p.lo for p in b.as_boxes())
    if a.items == b.items:
        return True
    va, vb = a.volume(), b.volume()
    if va != vb or box_union_volume(list(a.items) + list(b.items)) != va:
        return False
    for x, y in ((a, b), (b, a)):
        for bx in x.items:
            probes = bx.corners() if bx.dim <= 6 else [bx.lo, bx.hi]
            probes.append(vscale(Q(1, 2), vadd(bx.lo, bx.hi)))
            for p in probes:
                if not any(c.contains_point(p) for c in y.items):
                    return False
    return True


# ---------------------------------------------------------------------------
# constructions


@dataclass(frozen=True)
class CrossSpec:
    """Two boxes in complementary coordinate subspaces.

    The first lives in the span of the first ``p`` coordinates with side
    ``side1``, the second in the span of the remaining ``n - p`` with side
    ``side2``.
    """

    n: int
    p: int
    side1: Q = Q(1)
    side2: Q = Q(1)

    def __post_init__(self):
        if self.n < 2 or not 1 <= self.p <= self.n - 1:
            raise ValueError(f"need 1 <= p <= n-1, got n={self.n}, p={self.p}")
        object.__setattr__(self, "side1", Q(self.side1))
        object.__setattr__(self, "side2", Q(self.side2))
        if self.side1 <= 0 or self.side2 <= 0:
            raise ValueError("sides must be positive")


def cross_hull_volume(spec: CrossSpec) -> Q:
    # conv(K x 0 u 0 x L) for K, L containing the origin: |K||L| p! q! / n!
    p, q = spec.p, spec.n - spec.p
    return (spec.side1 ** p * spec.side2 ** q
            * Q(math.factorial(p) * math.factorial(q), math.factorial(spec.n)))


def cross_build(spec: CrossSpec) -> CompactSet:
    n, p = spec.n, spec.p
    zero = Q(0)
    b1 = AxisBox((zero,) * n, (spec.side1,) * p + (zero,) * (n - p))
    b2 = AxisBox((zero,) * n, (zero,) * p + (spec.side2,) * (n - p))
    return CompactSet(n, BOXES, (b1, b2), cross_hull_volume(spec))


GALLERY = ("scaled_segment_pair", "finite_grid", "three_point")


def gallery(name: str, param, dim: int = 1) -> CompactSet:
    """Generators for the incomparability examples.

    * ``scaled_segment_pair(t)``, t > 0: the two-point set ``{0, t}``; with
      ``dim=2`` it is embedded on the first axis as ``{(0,0), (t,0)}``.
    * ``finite_grid(h)``, h = 1/N: all points ``(i h, j h)`` in ``[0,1]^2``.
    * ``three_point(eps)``, 0 < eps <= 1: ``{(0,0), (eps,0), (0,1)}``.
    """
    t = Q(param)
    if name == "scaled_segment_pair":
        if t <= 0:
            raise ValueError("scaled_segment_pair needs t > 0")
        if dim == 1:
            return points([(0,), (t,)])
        return points([(0,) * dim, (t,) + (0,) * (dim - 1)])
    if name == "finite_grid":
        if t <= 0 or t > 1 or t.numerator != 1:
            raise ValueError("finite_grid needs h = 1/N")
        N = t.denominator
        return points([(i * t, j * t) for i in range(N + 1) for j in range(N + 1)])
    if name == "three_point":
        if not 0 < t <= 1:
            raise ValueError("three_point needs 0 < eps <= 1")
        return points([(0, 0), (t, 0), (0, 1)])
    raise ValueError(f"unknown gallery family {name!r}; choose from {', '.join(GALLERY)}")


#: coordinates of random sets are p/q with q in 1..MAX_DENOM
MAX_DENOM = 64
#: coordinates (and box lower corners) lie in [0, COORD_RANGE]
COORD_RANGE = 4
#: box sides and interval lengths lie in [0, MAX_EXTENT]
MAX_EXTENT = 2


def _rand_rational(rng: random.Random, upper: int, positive: bool = False) -> Q:
    q = rng.randint(1, MAX_DENOM)
    lo = 1 if positive else 0
    return Q(rng.randint(lo, upper * q), q)


def random_set(dim: int, rep: str, size: int, seed: int) -> CompactSet:
    """Deterministic random set drawn from ``random.Random(seed)``.

    Every coordinate is p/q with 1 <= q <= 64 and value in [0, 4]. Box sides
    lie in (0, 2]; interval lengths in [0, 2] (points allowed).
    """
    if dim < 1 or size < 1:
        raise ValueError("dim and size must be >= 1")
    rng = random.Random(seed)
    if rep == POINTS:
        items = [tuple(_rand_rational(rng, COORD_RANGE) for _ in range(dim)) for _ in range(size)]
    elif rep == BOXES:
        items = []
        for _ in range(size):
            lo = tuple(_rand_rational(rng, COORD_RANGE) for _ in range(dim))
            side = tuple(_rand_rational(rng, MAX_EXTENT, positive=True) for _ in range(dim))
            items.append(AxisBox(lo, vadd(lo, side)))
    elif rep == INTERVALS:
        if dim != 1:
            raise DimensionError("interval sets live in dimension 1")
        items = []
        for _ in range(size):
            lo = _rand_rational(rng, COORD_RANGE)
            items.append(Interval(lo, lo + _rand_rational(rng, MAX_EXTENT)))
    else:
        raise ValueError(f"unknown representation {rep!r}")
    return CompactSet(dim, rep, tuple(items))


def sub_seed(seed: int, index: int) -> int:
    """Per-trial seed derived deterministically from (seed, index)."""
    return (seed * 1_000_003 + index * 7919 + 0x9E3779B9) % (1 << 64)
