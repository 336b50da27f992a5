"""Exact geometry kernels over rationals.

Intervals, axis boxes, convex polygons, hulls, an exact simplex for convex
hull membership, and exact measures of unions (intervals, boxes, convex
polygons). Nothing in here touches floating point.
"""
from __future__ import annotations

import itertools
from bisect import bisect_right
from dataclasses import dataclass
from typing import Iterable, Sequence

from .exact import Q, Point, vadd, vscale

ZERO = Q(0)
ONE = Q(1)


class GeometryError(ValueError):
    pass


class DimensionError(GeometryError):
    pass


# ---------------------------------------------------------------------------
# value types


@dataclass(frozen=True, order=True)
class Interval:
    lo: Q
    hi: Q

    def __post_init__(self):
        object.__setattr__(self, "lo", Q(self.lo))
        object.__setattr__(self, "hi", Q(self.hi))
        if self.lo > self.hi:
            raise GeometryError(f"interval with lo > hi: [{self.lo}, {self.hi}]")

    @property
    def length(self) -> Q:
        return self.hi - self.lo

    def __add__(self, other: "Interval") -> "Interval":
        return Interval(self.lo + other.lo, self.hi + other.hi)

    def scaled(self, t) -> "Interval":
        return Interval(t * self.lo, t * self.hi)


@dataclass(frozen=True, order=True)
class AxisBox:
    lo: Point
    hi: Point

    def __post_init__(self):
        lo = tuple(Q(x) for x in self.lo)
        hi = tuple(Q(x) for x in self.hi)
        if len(lo) != len(hi) or not lo:
            raise DimensionError("box corners must share a dimension >= 1")
        if any(a > b for a, b in zip(lo, hi)):
            raise GeometryError(f"box with lo > hi: {lo} {hi}")
        object.__setattr__(self, "lo", lo)
        object.__setattr__(self, "hi", hi)

    @property
    def dim(self) -> int:
        return len(self.lo)

    @property
    def volume(self) -> Q:
        v = ONE
        for a, b in zip(self.lo, self.hi):
            v *= b - a
        return v

    @property
    def degenerate(self) -> bool:
        return any(a == b for a, b in zip(self.lo, self.hi))

    def __add__(self, other: "AxisBox") -> "AxisBox":
        return AxisBox(vadd(self.lo, other.lo), vadd(self.hi, other.hi))

    def scaled(self, t) -> "AxisBox":
        return AxisBox(vscale(t, self.lo), vscale(t, self.hi))

    def contains_box(self, other: "AxisBox") -> bool:
        return all(a <= c and d <= b for a, b, c, d in zip(self.lo, self.hi, other.lo, other.hi))

    def contains_point(self, x: Point) -> bool:
        return all(a <= v <= b for a, b, v in zip(self.lo, self.hi, x))

    def corners(self) -> list[Point]:
        return [tuple(c) for c in itertools.product(*({a, b} for a, b in zip(self.lo, self.hi)))]

    def dist2(self, x: Point) -> Q:
        """Squared Euclidean distance from ``x`` to the box."""
        s = ZERO
        for a, b, v in zip(self.lo, self.hi, x):
            if v < a:
                s += (a - v) ** 2
            elif v > b:
                s += (v - b) ** 2
        return s


def cross(o: Point, a: Point, b: Point) -> Q:
    return (a[0] - o[0]) * (b[1] - o[1]) - (a[1] - o[1]) * (b[0] - o[0])


@dataclass(frozen=True)
class Polygon2:
    """Strictly convex polygon, vertices counter-clockwise."""

    vertices: tuple

    def __post_init__(self):
        vs = tuple(tuple(Q(c) for c in v) for v in self.vertices)
        object.__setattr__(self, "vertices", vs)
        h = len(vs)
        if h < 3:
            raise GeometryError("polygon needs at least 3 vertices")
        if any(len(v) != 2 for v in vs):
            raise DimensionError("polygon vertices must be 2-D")
        for i in range(h):
            if cross(vs[i - 1], vs[i], vs[(i + 1) % h]) <= 0:
                raise GeometryError("polygon is not strictly convex and counter-clockwise")
        # every vertex left of every edge rules out multiply wound polygons
        for i in range(h):
            a, b = vs[i], vs[(i + 1) % h]
            for v in vs:
                if cross(a, b, v) < 0:
                    raise GeometryError("polygon is not convex")

    @property
    def area(self) -> Q:
        vs = self.vertices
        s = ZERO
        for i in range(len(vs)):
            x0, y0 = vs[i - 1]
            x1, y1 = vs[i]
            s += x0 * y1 - x1 * y0
        return s / 2

    def contains(self, x: Point) -> bool:
        vs = self.vertices
        return all(cross(vs[i - 1], vs[i], x) >= 0 for i in range(len(vs)))

    def translated(self, t: Point) -> "Polygon2":
        return Polygon2(tuple(vadd(v, t) for v in self.vertices))

    def scaled(self, t) -> "Polygon2":
        if t <= 0:
            raise GeometryError("polygon scale factor must be positive")
        return Polygon2(tuple(vscale(t, v) for v in self.vertices))

    def edges(self):
        vs = self.vertices
        return [(vs[i - 1], vs[i]) for i in range(len(vs))]


@dataclass(frozen=True)
class PolySet2:
    """Finite union of convex polygons; overlaps allowed."""

    parts: tuple

    def __post_init__(self):
        parts = tuple(self.parts)
        for p in parts:
            if not isinstance(p, Polygon2):
                raise GeometryError("PolySet2 parts must be Polygon2")
        object.__setattr__(self, "parts", parts)


@dataclass(frozen=True)
class Hull2:
    """Result of :func:`hull_2d`.

    ``polygon`` is None when the input is collinear; ``endpoints`` then holds
    the extreme points of the segment (equal for a single point).
    """

    polygon: Polygon2 | None
    endpoints: tuple = ()

    @property
    def degenerate(self) -> bool:
        return self.polygon is None


# ---------------------------------------------------------------------------
# hulls


def hull_1d(xs: Iterable) -> Interval:
    xs = [Q(x) for x in xs]
    if not xs:
        raise GeometryError("empty set")
    return Interval(min(xs), max(xs))


def _check_dims(pts: Sequence[Point], n: int | None = None) -> int:
    if not pts:
        raise GeometryError("empty set")
    d = len(pts[0]) if n is None else n
    for p in pts:
        if len(p) != d:
            raise DimensionError(f"expected dimension {d}, got {len(p)}")
    return d


def hull_2d(pts: Sequence[Point]) -> Hull2:
    """Convex hull of 2-D points (Andrew's monotone chain, exact)."""
    if _check_dims(pts) != 2:
        raise DimensionError("hull_2d needs 2-D points")
    ps = sorted(set(tuple(Q(c) for c in p) for p in pts))
    if len(ps) == 1:
        return Hull2(None, (ps[0], ps[0]))
    lower: list = []
    for p in ps:
        while len(lower) >= 2 and cross(lower[-2], lower[-1], p) <= 0:
            lower.pop()
        lower.append(p)
    upper: list = []
    for p in reversed(ps):
        while len(upper) >= 2 and cross(upper[-2], upper[-1], p) <= 0:
            upper.pop()
        upper.append(p)
    hull = lower[:-1] + upper[:-1]
    if len(hull) < 3:
        return Hull2(None, (ps[0], ps[-1]))
    return Hull2(Polygon2(tuple(hull)))


def convex_polygon(pts: Sequence[Point]) -> Polygon2:
    h = hull_2d(pts)
    if h.degenerate:
        raise GeometryError("points are collinear")
    return h.polygon


def minkowski_polygon(pts: Sequence[Point], poly: Polygon2, t=ONE) -> Polygon2:
    """conv(pts) + t * poly, for t > 0."""
    vs = [vscale(t, v) for v in poly.vertices]
    return convex_polygon([vadd(p, v) for p in pts for v in vs])


# ---------------------------------------------------------------------------
# exact linear feasibility


def lp_feasible(A: Sequence[Sequence], b: Sequence):
    """Find x >= 0 with A x = b, or return None.

    Phase-one simplex over Fractions with Bland's rule, so it terminates
    without cycling and the answer is exact.
    """
    m = len(A)
    if m == 0:
        return []
    n = len(A[0])
    rows = []
    for i in range(m):
        r = [Q(v) for v in A[i]]
        rhs = Q(b[i])
        if rhs < 0:
            r = [-v for v in r]
            rhs = -rhs
        art = [ZERO] * m
        art[i] = ONE
        rows.append(r + art + [rhs])
    width = n + m
    cost = [ZERO] * (width + 1)
    for r in rows:
        for j in range(n):
            cost[j] -= r[j]
        cost[width] -= r[width]
    basis = list(range(n, n + m))
    while cost[width] != 0:
        enter = next((j for j in range(width) if cost[j] < 0), None)
        if enter is None:
            return None
        leave = None
        best = None
        for i in range(m):
            a = rows[i][enter]
            if a > 0:
                ratio = rows[i][width] / a
                if best is None or ratio < best or (ratio == best and basis[i] < basis[leave]):
                    best, leave = ratio, i
        if leave is None:  # cannot happen in phase one; objective bounded below by 0
            return None
        piv = rows[leave]
        pv = piv[enter]
        if pv != 1:
            piv = [v / pv for v in piv]
            rows[leave] = piv
        for i in range(m):
            if i != leave:
                f = rows[i][enter]
                if f:
                    ri = rows[i]
                    rows[i] = [ri[j] - f * piv[j] for j in range(width + 1)]
        f = cost[enter]
        cost = [cost[j] - f * piv[j] for j in range(width + 1)]
        basis[leave] = enter
    x = [ZERO] * n
    for i, j in enumerate(basis):
        if j < n:
            x[j] = rows[i][width]
    return x


def hull_membership(x: Point, pts: Sequence[Point]) -> bool:
    """Exact test of x in conv(pts); boundary points count."""
    n = _check_dims(pts)
    if len(x) != n:
        raise DimensionError(f"point has dimension {len(x)}, set has {n}")
    if any(tuple(x) == tuple(p) for p in pts):
        return True
    A = [[p[d] for p in pts] for d in range(n)]
    A.append([ONE] * len(pts))
    return lp_feasible(A, list(x) + [ONE]) is not None


def in_box_plus_hull(x: Point, box: AxisBox, lam, verts: Sequence[Point]) -> bool:
    """Exact test of x in box + lam * conv(verts)."""
    n = box.dim
    m = len(verts)
    lam = Q(lam)
    # x - lam * V mu = lo + s,  s + u = hi - lo,  sum mu = 1
    nv = m + 2 * n
    A = []
    b = []
    for d in range(n):
        row = [lam * v[d] for v in verts] + [ZERO] * (2 * n)
        row[m + d] = ONE
        A.append(row)
        b.append(x[d] - box.lo[d])
    for d in range(n):
        row = [ZERO] * nv
        row[m + d] = ONE
        row[m + n + d] = ONE
        A.append(row)
        b.append(box.hi[d] - box.lo[d])
    A.append([ONE] * m + [ZERO] * (2 * n))
    b.append(ONE)
    return lp_feasible(A, b) is not None


def in_conv_of_boxes(x: Point, boxes: Sequence[AxisBox]) -> bool:
    """Exact test of x in conv(union of boxes) without enumerating corners.

    x = sum_b (mu_b lo_b + w_b) with 0 <= w_b <= mu_b (hi_b - lo_b), sum mu = 1.
    """
    n = boxes[0].dim
    m = len(boxes)
    # variables: mu (m), w (m*n), slack u (m*n)
    nv = m + 2 * m * n
    A = []
    b = []
    for d in range(n):
        row = [ZERO] * nv
        for i, bx in enumerate(boxes):
            row[i] = bx.lo[d]
            row[m + i * n + d] = ONE
        A.append(row)
        b.append(x[d])
    for i, bx in enumerate(boxes):
        for d in range(n):
            row = [ZERO] * nv
            row[i] = -(bx.hi[d] - bx.lo[d])
            row[m + i * n + d] = ONE
            row[m + m * n + i * n + d] = ONE
            A.append(row)
            b.append(ZERO)
    A.append([ONE] * m + [ZERO] * (2 * m * n))
    b.append(ONE)
    return lp_feasible(A, b) is not None


# ---------------------------------------------------------------------------
# measures of unions


def merge_intervals(ivs: Iterable[Interval]) -> list[Interval]:
    """Sorted, pairwise disjoint intervals with the same union."""
    out: list[Interval] = []
    for iv in sorted(ivs):
        if out and iv.lo <= out[-1].hi:
            if iv.hi > out[-1].hi:
                out[-1] = Interval(out[-1].lo, iv.hi)
        else:
            out.append(iv)
    return out


def interval_union_measure(ivs: Iterable[Interval]) -> Q:
    return sum((iv.length for iv in merge_intervals(ivs)), ZERO)


def prune_boxes(boxes: Iterable[AxisBox]) -> list[AxisBox]:
    """Drop zero-volume boxes and boxes contained in another one."""
    bs = sorted(set(b for b in boxes if not b.degenerate), key=lambda b: -b.volume)
    kept: list[AxisBox] = []
    for b in bs:
        if not any(k.contains_box(b) for k in kept):
            kept.append(b)
    return kept


def _ie_volume(boxes: list[AxisBox]) -> Q:
    n = boxes[0].dim
    m = len(boxes)
    total = ZERO
    stack = [(j, boxes[j].lo, boxes[j].hi, 1) for j in range(m - 1, -1, -1)]
    while stack:
        j, lo, hi, sign = stack.pop()
        v = ONE
        for a, c in zip(lo, hi):
            v *= c - a
        total += v if sign > 0 else -v
        for k in range(m - 1, j, -1):
            bk = boxes[k]
            nlo = tuple(max(a, c) for a, c in zip(lo, bk.lo))
            nhi = tuple(min(a, c) for a, c in zip(hi, bk.hi))
            # zero-volume intersections stay zero for every superset
            if all(nlo[d] < nhi[d] for d in range(n)):
                stack.append((k, nlo, nhi, -sign))
    return total


def _sweep_volume(boxes: list[AxisBox]) -> Q:
    n = boxes[0].dim
    memo: dict = {}

    def rec(active: tuple, d: int) -> Q:
        key = (active, d)
        if key in memo:
            return memo[key]
        if d == n - 1:
            res = interval_union_measure(Interval(boxes[i].lo[d], boxes[i].hi[d]) for i in active)
        else:
            xs = sorted({boxes[i].lo[d] for i in active} | {boxes[i].hi[d] for i in active})
            res = ZERO
            for x0, x1 in zip(xs, xs[1:]):
                sub = tuple(i for i in active if boxes[i].lo[d] <= x0 and boxes[i].hi[d] >= x1)
                if sub:
                    res += (x1 - x0) * rec(sub, d + 1)
        memo[key] = res
        return res

    return rec(tuple(range(len(boxes))), 0)


IE_MAX_BOXES = 20
IE_MAX_BOXES_LOW_DIM = 12


def box_union_volume(boxes: Sequence[AxisBox], method: str = "auto") -> Q:
    """Exact Lebesgue measure of a union of axis boxes.

    ``method`` is ``"ie"`` (inclusion-exclusion over intersecting subsets),
    ``"sweep"`` (recursive coordinate-compression sweep) or ``"auto"``.
    """
    boxes = list(boxes)
    if not boxes:
        return ZERO
    n = boxes[0].dim
    for b in boxes:
        if b.dim != n:
            raise DimensionError("boxes of mixed dimension")
    kept = prune_boxes(boxes)
    if not kept:
        return ZERO
    if len(kept) == 1:
        return kept[0].volume
    if method == "auto":
        m = len(kept)
        if m > IE_MAX_BOXES or (n <= 4 and m > IE_MAX_BOXES_LOW_DIM):
            method = "sweep"
        else:
            method = "ie"
    if method == "ie":
        return _ie_volume(kept)
    if method == "sweep":
        return _sweep_volume(kept)
    raise ValueError(f"unknown method {method!r}")


class _Chains:
    """Lower and upper boundary of a convex polygon as functions of x."""

    __slots__ = ("xmin", "xmax", "lx", "ly", "ux", "uy")

    def __init__(self, poly: Polygon2):
        vs = poly.vertices
        h = len(vs)
        xmin = min(v[0] for v in vs)
        xmax = max(v[0] for v in vs)
        left_lo = min(i for i in range(h) if vs[i][0] == xmin and
                      vs[i][1] == min(v[1] for v in vs if v[0] == xmin))
        right_lo = min(i for i in range(h) if vs[i][0] == xmax and
                       vs[i][1] == min(v[1] for v in vs if v[0] == xmax))
        right_hi = min(i for i in range(h) if vs[i][0] == xmax and
                       vs[i][1] == max(v[1] for v in vs if v[0] == xmax))
        left_hi = min(i for i in range(h) if vs[i][0] == xmin and
                      vs[i][1] == max(v[1] for v in vs if v[0] == xmin))
        lower = [vs[left_lo]]
        i = left_lo
        while i != right_lo:
            i = (i + 1) % h
            lower.append(vs[i])
        upper = [vs[right_hi]]
        i = right_hi
        while i != left_hi:
            i = (i + 1) % h
            upper.append(vs[i])
        upper.reverse()
        self.xmin, self.xmax = xmin, xmax
        self.lx = [v[0] for v in lower]
        self.ly = [v[1] for v in lower]
        self.ux = [v[0] for v in upper]
        self.uy = [v[1] for v in upper]

    @staticmethod
    def _at(xs, ys, x0, x1):
        i = bisect_right(xs, x0) - 1
        xa, xb, ya, yb = xs[i], xs[i + 1], ys[i], ys[i + 1]
        slope = (yb - ya) / (xb - xa)
        return ya + slope * (x0 - xa), ya + slope * (x1 - xa)

    def slab(self, x0, x1):
        l0, l1 = self._at(self.lx, self.ly, x0, x1)
        u0, u1 = self._at(self.ux, self.uy, x0, x1)
        return l0, l1, u0, u1


def _union_length(segs) -> Q:
    total = ZERO
    cur_lo = cur_hi = None
    for lo, hi in sorted(segs):
        if cur_hi is None or lo > cur_hi:
            if cur_hi is not None:
                total += cur_hi - cur_lo
            cur_lo, cur_hi = lo, hi
        elif hi > cur_hi:
            cur_hi = hi
    if cur_hi is not None:
        total += cur_hi - cur_lo
    return total


def polyset2_area(s: PolySet2 | Sequence[Polygon2]) -> Q:
    """Exact area of a union of convex polygons.

    Vertical slab decomposition: slabs are cut at every vertex abscissa and
    at every crossing of two boundary edges, so inside each piece the length
    of the vertical cross-section is linear in x and the midpoint rule is
    exact.
    """
    parts = s.parts if isinstance(s, PolySet2) else tuple(s)
    for p in parts:
        if not isinstance(p, Polygon2):
            raise GeometryError("invalid polygon in set")
    if not parts:
        return ZERO
    chains = sorted((_Chains(p) for p in parts), key=lambda c: c.xmin)
    xs = sorted({v[0] for p in parts for v in p.vertices})
    area = ZERO
    start = 0
    for x0, x1 in zip(xs, xs[1:]):
        while start < len(chains) and chains[start].xmax <= x0:
            start += 1
        active = [c for c in chains[start:] if c.xmin <= x0 and c.xmax >= x1]
        if not active:
            continue
        rows = [c.slab(x0, x1) for c in active]
        lines = sorted([(r[0], r[1]) for r in rows] + [(r[2], r[3]) for r in rows])
        ts = {ZERO, ONE}
        ends = [ln[1] for ln in lines]
        if any(a > b for a, b in zip(ends, ends[1:])):
            for i in range(len(lines)):
                a0, a1 = lines[i]
                for j in range(i + 1, len(lines)):
                    b0, b1 = lines[j]
                    if b1 < a1:
                        d0 = b0 - a0
                        ts.add(d0 / (d0 - (b1 - a1)))
        width = x1 - x0
        ts = sorted(ts)
        for ta, tb in zip(ts, ts[1:]):
            tm = (ta + tb) / 2
            segs = [(l0 + (l1 - l0) * tm, u0 + (u1 - u0) * tm) for l0, l1, u0, u1 in rows]
            area += _union_length(segs) * (tb - ta) * width
    return area
