"""Non-convexity measures: volume deficit, Hausdorff distance to the hull and
Schneider's index, each returned with a certificate.

Strategy by dimension:

* n = 1: closed forms from the gaps of the union, exact.
* n = 2: volume deficit exact; Hausdorff distance exact for point sets
  (reported through its exact square); Schneider's index by bisection with an
  exact area-equality convexity test.
* n >= 3 (and Hausdorff distance of 2-D box unions): rigorous one-sided bounds
  from exactly certified sample points, the other side from a covering grid
  (Hausdorff) or flagged as heuristic (Schneider). Volumes of hulls are
  Monte-Carlo estimates unless known analytically.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .exact import (Q, Point, dist2, exact_sqrt, fmt, round_to_grid, sqrt_enclosure, vadd,
                    vscale, vsub)
from .geom import (AxisBox, Hull2, Interval, Polygon2, hull_2d, hull_membership,
                   in_box_plus_hull, in_conv_of_boxes, interval_union_measure, lp_feasible,
                   merge_intervals, minkowski_polygon, polyset2_area)
from .sets import BOXES, INTERVALS, POINTS, CompactSet, scale

DEFAULT_TOL = Q(1, 2 ** 20)
SQRT_BITS = 20

DELTA, HAUSDORFF, SCHNEIDER = "delta", "hausdorff", "schneider"


class UnsupportedMeasure(ValueError):
    """The (representation, dimension, measure) combination is not supported."""


@dataclass
class Certificate:
    kind: str  # exact_1d | exact_2d | exact_analytic | bisection_interval | monte_carlo
    seed: int | None = None
    samples: int | None = None
    witness: Point | None = None
    heuristic_hi: bool = False
    probes: list = field(default_factory=list)
    note: str | None = None

    def to_dict(self) -> dict:
        d: dict = {"kind": self.kind}
        if self.seed is not None:
            d["seed"] = self.seed
        if self.samples is not None:
            d["samples"] = self.samples
        if self.witness is not None:
            d["witness"] = [fmt(c) for c in self.witness]
        if self.heuristic_hi:
            d["heuristic_hi"] = True
        if self.probes:
            d["probes"] = [[fmt(lam), verdict] for lam, verdict in self.probes]
        if self.note:
            d["note"] = self.note
        return d


@dataclass
class MeasureResult:
    kind: str
    value_lo: Q
    value_hi: Q
    certificate: Certificate
    #: exact value of d(A)^2 for Hausdorff results, when known
    square: Q | None = None
    #: lower/upper bounds on d(A)^2 for Hausdorff results
    square_lo: Q | None = None
    square_hi: Q | None = None

    def __post_init__(self):
        if self.value_lo > self.value_hi:
            raise ValueError("value_lo > value_hi")

    @property
    def exact(self) -> bool:
        return self.value_lo == self.value_hi

    @property
    def value(self) -> Q:
        if not self.exact:
            raise ValueError(f"{self.kind} is only known within [{self.value_lo}, {self.value_hi}]")
        return self.value_lo

    def to_dict(self) -> dict:
        d = {
            "kind": self.kind,
            "value_lo": fmt(self.value_lo),
            "value_hi": fmt(self.value_hi),
            "exact": self.exact,
            "certificate": self.certificate.to_dict(),
        }
        if self.square is not None:
            d["square"] = fmt(self.square)
        elif self.square_lo is not None:
            d["square_lo"] = fmt(self.square_lo)
            d["square_hi"] = fmt(self.square_hi)
        return d


def _exact(kind: str, v: Q, cert: str, **kw) -> MeasureResult:
    return MeasureResult(kind, v, v, Certificate(cert), **kw)


def _hausdorff_from_square(sq: Q, cert: Certificate) -> MeasureResult:
    lo, hi = sqrt_enclosure(sq, SQRT_BITS)
    return MeasureResult(HAUSDORFF, lo, hi, cert, square=sq, square_lo=sq, square_hi=sq)


# ---------------------------------------------------------------------------
# one dimension


@dataclass(frozen=True)
class Gaps1D:
    components: tuple  # merged Intervals
    gaps: tuple  # Fractions, left to right
    diameter: Q


def gaps_1d(a: CompactSet) -> Gaps1D:
    comps = merge_intervals(a.as_intervals())
    gaps = tuple(nxt.lo - cur.hi for cur, nxt in zip(comps, comps[1:]))
    return Gaps1D(tuple(comps), gaps, comps[-1].hi - comps[0].lo)


def c_1d(a: CompactSet) -> Q:
    g = gaps_1d(a)
    if not g.gaps:
        return Q(0)
    return max(g.gaps) / g.diameter


def d_1d(a: CompactSet) -> Q:
    g = gaps_1d(a)
    return max(g.gaps) / 2 if g.gaps else Q(0)


def delta_1d(a: CompactSet) -> Q:
    ivs = a.as_intervals()
    hull = Interval(min(iv.lo for iv in ivs), max(iv.hi for iv in ivs))
    return hull.length - interval_union_measure(ivs)


def convexity_deficit_1d(a: CompactSet, lam) -> Q:
    """(1+lam)|conv A| - |A + lam conv A|; zero exactly when A + lam conv A is convex."""
    lam = Q(lam)
    ivs = a.as_intervals()
    m = min(iv.lo for iv in ivs)
    M = max(iv.hi for iv in ivs)
    grown = [Interval(iv.lo + lam * m, iv.hi + lam * M) for iv in ivs]
    return (1 + lam) * (M - m) - interval_union_measure(grown)


def schneider_c_1d_bisection(a: CompactSet, tol=DEFAULT_TOL, max_rounds: int = 8) -> MeasureResult:
    """Schneider's index of a 1-D set by bisection on the exact convexity test.

    Independent of the gap formula: it only evaluates the deficit function
    lam -> (1+lam)|conv A| - |A + lam conv A|, which is convex, piecewise
    linear and vanishes exactly on [c, inf). After bisection the value is
    recovered exactly by extrapolating the last linear piece; the result is
    accepted only if the deficit is zero there and provably affine between
    the last positive probe and it.
    """
    tol = Q(tol)
    f = lambda lam: convexity_deficit_1d(a, lam)  # noqa: E731
    if f(0) == 0:
        return _exact(SCHNEIDER, Q(0), "exact_1d")
    lo, hi = Q(0), Q(1)
    if f(hi) != 0:
        raise ArithmeticError("1-D set not convexified at lambda = 1")
    probes = [(lo, False), (hi, True)]
    positives = [(lo, f(lo))]
    width = tol
    for _ in range(max_rounds):
        while hi - lo > width:
            mid = (lo + hi) / 2
            fm = f(mid)
            probes.append((mid, fm == 0))
            if fm == 0:
                hi = mid
            else:
                lo = mid
                positives.append((mid, fm))
        if len(positives) >= 2:
            (x1, f1), (x2, f2) = positives[-2], positives[-1]
            if f1 != f2:
                cand = x2 + f2 * (x2 - x1) / (f1 - f2)
                fc = f(cand)
                midpt = (x1 + cand) / 2
                if fc == 0 and cand > x2 and f(midpt) == f1 / 2:
                    cert = Certificate("exact_1d", probes=probes,
                                       note="bisection bracket refined by verified secant")
                    return MeasureResult(SCHNEIDER, cand, cand, cert)
        width /= 2 ** 8
    cert = Certificate("bisection_interval", probes=probes)
    return MeasureResult(SCHNEIDER, lo, hi, cert)


# ---------------------------------------------------------------------------
# two dimensions


def _hull2(a: CompactSet) -> Hull2:
    return hull_2d(a.hull_points())


def _collinear_to_1d(a: CompactSet, hull: Hull2):
    """Map a set lying on a line to 1-D parameters s in [0, 1].

    Returns (set in 1-D, squared length of the segment).
    """
    p, q = hull.endpoints
    d = vsub(q, p)
    L2 = d[0] ** 2 + d[1] ** 2
    if L2 == 0:
        return CompactSet(1, POINTS, ((Q(0),),)), Q(0)

    def s(x):
        v = vsub(x, p)
        return (v[0] * d[0] + v[1] * d[1]) / L2

    if a.rep == POINTS:
        return CompactSet(1, POINTS, tuple((s(x),) for x in a.items)), L2
    ivs = []
    for bx in a.items:
        ts = [s(c) for c in bx.corners()]
        ivs.append(Interval(min(ts), max(ts)))
    return CompactSet(1, INTERVALS, tuple(ivs)), L2


def _convex_2d(a: CompactSet, K: Polygon2) -> bool:
    return a.rep == BOXES and a.volume() == K.area


class _Nearest:
    """Exact nearest-site squared distance with a float prefilter.

    Float squared distances only select which sites are compared exactly;
    the margin is far above double rounding for coordinates of the sizes
    used here, and the minimum is always taken over exact values.
    """

    def __init__(self, sites: Sequence[Point]):
        self.sites = list(sites)
        self.arr = np.array([[float(c) for c in s] for s in self.sites])
        self.scale = 1.0 + float(np.max(np.abs(self.arr))) ** 2 if len(self.sites) else 1.0

    def d2(self, x: Point) -> Q:
        xf = np.array([float(c) for c in x])
        fd = np.sum((self.arr - xf) ** 2, axis=1)
        m = float(fd.min())
        margin = 1e-9 * (self.scale + float(np.dot(xf, xf)))
        idx = np.nonzero(fd <= m + margin)[0]
        return min(dist2(x, self.sites[i]) for i in idx)

    def within(self, x: Point, r2: Q) -> list[int]:
        """Indices of sites whose float distance might be below sqrt(r2)."""
        xf = np.array([float(c) for c in x])
        fd = np.sum((self.arr - xf) ** 2, axis=1)
        margin = 1e-9 * (self.scale + float(np.dot(xf, xf)))
        return list(np.nonzero(fd <= float(r2) + margin)[0])


def _circumcenter(a: Point, b: Point, c: Point):
    ax, ay = a
    bx, by = b
    cx, cy = c
    den = 2 * (ax * (by - cy) + bx * (cy - ay) + cx * (ay - by))
    if den == 0:
        return None
    a2, b2, c2 = ax * ax + ay * ay, bx * bx + by * by, cx * cx + cy * cy
    ux = (a2 * (by - cy) + b2 * (cy - ay) + c2 * (ay - by)) / den
    uy = (a2 * (cx - bx) + b2 * (ax - cx) + c2 * (bx - ax)) / den
    return (ux, uy)


def _bisector_on_segment(p: Point, q: Point, s0: Point, s1: Point):
    """Point of segment s0-s1 equidistant from p and q, if unique."""
    # |x-p|^2 = |x-q|^2  <=>  2 x.(q-p) = |q|^2 - |p|^2 ; x = s0 + t (s1-s0)
    dx, dy = q[0] - p[0], q[1] - p[1]
    rhs = (q[0] ** 2 + q[1] ** 2 - p[0] ** 2 - p[1] ** 2) / 2
    ex, ey = s1[0] - s0[0], s1[1] - s0[1]
    den = ex * dx + ey * dy
    if den == 0:
        return None
    t = (rhs - s0[0] * dx - s0[1] * dy) / den
    if not 0 <= t <= 1:
        return None
    return (s0[0] + t * ex, s0[1] + t * ey)


def _delaunay_candidates(sites: list[Point], nearest: _Nearest):
    """Triangles and edges of a Delaunay triangulation, exactly verified.

    Returns None if the float triangulation fails the exact empty-circle test.
    """
    from scipy.spatial import Delaunay, QhullError

    try:
        tri = Delaunay(nearest.arr)
    except QhullError:
        return None
    if len(tri.coplanar):
        return None
    triangles, edges = [], set()
    for simplex in tri.simplices:
        i, j, k = (int(v) for v in simplex)
        cc = _circumcenter(sites[i], sites[j], sites[k])
        if cc is None:
            return None
        r2 = dist2(cc, sites[i])
        for s in nearest.within(cc, r2):
            if dist2(cc, sites[s]) < r2:
                return None
        triangles.append(cc)
        edges.update({(min(i, j), max(i, j)), (min(j, k), max(j, k)), (min(i, k), max(i, k))})
    return triangles, sorted(edges)


def _d2_points_2d(sites: list[Point], K: Polygon2) -> tuple[Q, Point, str]:
    """Exact max over conv(sites) of the squared distance to the nearest site."""
    nearest = _Nearest(sites)
    found = _delaunay_candidates(sites, nearest)
    if found is not None:
        centers, pairs = found
        note = "voronoi candidates from exactly verified delaunay triangulation"
    else:
        m = len(sites)
        if m > 80:
            raise UnsupportedMeasure("degenerate point set too large for brute-force candidates")
        centers = [c for i in range(m) for j in range(i + 1, m) for k in range(j + 1, m)
                   if (c := _circumcenter(sites[i], sites[j], sites[k])) is not None]
        pairs = [(i, j) for i in range(m) for j in range(i + 1, m)]
        note = "all triples and pairs"
    cands = set(K.vertices)
    cands.update(c for c in centers if K.contains(c))
    for i, j in pairs:
        for s0, s1 in K.edges():
            x = _bisector_on_segment(sites[i], sites[j], s0, s1)
            if x is not None:
                cands.add(x)
    best, arg = Q(-1), None
    for x in sorted(cands):
        v = nearest.d2(x)
        if v > best:
            best, arg = v, x
    return best, arg, note


# ---------------------------------------------------------------------------
# sampling helpers (any dimension)


class _HullOracle:
    """Exact membership in conv(A) (and scaled translates), plus a float filter."""

    def __init__(self, a: CompactSet):
        self.a = a
        self.n = a.dim
        self.use_corners = a.rep == POINTS or a.dim <= 6
        self.verts = a.hull_points() if self.use_corners else None
        self.boxes = a.as_boxes()
        self.eq = None
        try:
            from scipy.spatial import ConvexHull

            pts = np.array([[float(c) for c in v] for v in (self.verts or [])])
            if self.verts and len(pts) > self.n and self.n <= 8:
                self.eq = ConvexHull(pts).equations
        except Exception:  # degenerate hull: no float filter
            self.eq = None
        if self.use_corners:
            self.vert_arr = np.array([[float(c) for c in v] for v in self.verts])
        else:
            lo = np.array([[float(c) for c in b.lo] for b in self.boxes])
            hi = np.array([[float(c) for c in b.hi] for b in self.boxes])
            self.vert_arr = np.concatenate([lo, hi])

    def bbox(self):
        if self.use_corners:
            cols = list(zip(*self.verts))
            return tuple(min(c) for c in cols), tuple(max(c) for c in cols)
        return (tuple(min(b.lo[d] for b in self.boxes) for d in range(self.n)),
                tuple(max(b.hi[d] for b in self.boxes) for d in range(self.n)))

    def contains(self, x: Point, factor=Q(1)) -> bool:
        """Exact test x in factor * conv(A)."""
        y = vscale(1 / Q(factor), x)
        if self.use_corners:
            return hull_membership(y, self.verts)
        return in_conv_of_boxes(y, self.boxes)

    def float_inside(self, X: np.ndarray, eps: float = 1e-9) -> np.ndarray | None:
        if self.eq is None:
            return None
        return np.all(X @ self.eq[:, :-1].T + self.eq[:, -1] <= eps, axis=1)

    def in_translate(self, x: Point, piece, lam) -> bool:
        """Exact test x in piece + lam * conv(A), piece a point or a box."""
        box = piece if isinstance(piece, AxisBox) else AxisBox(piece, piece)
        if self.use_corners:
            return in_box_plus_hull(x, box, lam, self.verts)
        return _in_box_plus_conv_boxes(x, box, lam, self.boxes)

    def sample(self, rng: np.random.Generator, count: int) -> np.ndarray:
        """Float points of conv(A), random convex combinations."""
        n = self.n
        if self.use_corners:
            V = self.vert_arr
            out = np.empty((count, n))
            for r in range(count):
                k = min(len(V), n + 1)
                idx = rng.choice(len(V), size=k, replace=False)
                w = rng.dirichlet(np.ones(k))
                out[r] = w @ V[idx]
            return out
        lo = np.array([[float(c) for c in b.lo] for b in self.boxes])
        hi = np.array([[float(c) for c in b.hi] for b in self.boxes])
        out = np.empty((count, n))
        for r in range(count):
            k = min(len(self.boxes), n + 1)
            idx = rng.choice(len(self.boxes), size=k, replace=True)
            pts = lo[idx] + rng.random((k, n)) * (hi[idx] - lo[idx])
            out[r] = rng.dirichlet(np.ones(k)) @ pts
        return out


def _in_box_plus_conv_boxes(x: Point, box: AxisBox, lam, boxes: Sequence[AxisBox]) -> bool:
    """x in box + lam * conv(union of boxes), lam >= 0, without corners."""
    n = box.dim
    m = len(boxes)
    lam = Q(lam)
    # x = lo + s + lam * sum_b (mu_b lo_b + w_b); 0<=s<=hi-lo; 0<=w_b<=mu_b(hi_b-lo_b)
    # variables: s(n) t(n) mu(m) w(mn) u(mn)
    nv = 2 * n + m + 2 * m * n
    A, b = [], []
    for d in range(n):
        row = [Q(0)] * nv
        row[d] = Q(1)
        for i, bx in enumerate(boxes):
            row[2 * n + i] = lam * bx.lo[d]
            row[2 * n + m + i * n + d] = lam
        A.append(row)
        b.append(x[d] - box.lo[d])
    for d in range(n):
        row = [Q(0)] * nv
        row[d] = row[n + d] = Q(1)
        A.append(row)
        b.append(box.hi[d] - box.lo[d])
    for i, bx in enumerate(boxes):
        for d in range(n):
            row = [Q(0)] * nv
            row[2 * n + i] = -(bx.hi[d] - bx.lo[d])
            row[2 * n + m + i * n + d] = Q(1)
            row[2 * n + m + m * n + i * n + d] = Q(1)
            A.append(row)
            b.append(Q(0))
    row = [Q(0)] * nv
    for i in range(m):
        row[2 * n + i] = Q(1)
    A.append(row)
    b.append(Q(1))
    return lp_feasible(A, b) is not None


def _pieces(a: CompactSet):
    return list(a.items) if a.rep != INTERVALS else a.as_boxes()


def _set_dist2(a: CompactSet, x: Point, nearest: _Nearest | None) -> Q:
    if a.rep == POINTS:
        return nearest.d2(x)
    return min(b.dist2(x) for b in a.as_boxes())


def _rationalized_samples(oracle: _HullOracle, rng, count: int, factor=Q(1)):
    """Samples of factor*conv(A) rounded to the 2^-16 grid, exactly certified."""
    raw = oracle.sample(rng, count) * float(factor)
    out = []
    seen = set()
    for row in raw:
        x = tuple(round_to_grid(v) for v in row)
        if x in seen:
            continue
        seen.add(x)
        if oracle.contains(x, factor):
            out.append(x)
    return out


# ---------------------------------------------------------------------------
# volume deficit


def volume_deficit(a: CompactSet, seed: int = 0, samples: int = 20000) -> MeasureResult:
    """Vol(conv A) - Vol(A)."""
    if a.dim == 1:
        return _exact(DELTA, delta_1d(a), "exact_1d")
    if len(a.items) == 1 and a.rep != POINTS:
        return _exact(DELTA, Q(0), "exact_analytic", )
    if a.dim == 2:
        h = _hull2(a)
        hull_area = Q(0) if h.degenerate else h.polygon.area
        return _exact(DELTA, hull_area - a.volume(), "exact_2d")
    vol = a.volume()
    if a.hull_volume is not None:
        return _exact(DELTA, a.hull_volume - vol, "exact_analytic")
    if a.rep == POINTS and len(a.items) <= a.dim:
        return _exact(DELTA, Q(0), "exact_analytic")
    lo, hi = _mc_hull_volume(a, seed, samples)
    cert = Certificate("monte_carlo", seed=seed, samples=samples,
                       note="hull volume: 99.9% Wilson interval of membership fraction")
    return MeasureResult(DELTA, max(Q(0), lo - vol), max(Q(0), hi - vol), cert)


def _mc_hull_volume(a: CompactSet, seed: int, samples: int) -> tuple[Q, Q]:
    oracle = _HullOracle(a)
    blo, bhi = oracle.bbox()
    box_vol = Q(1)
    for x, y in zip(blo, bhi):
        box_vol *= y - x
    if box_vol == 0:
        return Q(0), Q(0)
    rng = np.random.default_rng(seed)
    lo = np.array([float(c) for c in blo])
    hi = np.array([float(c) for c in bhi])
    X = lo + rng.random((samples, a.dim)) * (hi - lo)
    inside = oracle.float_inside(X)
    if inside is None:
        inside = np.array([_float_lp_member(x, oracle) for x in X])
    k = int(inside.sum())
    z = 3.2905
    phat = k / samples
    den = 1 + z * z / samples
    centre = (phat + z * z / (2 * samples)) / den
    half = z * math.sqrt(phat * (1 - phat) / samples + z * z / (4 * samples * samples)) / den
    grid = 1 << 20
    p_lo = Q(max(0, math.floor((centre - half) * grid)), grid)
    p_hi = Q(min(grid, math.ceil((centre + half) * grid)), grid)
    return p_lo * box_vol, p_hi * box_vol


def _float_lp_member(x: np.ndarray, oracle: _HullOracle) -> bool:
    from scipy.optimize import linprog

    V = oracle.vert_arr
    if oracle.use_corners:
        A_eq = np.vstack([V.T, np.ones(len(V))])
        res = linprog(np.zeros(len(V)), A_eq=A_eq, b_eq=np.append(x, 1.0), bounds=(0, None),
                      method="highs")
        return res.status == 0
    m = len(oracle.boxes)
    lo, hi = V[:m], V[m:]
    n = oracle.n
    # x = sum_b z_b, mu_b lo_b <= z_b <= mu_b hi_b
    nv = m + m * n
    A_eq = np.zeros((n + 1, nv))
    for i in range(m):
        A_eq[:n, m + i * n:m + (i + 1) * n] = np.eye(n)
    A_eq[n, :m] = 1
    A_ub = np.zeros((2 * m * n, nv))
    b_ub = np.zeros(2 * m * n)
    for i in range(m):
        for d in range(n):
            r = 2 * (i * n + d)
            A_ub[r, m + i * n + d] = 1
            A_ub[r, i] = -hi[i, d]
            A_ub[r + 1, m + i * n + d] = -1
            A_ub[r + 1, i] = lo[i, d]
    res = linprog(np.zeros(nv), A_ub=A_ub, b_ub=b_ub, A_eq=A_eq, b_eq=np.append(x, 1.0),
                  bounds=[(0, None)] * m + [(None, None)] * (m * n), method="highs")
    return res.status == 0


# ---------------------------------------------------------------------------
# Hausdorff distance to the hull


def hausdorff_to_hull(a: CompactSet, seed: int = 0, samples: int = 256,
                      grid_cells: int = 512) -> MeasureResult:
    """d(A) = inf{r : conv A within A + r B}."""
    if a.dim == 1:
        d = d_1d(a)
        return MeasureResult(HAUSDORFF, d, d, Certificate("exact_1d"),
                             square=d * d, square_lo=d * d, square_hi=d * d)
    if len(a.items) == 1 and a.rep != INTERVALS:
        z = Q(0)
        return MeasureResult(HAUSDORFF, z, z, Certificate("exact_analytic"),
                             square=z, square_lo=z, square_hi=z)
    if a.dim == 2:
        h = _hull2(a)
        if h.degenerate:
            one_d, L2 = _collinear_to_1d(a, h)
            d = d_1d(one_d)
            return _hausdorff_from_square(d * d * L2, Certificate("exact_2d", note="collinear"))
        if a.rep == POINTS:
            sq, arg, note = _d2_points_2d(list(a.items), h.polygon)
            return _hausdorff_from_square(sq, Certificate("exact_2d", witness=arg, note=note))
        if _convex_2d(a, h.polygon):
            return _hausdorff_from_square(Q(0), Certificate("exact_2d", note="convex"))
    return _hausdorff_bounds(a, seed, samples, grid_cells)


def _hausdorff_bounds(a: CompactSet, seed: int, samples: int, grid_cells: int) -> MeasureResult:
    n = a.dim
    oracle = _HullOracle(a)
    nearest = _Nearest(a.items) if a.rep == POINTS else None
    rng = np.random.default_rng(seed)
    # lower bound: best certified sample of conv(A)
    cands = _rationalized_samples(oracle, rng, samples)
    best, arg = Q(0), None
    for x in cands:
        v = _set_dist2(a, x, nearest)
        if v > best:
            best, arg = v, x
    # upper bound: every point of conv(A) lies in a grid cell meeting conv(A),
    # within half a cell diagonal of that cell's centre
    blo, bhi = oracle.bbox()
    r = max(1, int(math.floor(grid_cells ** (1.0 / n) + 1e-9)))
    widths = [(y - x) / r for x, y in zip(blo, bhi)]
    worst_centre = Q(0)
    import itertools

    for idx in itertools.product(range(r), repeat=n):
        clo = tuple(blo[d] + widths[d] * idx[d] for d in range(n))
        chi = tuple(blo[d] + widths[d] * (idx[d] + 1) for d in range(n))
        centre = tuple((x + y) / 2 for x, y in zip(clo, chi))
        v = _set_dist2(a, centre, nearest)
        if v <= worst_centre:
            continue
        if _cell_meets_hull(oracle, AxisBox(clo, chi)):
            worst_centre = v
    half_diag2 = sum((w / 2) ** 2 for w in widths)
    hi = sqrt_enclosure(worst_centre, SQRT_BITS)[1] + sqrt_enclosure(half_diag2, SQRT_BITS)[1]
    lo = sqrt_enclosure(best, SQRT_BITS)[0]
    hi = max(hi, lo)
    cert = Certificate("monte_carlo", seed=seed, samples=samples, witness=arg,
                       note=f"upper bound from {r}^{n} covering grid")
    return MeasureResult(HAUSDORFF, lo, hi, cert, square_lo=best, square_hi=hi * hi)


def _cell_meets_hull(oracle: _HullOracle, cell: AxisBox) -> bool:
    zero = (Q(0),) * cell.dim
    # 0 in cell - conv(A)
    if oracle.use_corners:
        return in_box_plus_hull(zero, cell, -1, oracle.verts)
    neg = [AxisBox(vscale(-1, b.hi), vscale(-1, b.lo)) for b in oracle.boxes]
    return _in_box_plus_conv_boxes(zero, cell, 1, neg)


# ---------------------------------------------------------------------------
# Schneider's non-convexity index


def _convex_at_2d(a: CompactSet, K: Polygon2, lam: Q) -> bool:
    if a.rep == POINTS:
        lk = K.scaled(lam)
        parts = [lk.translated(p) for p in a.items]
    else:
        parts = [minkowski_polygon(b.corners(), K, lam) for b in a.items]
    return polyset2_area(parts) == (1 + lam) ** 2 * K.area


def schneider_c(a: CompactSet, tol=DEFAULT_TOL, seed: int = 0, samples: int = 64) -> MeasureResult:
    """c(A) = inf{lam >= 0 : A + lam conv(A) is convex}."""
    tol = Q(tol)
    if tol <= 0:
        raise ValueError("tolerance must be positive")
    if a.dim == 1:
        return _exact(SCHNEIDER, c_1d(a), "exact_1d")
    if len(a.items) == 1 and a.rep != INTERVALS:
        return _exact(SCHNEIDER, Q(0), "exact_analytic")
    if a.dim == 2:
        h = _hull2(a)
        if h.degenerate:
            one_d, _ = _collinear_to_1d(a, h)
            return _exact(SCHNEIDER, c_1d(one_d), "exact_2d", )
        K = h.polygon
        if _convex_2d(a, K):
            return _exact(SCHNEIDER, Q(0), "exact_2d")
        return _bisect(lambda lam: _convex_at_2d(a, K, lam), Q(2), tol,
                       Certificate("bisection_interval"))
    return _schneider_mc(a, tol, seed, samples)


def _bisect(is_convex, upper: Q, tol: Q, cert: Certificate) -> MeasureResult:
    lo, hi = Q(0), upper
    if not is_convex(hi):
        raise ArithmeticError(f"set not convexified at lambda = {hi}, contradicting c(A) <= n")
    cert.probes.append((hi, True))
    while hi - lo > tol:
        mid = (lo + hi) / 2
        ok = is_convex(mid)
        cert.probes.append((mid, ok))
        if ok:
            hi = mid
        else:
            lo = mid
    return MeasureResult(SCHNEIDER, lo, hi, cert)


def _schneider_mc(a: CompactSet, tol: Q, seed: int, samples: int) -> MeasureResult:
    n = a.dim
    oracle = _HullOracle(a)
    pieces = _pieces(a)
    rng = np.random.default_rng(seed)
    cert = Certificate("monte_carlo", seed=seed, samples=samples, heuristic_hi=True,
                       note="value_lo certified by an uncovered witness; value_hi heuristic")
    centre = tuple(sum((v[d] for v in oracle.vert_arr), 0.0) / len(oracle.vert_arr)
                   for d in range(n))

    def uncovered(lam: Q):
        pts = [tuple(round_to_grid(c * float(1 + lam)) for c in centre)]
        pts = [p for p in pts if oracle.contains(p, 1 + lam)]
        pts += _rationalized_samples(oracle, rng, samples, 1 + lam)
        for x in pts:
            if not any(oracle.in_translate(x, pc, lam) for pc in pieces):
                return x
        return None

    lo, hi = Q(0), Q(n)
    while hi - lo > tol:
        mid = (lo + hi) / 2
        w = uncovered(mid)
        cert.probes.append((mid, w is None))
        if w is None:
            hi = mid
        else:
            lo = mid
            cert.witness = w
    return MeasureResult(SCHNEIDER, lo, hi, cert)


# ---------------------------------------------------------------------------
# scaling


BOTH_ZERO = "both zero"


@dataclass(frozen=True)
class ScalingRatios:
    c_ratio: Q | str
    delta_ratio: Q | str
    d_ratio: Q | str


def _ratio(new: Q, old: Q):
    if old == 0:
        if new == 0:
            return BOTH_ZERO
        raise ArithmeticError("measure vanishes on A but not on tA")
    return new / old


def scaling_behavior(a: CompactSet, t, tol=DEFAULT_TOL) -> ScalingRatios:
    """measure(tA) / measure(A) for the three measures.

    Only for representations where all three are computed deterministically
    (n = 1, and 2-D point sets). Schneider's index in 2-D comes from identical
    bisection runs, so the upper ends of the brackets are compared.
    """
    t = Q(t)
    if not (a.dim == 1 or (a.dim == 2 and a.rep == POINTS)):
        raise UnsupportedMeasure("scaling_behavior needs a 1-D set or a 2-D point set")
    b = scale(a, t)
    d_old, d_new = hausdorff_to_hull(a), hausdorff_to_hull(b)
    d_sq = _ratio(d_new.square, d_old.square)
    d_ratio = d_sq if d_sq == BOTH_ZERO else exact_sqrt(d_sq)
    c_old, c_new = schneider_c(a, tol), schneider_c(b, tol)
    return ScalingRatios(
        c_ratio=_ratio(c_new.value_hi, c_old.value_hi),
        delta_ratio=_ratio(volume_deficit(b).value, volume_deficit(a).value),
        d_ratio=d_ratio,
    )


def measure_all(a: CompactSet, which: str = "all", tol=DEFAULT_TOL, seed: int = 0) -> dict:
    out = {}
    if which in ("delta", "all"):
        out["delta"] = volume_deficit(a, seed=seed)
    if which in ("d", "all"):
        out["d"] = hausdorff_to_hull(a, seed=seed)
    if which in ("c", "all"):
        out["c"] = schneider_c(a, tol=tol, seed=seed)
    if not out:
        raise ValueError(f"unknown measure {which!r}")
    return out
