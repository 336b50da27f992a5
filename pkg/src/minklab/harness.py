"""Mechanical checks of the quantitative claims about Minkowski averages.

Every check returns a :class:`Report`. Margins are signed slacks, computed so
that a negative margin is a violation; for interval-valued measures the
conservative end of each interval is used.
"""
from __future__ import annotations

import csv
import io
import os
import random
import time
from dataclasses import dataclass, field
from typing import Callable, Sequence

from .exact import Q, fmt
from .geom import AxisBox, box_union_volume
from .measures import (DEFAULT_TOL, c_1d, d_1d, hausdorff_to_hull, schneider_c,
                       volume_deficit)
from .sets import (BOXES, INTERVALS, POINTS, BudgetExceeded, CompactSet, CrossSpec,
                   cross_build, gallery, minkowski_sum, points, random_set, scale, sub_seed)
from .serialize import set_to_dict

DEFAULT_BUDGET = 5000


def default_budget() -> int:
    return int(os.environ.get("MINKLAB_BUDGET", DEFAULT_BUDGET))


@dataclass
class Report:
    claim_id: str
    instances: int = 0
    violations: int = 0
    worst_margin: Q | None = None
    witnesses: list = field(default_factory=list)
    runtime_ms: int = 0
    skipped: int = 0
    details: dict = field(default_factory=dict)
    message: str = ""

    def record(self, margin: Q, witness: Callable[[], dict] | None = None) -> None:
        """Account for one comparison with signed slack ``margin``."""
        margin = Q(margin)
        if self.worst_margin is None or margin < self.worst_margin:
            self.worst_margin = margin
        if margin < 0:
            self.violations += 1
            if witness is not None:
                self.witnesses.append(witness())

    @property
    def ok(self) -> bool:
        return self.violations == 0

    def to_dict(self) -> dict:
        """Deterministic part of the report (runtime lives in the sidecar)."""
        return {
            "claim_id": self.claim_id,
            "instances": self.instances,
            "violations": self.violations,
            "worst_margin": None if self.worst_margin is None else fmt(self.worst_margin),
            "skipped": self.skipped,
            "witnesses": self.witnesses,
            "details": _jsonable(self.details),
            "message": self.message,
        }


def _jsonable(obj):
    if isinstance(obj, Q):
        return fmt(obj)
    if isinstance(obj, dict):
        return {str(k): _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    return obj


class _Timer:
    def __init__(self, report: Report):
        self.report = report

    def __enter__(self):
        self.t0 = time.perf_counter()
        return self.report

    def __exit__(self, *exc):
        self.report.runtime_ms = int((time.perf_counter() - self.t0) * 1000)
        return False


def sums_upto(a: CompactSet, kmax: int, budget: int | None = None) -> list[CompactSet]:
    """[A, A+A, ..., kmax-fold sum]."""
    out = [a]
    for _ in range(kmax - 1):
        out.append(minkowski_sum(out[-1], a, budget))
    return out


def averages_upto(a: CompactSet, kmax: int, budget: int | None = None) -> list[CompactSet]:
    """[A(1), ..., A(kmax)]."""
    return [scale(s, Q(1, k)) if k > 1 else s
            for k, s in enumerate(sums_upto(a, kmax, budget), start=1)]


def _random_size(seed: int, hi: int) -> int:
    return random.Random(seed ^ 0x5DEECE66D).randint(1, hi)


# ---------------------------------------------------------------------------
# the cross construction


def counterexample_closed_form(n: int, p: int) -> dict:
    """Volumes of A(2), A(3) for the unit cross from the closed forms, and
    the inequality 2^p + 2^(n-p) - 1 >= (3/2)^n evaluated directly."""
    lhs = Q(2 ** p + 2 ** (n - p) - 1)
    rhs = Q(3, 2) ** n
    return {
        "vol_sum2": Q(1),
        "vol_sum3": lhs,
        "vol_avg2": Q(1, 2 ** n),
        "vol_avg3": lhs / 3 ** n,
        "calcul_lhs": lhs,
        "calcul_rhs": rhs,
        "calcul_holds": lhs >= rhs,
    }


def verify_counterexample(n: int, p: int) -> Report:
    report = Report("counterexample")
    with _Timer(report):
        spec = CrossSpec(n, p)
        a = cross_build(spec)
        s2 = minkowski_sum(a, a)
        s3 = minkowski_sum(s2, a)
        v2 = box_union_volume(s2.items) / 2 ** n
        v3 = box_union_volume(s3.items) / 3 ** n
        closed = counterexample_closed_form(n, p)
        engine_violation = v3 < v2
        agree = (v2 == closed["vol_avg2"] and v3 == closed["vol_avg3"]
                 and engine_violation == (not closed["calcul_holds"]))
        report.instances = 1
        report.record(v3 - v2, lambda: {"n": n, "p": p, "set": set_to_dict(a)})
        report.details = {
            "n": n, "p": p,
            "vol_avg2": v2, "vol_avg3": v3,
            "closed_vol_avg2": closed["vol_avg2"], "closed_vol_avg3": closed["vol_avg3"],
            "calcul_lhs": closed["calcul_lhs"], "calcul_rhs": closed["calcul_rhs"],
            "agree": agree,
            "sum2_boxes": len(s2), "sum3_boxes": len(s3),
        }
        if engine_violation:
            report.message = f"VIOLATION CONFIRMED: {fmt(v3)} < {fmt(v2)}"
        elif n < 12:
            report.message = "no violation (construction insufficient below n=12)"
        else:
            report.message = f"no violation for p={p}: {fmt(v3)} >= {fmt(v2)}"
        if not agree:
            report.message += " [MISMATCH between box engine and closed form]"
    return report


def counterexample_table(nmax: int = 14) -> list[dict]:
    """verify_counterexample for every 2 <= n <= nmax, 1 <= p <= n-1."""
    rows = []
    for n in range(2, nmax + 1):
        for p in range(1, n):
            r = verify_counterexample(n, p)
            rows.append({"n": n, "p": p, "violation": r.violations > 0,
                         "agree": r.details["agree"]})
    return rows


# ---------------------------------------------------------------------------
# Schneider index and Hausdorff distance along averages


def _contraction_instances(trials: int, seed: int, max_points: int) -> list[CompactSet]:
    sets = [points([0, 1])]
    for t in range(trials):
        s = sub_seed(seed, t)
        sets.append(random_set(1, POINTS, _random_size(s, max_points), s))
    return sets


def check_theorem2(trials: int = 200, kmax: int = 4, seed: int = 0, dim: int = 1,
                   max_points: int = 8, tol=DEFAULT_TOL) -> Report:
    """c(A(k+1)) <= k/(k+1) c(A(k)) for k = 1..kmax.

    The instance {0,1} is always included first; it attains equality.
    """
    report = Report("thm2")
    tol = Q(tol)
    with _Timer(report):
        if dim == 1:
            sets = _contraction_instances(trials, seed, max_points)
        else:
            sets = [random_set(dim, POINTS, _random_size(sub_seed(seed, t), max_points),
                               sub_seed(seed, t)) for t in range(trials)]
        comparisons = 0
        for a in sets:
            avgs = averages_upto(a, kmax + 1)
            if dim == 1:
                cs = [(c, c) for c in map(c_1d, avgs)]
                slack = Q(0)
            else:
                cs = [(r.value_lo, r.value_hi) for r in (schneider_c(x, tol) for x in avgs)]
                slack = 2 * tol
            for k in range(1, kmax + 1):
                lhs = cs[k][1]
                rhs = Q(k, k + 1) * cs[k - 1][0] + slack
                comparisons += 1
                report.record(rhs - lhs, lambda: {"k": k, "set": set_to_dict(a)})
            report.instances += 1
        report.details = {"comparisons": comparisons, "kmax": kmax, "seed": seed, "dim": dim,
                          "equality_instance": "{0,1}" if dim == 1 else None}
    return report


def check_theorem3(trials: int = 200, kmax: int = 4, seed: int = 0, max_points: int = 8,
                   planar_trials: int = 0, planar_points: int = 4) -> Report:
    """d(A(k+1))^2 <= (k/(k+1))^2 d(A(k))^2, exact on squared values.

    1-D sets satisfy k >= c(A) for every k >= 1. Planar point sets are
    checked for k >= 2, where c(A) <= 2 guarantees the hypothesis.
    """
    report = Report("thm3")
    with _Timer(report):
        comparisons = 0
        for a in _contraction_instances(trials, seed, max_points):
            d2 = [d_1d(x) ** 2 for x in averages_upto(a, kmax + 1)]
            for k in range(1, kmax + 1):
                comparisons += 1
                report.record(Q(k, k + 1) ** 2 * d2[k - 1] - d2[k],
                              lambda: {"k": k, "set": set_to_dict(a)})
            report.instances += 1
        planar = 0
        for t in range(planar_trials):
            s = sub_seed(seed + 1, t)
            a = random_set(2, POINTS, max(3, _random_size(s, planar_points)), s)
            avgs = averages_upto(a, kmax + 1)
            d2 = [hausdorff_to_hull(x).square for x in avgs]
            for k in range(2, kmax + 1):
                planar += 1
                report.record(Q(k, k + 1) ** 2 * d2[k - 1] - d2[k],
                              lambda: {"k": k, "set": set_to_dict(a)})
            report.instances += 1
        report.details = {"comparisons": comparisons, "planar_comparisons": planar,
                          "kmax": kmax, "seed": seed}
    return report


def check_1d_monotonicity(trials: int = 200, kmax: int = 6, seed: int = 0,
                          max_intervals: int = 5, sets: Sequence[CompactSet] | None = None) -> Report:
    """Vol_1(A(k)) is non-decreasing in k."""
    report = Report("mono1d")
    with _Timer(report):
        if sets is None:
            sets = [random_set(1, INTERVALS, _random_size(sub_seed(seed, t), max_intervals),
                               sub_seed(seed, t)) for t in range(trials)]
        for a in sets:
            vols = [x.volume() for x in averages_upto(a, kmax)]
            for k in range(1, kmax):
                report.record(vols[k] - vols[k - 1], lambda: {"k": k, "set": set_to_dict(a)})
            report.instances += 1
        report.details = {"kmax": kmax, "seed": seed}
    return report


# ---------------------------------------------------------------------------
# volume inequalities for several sets


def superadditivity_margin(sets: Sequence[CompactSet]) -> Q:
    """Vol(sum A_i) - 1/(k-1) sum_i Vol(sum_{j != i} A_j)."""
    k = len(sets)
    if k < 2:
        raise ValueError("need at least two sets")
    dim = sets[0].dim
    if any(s.dim != dim for s in sets):
        raise ValueError("sets of mixed dimension")

    def total(ss):
        acc = ss[0]
        for s in ss[1:]:
            acc = minkowski_sum(acc, s)
        return acc.volume()

    full = total(list(sets))
    partial = sum((total([s for j, s in enumerate(sets) if j != i]) for i in range(k)), Q(0))
    return full - partial / (k - 1)


def check_superadditivity(sets: Sequence[CompactSet]) -> Report:
    report = Report("superadd")
    with _Timer(report):
        report.instances = 1
        report.record(superadditivity_margin(sets),
                      lambda: {"sets": [set_to_dict(s) for s in sets]})
    return report


def superadditivity_suite(trials: int = 100, seed: int = 0, dims: Sequence[int] = (2, 3),
                          k: int = 3, max_boxes: int = 3) -> Report:
    report = Report("superadd")
    with _Timer(report):
        for dim in dims:
            for t in range(trials):
                s = sub_seed(seed + dim, t)
                sets = [random_set(dim, BOXES, _random_size(s + i, max_boxes), s + 101 * i)
                        for i in range(k)]
                report.record(superadditivity_margin(sets),
                              lambda: {"sets": [set_to_dict(x) for x in sets]})
                report.instances += 1
        report.details = {"dims": list(dims), "k": k, "seed": seed}
    return report


def equal_sets_reduction(a: CompactSet, k: int) -> tuple[Q, Q]:
    """Superadditivity for k copies of a 1-D set, reduced to monotonicity.

    For k copies the inequality reads (k-1)|kA| >= k|(k-1)A|; dividing by
    k(k-1) gives |A(k)| >= |A(k-1)|. Returns both slacks on the same scale,
    (superadditivity margin / k, |A(k)| - |A(k-1)|); they must be equal.
    """
    if a.dim != 1:
        raise ValueError("the reduction to monotonicity is one-dimensional")
    margin = superadditivity_margin([a] * k)
    avgs = averages_upto(a, k)
    return margin / k, avgs[k - 1].volume() - avgs[k - 2].volume()


def supermodularity_margin(b1: AxisBox, b2: AxisBox, b3: AxisBox) -> Q:
    """Vol(B1+B2+B3) + Vol(B1) - Vol(B1+B2) - Vol(B1+B3)."""
    return (b1 + b2 + b3).volume + b1.volume - (b1 + b2).volume - (b1 + b3).volume


def check_supermodularity(b1: AxisBox, b2: AxisBox, b3: AxisBox) -> Report:
    report = Report("supermod")
    with _Timer(report):
        report.instances = 1
        report.record(supermodularity_margin(b1, b2, b3),
                      lambda: {"boxes": [set_to_dict(CompactSet(b1.dim, BOXES, (b,)))
                                         for b in (b1, b2, b3)]})
    return report


def supermodularity_suite(trials: int = 100, seed: int = 0, dim: int = 3) -> Report:
    report = Report("supermod")
    with _Timer(report):
        for t in range(trials):
            # one box per draw: a 3-box set may lose boxes to containment pruning
            b1, b2, b3 = (random_set(dim, BOXES, 1, sub_seed(seed, t) + i).items[0]
                          for i in range(3))
            report.record(supermodularity_margin(b1, b2, b3),
                          lambda: {"boxes": [[[fmt(c) for c in b.lo], [fmt(c) for c in b.hi]]
                                             for b in (b1, b2, b3)]})
            report.instances += 1
        report.details = {"dim": dim, "seed": seed}
    return report


def check_triple_c(trials: int = 200, seed: int = 0, max_points: int = 5) -> Report:
    """c(A+B+C) <= max(c(A+B), c(B+C)) on 1-D finite sets."""
    report = Report("triple-c")
    with _Timer(report):
        for t in range(trials):
            s = sub_seed(seed, t)
            a, b, c = (random_set(1, POINTS, _random_size(s + 7 * i, max_points), s + 13 * i)
                       for i in range(3))
            ab = minkowski_sum(a, b)
            bc = minkowski_sum(b, c)
            abc = minkowski_sum(ab, c)
            report.record(max(c_1d(ab), c_1d(bc)) - c_1d(abc),
                          lambda: {"sets": [set_to_dict(x) for x in (a, b, c)]})
            report.instances += 1
        report.details = {"seed": seed}
    return report


# ---------------------------------------------------------------------------
# incomparability gallery


def check_gallery(tol=DEFAULT_TOL) -> Report:
    """Finite grids keep the volume deficit at 1 while c and d shrink; three-point
    sets lose their volume deficit while c and d stay away from 0; scaled
    two-point sets keep c while the volume deficit and d shrink."""
    report = Report("gallery")
    tol = Q(tol)
    rows: dict = {}

    def check(label, margin):
        report.instances += 1
        report.record(margin, lambda: {"assertion": label})

    with _Timer(report):
        hs = [Q(1, 4), Q(1, 8), Q(1, 16)]
        grid = []
        for h in hs:
            a = gallery("finite_grid", h)
            grid.append((volume_deficit(a), hausdorff_to_hull(a), schneider_c(a, tol)))
        rows["finite_grid"] = [{"h": h, "delta": r[0].value, "d_square": r[1].square,
                                "c_lo": r[2].value_lo, "c_hi": r[2].value_hi}
                               for h, r in zip(hs, grid)]
        for i, (delta, _, _) in enumerate(grid):
            check(f"finite_grid({hs[i]}) delta == 1", -abs(delta.value - 1))
        for i in range(1, len(hs)):
            check(f"finite_grid d strictly decreasing at {hs[i]}",
                  _strict(grid[i - 1][1].square - grid[i][1].square))
            check(f"finite_grid c strictly decreasing at {hs[i]}",
                  _strict(grid[i - 1][2].value_lo - grid[i][2].value_hi))

        eps = [Q(1, 4), Q(1, 8), Q(1, 16)]
        tp = []
        for e in eps:
            a = gallery("three_point", e)
            tp.append((volume_deficit(a), hausdorff_to_hull(a), schneider_c(a, tol)))
        c_floor = tp[0][2].value_lo / 2
        d_floor = tp[0][1].square / 4
        rows["three_point"] = [{"eps": e, "delta": r[0].value, "d_square": r[1].square,
                                "c_lo": r[2].value_lo, "c_hi": r[2].value_hi}
                               for e, r in zip(eps, tp)]
        rows["three_point_floors"] = {"c_lo_floor": c_floor, "d_square_floor": d_floor}
        for i in range(1, len(eps)):
            check(f"three_point delta strictly decreasing at {eps[i]}",
                  _strict(tp[i - 1][0].value - tp[i][0].value))
        for i, e in enumerate(eps):
            check(f"three_point({e}) d^2 >= {d_floor}", tp[i][1].square - d_floor)
            check(f"three_point({e}) c_lo >= {c_floor}", tp[i][2].value_lo - c_floor)

        ts = [Q(1), Q(1, 2), Q(1, 4)]
        seg = []
        for t in ts:
            a = gallery("scaled_segment_pair", t)
            seg.append((volume_deficit(a).value, hausdorff_to_hull(a).value,
                        schneider_c(a).value))
        rows["scaled_segment_pair"] = [{"t": t, "delta": r[0], "d": r[1], "c": r[2]}
                                       for t, r in zip(ts, seg)]
        for t, (delta, d, c) in zip(ts, seg):
            check(f"scaled_segment_pair({t}) c == 1", -abs(c - 1))
            check(f"scaled_segment_pair({t}) delta == t", -abs(delta - t))
            check(f"scaled_segment_pair({t}) d == t/2", -abs(d - t / 2))
        report.details = rows
    return report


def _strict(diff: Q) -> Q:
    """Margin for a strict inequality diff > 0: zero counts as a violation."""
    return diff if diff > 0 else diff - 1


# ---------------------------------------------------------------------------
# convergence rates


RATE_COLUMNS = ["k", "delta_lo", "delta_hi", "d_lo", "d_hi", "d_square", "c_lo", "c_hi",
                "k_delta_lo", "k_delta_hi", "k_d_lo", "k_d_hi", "k_c_lo", "k_c_hi"]


@dataclass
class RateTable:
    rows: list = field(default_factory=list)
    meta: dict = field(default_factory=dict)

    def column(self, name: str) -> list:
        return [r[name] for r in self.rows]

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(RATE_COLUMNS)
        for r in self.rows:
            w.writerow(["" if r[c] is None else (fmt(r[c]) if isinstance(r[c], Q) else r[c])
                        for c in RATE_COLUMNS])
        return buf.getvalue()

    def to_dict(self) -> dict:
        return {"meta": _jsonable(self.meta), "columns": RATE_COLUMNS,
                "rows": [_jsonable([r[c] for c in RATE_COLUMNS]) for r in self.rows]}


def rates(a: CompactSet, kmax: int, tol=DEFAULT_TOL, seed: int = 0) -> RateTable:
    """Delta, d and c of A(k) for k = 1..kmax, with k * value columns."""
    table = RateTable(meta={"dim": a.dim, "rep": a.rep, "size": len(a), "kmax": kmax,
                            "tol": Q(tol), "seed": seed})
    for k, x in enumerate(averages_upto(a, kmax), start=1):
        delta = volume_deficit(x, seed=seed)
        d = hausdorff_to_hull(x, seed=seed)
        c = schneider_c(x, tol=tol, seed=seed)
        table.rows.append({
            "k": k,
            "delta_lo": delta.value_lo, "delta_hi": delta.value_hi,
            "d_lo": d.value_lo, "d_hi": d.value_hi, "d_square": d.square,
            "c_lo": c.value_lo, "c_hi": c.value_hi,
            "k_delta_lo": k * delta.value_lo, "k_delta_hi": k * delta.value_hi,
            "k_d_lo": k * d.value_lo, "k_d_hi": k * d.value_hi,
            "k_c_lo": k * c.value_lo, "k_c_hi": k * c.value_hi,
        })
    return table


# ---------------------------------------------------------------------------
# search in the open range


def search_violation(dim: int, trials: int = 100, kmax: int = 4, seed: int = 0,
                     max_boxes: int = 3, budget: int | None = None) -> Report:
    """Look for Vol(A(k+1)) < Vol(A(k)) among random box unions in R^dim.

    Finding nothing is not evidence of absence; the message says so.
    """
    if dim >= 12:
        raise ValueError("use verify_counterexample for n >= 12")
    if dim < 2:
        raise ValueError("search dimension must be in 2..11")
    budget = default_budget() if budget is None else budget
    report = Report("search")
    with _Timer(report):
        for t in range(trials):
            s = sub_seed(seed, t)
            a = random_set(dim, BOXES, _random_size(s, max_boxes), s)
            try:
                sums = sums_upto(a, kmax, budget)
            except BudgetExceeded:
                report.skipped += 1
                continue
            vols = [x.volume() / k ** dim for k, x in enumerate(sums, start=1)]
            for k in range(1, kmax):
                report.record(vols[k] - vols[k - 1],
                              lambda: {"k": k, "seed": s, "set": set_to_dict(a),
                                       "vol_k": fmt(vols[k - 1]), "vol_k1": fmt(vols[k])})
            report.instances += 1
        report.details = {"dim": dim, "kmax": kmax, "seed": seed, "budget": budget}
        if report.violations:
            report.message = f"VIOLATION WITNESS found in {trials} trials"
        else:
            report.message = (f"no witness found in {trials} trials "
                              f"({report.skipped} skipped by budget)")
    return report
