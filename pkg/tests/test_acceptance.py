"""Acceptance gate: one test per criterion, each printing a PASS/FAIL line.

Run with ``pytest tests/test_acceptance.py -v`` (the lines appear in the
terminal summary) or directly with ``python3 tests/test_acceptance.py``.
"""
from __future__ import annotations

import io
import itertools
import random
import time
from contextlib import redirect_stdout

from minklab import harness
from minklab.cli import main as cli_main
from minklab.exact import Q
from minklab.geom import AxisBox, Interval, box_union_volume, interval_union_measure
from minklab.measures import DEFAULT_TOL, c_1d, schneider_c, schneider_c_1d_bisection
from minklab.sets import INTERVALS, POINTS, points, random_set

#: criterion number -> (passed, detail); filled in as the tests run
RESULTS: dict[int, tuple[bool, str]] = {}

TITLES = {
    1: "counterexample in R^12, none for n <= 11",
    2: "c(A(k+1)) <= k/(k+1) c(A(k)) on 200 1-D sets",
    3: "d(A(k+1))^2 <= (k/(k+1))^2 d(A(k))^2 on 200 1-D sets",
    4: "Vol_1(A(k)) non-decreasing on 200 interval unions",
    5: "superadditivity and supermodularity on box triples",
    6: "c(A+B+C) <= max(c(A+B), c(B+C)) on 200 1-D triples",
    7: "k*d = 1/2 and k*c = 1 for {0,1}, k = 1..32",
    8: "triangle c within 2^-20 of 2; 1-D closed form == bisection",
    9: "incomparability gallery",
    10: "box volume and interval measure against brute-force oracles",
}


def _record(n: int, ok: bool, detail: str) -> None:
    RESULTS[n] = (ok, detail)
    print(f"{'PASS' if ok else 'FAIL'} criterion {n}: {TITLES[n]} | {detail}")
    assert ok, detail


def _timed(fn):
    t0 = time.perf_counter()
    out = fn()
    return out, time.perf_counter() - t0


def test_criterion_01_counterexample():
    buf = io.StringIO()
    with redirect_stdout(buf):
        code, secs = _timed(lambda: cli_main(["verify", "counterexample", "--n", "12", "--p", "6"]))
    r = harness.verify_counterexample(12, 6)
    v2, v3 = r.details["vol_avg2"], r.details["vol_avg3"]
    ok = (code == 0 and v2 == Q(1, 4096) and v3 == Q(127, 531441) and v3 < v2
          and r.details["agree"] and secs < 1.0
          and buf.getvalue().startswith("VIOLATION CONFIRMED: 127/531441 < 1/4096"))
    low = [(n, p) for n in range(2, 12) for p in range(1, n)]
    bad = []
    for n, p in low:
        rep = harness.verify_counterexample(n, p)
        if rep.violations or not rep.details["agree"]:
            bad.append((n, p))
    ok = ok and not bad
    _record(1, ok, f"Vol(A(2))={v2}, Vol(A(3))={v3}, cli exit {code} in {secs:.3f}s; "
                   f"{len(low)} pairs with n<=11, {len(bad)} violations")


def test_criterion_02_c_contraction():
    r, secs = _timed(lambda: harness.check_theorem2(trials=200, kmax=4, seed=0, max_points=8))
    ok = r.violations == 0 and r.worst_margin == 0 and secs < 5
    # {0,1} is the first instance; its own margins are all exactly 0
    tight = harness.check_theorem2(trials=0, kmax=4)
    ok = ok and tight.worst_margin == 0 and tight.instances == 1
    _record(2, ok, f"{r.instances} sets, {r.violations} violations, worst margin "
                   f"{r.worst_margin}, {{0,1}} margin {tight.worst_margin}, {secs:.2f}s")


def test_criterion_03_d_contraction():
    r, secs = _timed(lambda: harness.check_theorem3(trials=200, kmax=4, seed=0, max_points=8))
    tight = harness.check_theorem3(trials=0, kmax=4)
    ok = r.violations == 0 and r.worst_margin == 0 and tight.worst_margin == 0 and secs < 5
    _record(3, ok, f"{r.instances} sets, {r.violations} violations, worst margin "
                   f"{r.worst_margin}, {{0,1}} margin {tight.worst_margin}, {secs:.2f}s")


def test_criterion_04_monotonicity():
    r, secs = _timed(lambda: harness.check_1d_monotonicity(trials=200, kmax=6, seed=0))
    ok = r.violations == 0 and r.instances == 200 and secs < 10
    _record(4, ok, f"{r.instances} sets, {r.violations} violations, {secs:.2f}s")


def test_criterion_05_superadditivity_supermodularity():
    def both():
        return (harness.superadditivity_suite(trials=100, seed=0, dims=(2, 3)),
                harness.supermodularity_suite(trials=100, seed=0))

    (sa, sm), secs = _timed(both)
    ok = sa.violations == 0 and sm.violations == 0 and sm.instances == 100 and secs < 10
    _record(5, ok, f"superadditivity {sa.instances} triples / {sa.violations} violations, "
                   f"supermodularity {sm.instances} triples / {sm.violations} violations, "
                   f"{secs:.2f}s")


def test_criterion_06_triple_c():
    r, secs = _timed(lambda: harness.check_triple_c(trials=200, seed=0))
    ok = r.violations == 0 and r.instances == 200 and secs < 5
    _record(6, ok, f"{r.instances} triples, {r.violations} violations, {secs:.2f}s")


def test_criterion_07_rates():
    t, secs = _timed(lambda: harness.rates(points([0, 1]), 32))
    kd = set(t.column("k_d_lo")) | set(t.column("k_d_hi"))
    kc = set(t.column("k_c_lo")) | set(t.column("k_c_hi"))
    ok = t.column("k") == list(range(1, 33)) and kd == {Q(1, 2)} and kc == {1} and secs < 1
    _record(7, ok, f"k*d values {sorted(map(str, kd))}, k*c values {sorted(map(str, kc))}, "
                   f"{secs:.3f}s")


def test_criterion_08_schneider_bisection():
    t0 = time.perf_counter()
    tri = schneider_c(points([(0, 0), (1, 0), (0, 1)]), DEFAULT_TOL)
    tri_ok = (tri.value_lo <= 2 <= tri.value_hi and tri.value_hi - tri.value_lo <= Q(1, 2 ** 20))
    mismatches = 0
    for i in range(100):
        rep = POINTS if i % 2 == 0 else INTERVALS
        a = random_set(1, rep, 1 + i % 8, 8000 + i)
        r = schneider_c_1d_bisection(a, DEFAULT_TOL)
        if not (r.exact and r.value == c_1d(a)):
            mismatches += 1
    secs = time.perf_counter() - t0
    ok = tri_ok and mismatches == 0 and secs < 30
    _record(8, ok, f"triangle c in [{tri.value_lo}, {tri.value_hi}], "
                   f"{mismatches}/100 bisection mismatches, {secs:.2f}s")


def test_criterion_09_gallery():
    r, secs = _timed(harness.check_gallery)
    rows = r.details
    grid_delta = [row["delta"] for row in rows["finite_grid"]]
    tp_delta = [row["delta"] for row in rows["three_point"]]
    ok = r.violations == 0 and secs < 10 and grid_delta == [1, 1, 1]
    floors = rows["three_point_floors"]
    _record(9, ok, f"{r.instances} assertions, {r.violations} violations; grid delta "
                   f"{[str(x) for x in grid_delta]}, three_point delta "
                   f"{[str(x) for x in tp_delta]}, c_lo floor {floors['c_lo_floor']}, "
                   f"{secs:.2f}s")


def _subset_oracle(bxs):
    total = Q(0)
    for r in range(1, len(bxs) + 1):
        for sub in itertools.combinations(bxs, r):
            lo = [max(c) for c in zip(*(b.lo for b in sub))]
            hi = [min(c) for c in zip(*(b.hi for b in sub))]
            vol = Q(1)
            for a, b in zip(lo, hi):
                vol *= max(Q(0), b - a)
            total += (-1) ** (r + 1) * vol
    return total


def _grid_oracle(ivs, cells):
    """Measure of the union counted on midpoints of a uniform grid over [0, 8]."""
    h = Q(8, cells)
    hits = 0
    for i in range(cells):
        x = (i + Q(1, 2)) * h
        if any(iv.lo <= x <= iv.hi for iv in ivs):
            hits += 1
    return hits * h, h


def test_criterion_10_oracles():
    t0 = time.perf_counter()
    rng = random.Random(10)
    box_bad = 0
    for _ in range(100):
        n, m = rng.randint(1, 4), rng.randint(1, 6)
        bxs = []
        for _ in range(m):
            lo = [Q(rng.randint(0, 24), rng.randint(1, 6)) for _ in range(n)]
            side = [Q(rng.randint(0, 12), rng.randint(1, 6)) for _ in range(n)]
            bxs.append(AxisBox(tuple(lo), tuple(a + s for a, s in zip(lo, side))))
        if box_union_volume(bxs) != _subset_oracle(bxs):
            box_bad += 1
    iv_bad = 0
    cells = 4096
    for _ in range(100):
        ivs = []
        for _ in range(rng.randint(1, 8)):
            q = rng.randint(1, 64)
            lo = Q(rng.randint(0, 4 * q), q)
            ivs.append(Interval(lo, lo + Q(rng.randint(0, 2 * q), q)))
        exact = interval_union_measure(ivs)
        approx, h = _grid_oracle(ivs, cells)
        # each maximal piece of the union can be off by at most one cell per end
        if abs(exact - approx) > 2 * len(ivs) * h:
            iv_bad += 1
    secs = time.perf_counter() - t0
    ok = box_bad == 0 and iv_bad == 0 and secs < 10
    _record(10, ok, f"box union {100 - box_bad}/100 exact matches, interval measure "
                    f"{100 - iv_bad}/100 within grid resolution 1/{cells // 8}, {secs:.2f}s")


if __name__ == "__main__":
    import sys

    failed = 0
    for name, fn in sorted(globals().items()):
        if name.startswith("test_criterion_"):
            try:
                fn()
            except AssertionError:
                failed += 1
    sys.exit(1 if failed else 0)
