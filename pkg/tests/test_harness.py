import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from minklab.exact import Q
from minklab.geom import AxisBox, Interval
from minklab.harness import (RATE_COLUMNS, Report, check_1d_monotonicity, check_gallery,
                             check_superadditivity, check_supermodularity, check_theorem2,
                             check_theorem3, check_triple_c, counterexample_closed_form,
                             counterexample_table, equal_sets_reduction, rates,
                             search_violation, superadditivity_margin, supermodularity_suite,
                             verify_counterexample)
from minklab.measures import c_1d
from minklab.sets import INTERVALS, average, boxes, intervals, minkowski_sum, points, random_set

I = lambda a, b: Interval(Q(a), Q(b))
GAPPY = intervals([I(0, Q(1, 4)), I(Q(3, 4), 1)])


def B(lo, hi):
    return AxisBox(tuple(Q(c) for c in lo), tuple(Q(c) for c in hi))


def test_report_invariants():
    r = Report("x")
    r.record(Q(1))
    r.record(Q(0))
    assert r.ok and r.worst_margin == 0 and not r.witnesses
    r.record(Q(-1, 3), lambda: {"w": 1})
    assert r.violations == 1 and r.witnesses == [{"w": 1}] and not r.ok
    assert "runtime_ms" not in r.to_dict()


# -- counterexample ------------------------------------------------------------------


def test_counterexample_examples():
    r = verify_counterexample(12, 6)
    assert r.details["vol_avg2"] == Q(1, 4096)
    assert r.details["vol_avg3"] == Q(127, 531441)
    assert r.violations == 1 and r.details["agree"]
    assert r.message == "VIOLATION CONFIRMED: 127/531441 < 1/4096"
    assert 127 * 4096 == 520192 < 531441 == 3 ** 12
    r = verify_counterexample(2, 1)
    assert r.violations == 0 and r.details["calcul_lhs"] == 3
    assert r.details["calcul_rhs"] == Q(9, 4)
    r = verify_counterexample(11, 6)
    assert r.violations == 0 and r.details["calcul_lhs"] == 95
    assert r.details["calcul_rhs"] == Q(177147, 2048)
    assert r.message == "no violation (construction insufficient below n=12)"
    with pytest.raises(ValueError):
        verify_counterexample(5, 5)


def test_counterexample_table_agrees():
    rows = counterexample_table(14)
    assert len(rows) == sum(n - 1 for n in range(2, 15))
    assert all(r["agree"] for r in rows)
    for r in rows:
        lhs = 2 ** r["p"] + 2 ** (r["n"] - r["p"]) - 1
        assert r["violation"] == (Q(lhs) < Q(3, 2) ** r["n"])
    violating = {(r["n"], r["p"]) for r in rows if r["violation"]}
    assert min(n for n, _ in violating) == 12
    assert (12, 6) in violating and (13, 7) in violating and (14, 7) in violating


def test_closed_form_volumes():
    cf = counterexample_closed_form(12, 6)
    assert cf["vol_sum3"] == 127 and not cf["calcul_holds"]


# -- contraction of c and d under averaging -------------------------------------------


def test_c_contraction_equality_and_suite():
    for k in range(1, 6):
        assert c_1d(average(points([0, 1]), k)) == Q(1, k)
    r = check_theorem2(trials=40, kmax=4, seed=1)
    assert r.violations == 0 and r.worst_margin == 0
    r = check_theorem2(trials=0, kmax=3)
    assert r.instances == 1 and r.worst_margin == 0  # {0,1} alone is tight


def test_c_contraction_planar_conservative():
    r = check_theorem2(trials=3, kmax=2, seed=2, dim=2, max_points=4, tol=Q(1, 2 ** 10))
    assert r.violations == 0


def test_d_contraction_suite():
    r = check_theorem3(trials=40, kmax=4, seed=3, planar_trials=3)
    assert r.violations == 0 and r.worst_margin == 0
    assert r.details["planar_comparisons"] > 0


def test_monotonicity_examples():
    vols = [average(GAPPY, k).volume() for k in (1, 2, 3)]
    assert vols == [Q(1, 2), Q(3, 4), Q(1)]
    r = check_1d_monotonicity(sets=[GAPPY, intervals([I(0, 1)]), points([0, 1])])
    assert r.violations == 0 and r.instances == 3
    r = check_1d_monotonicity(trials=50, seed=4)
    assert r.violations == 0


# -- discussion inequalities ------------------------------------------------------------


def test_superadditivity_examples():
    # 2 Vol(3A) >= 3 Vol(2A) for the gappy set: 2*3 >= 3*(3/2)
    assert minkowski_sum(minkowski_sum(GAPPY, GAPPY), GAPPY).volume() == 3
    assert superadditivity_margin([GAPPY] * 3) == 3 - Q(3, 2) * 3 / 2
    bs = [boxes([B((0, 0), (1, 2))]), boxes([B((0, 0), (3, 1))]), boxes([B((0, 0), (1, 1))])]
    # sums of boxes are boxes: (5*4) - (4*3 + 2*3 + 4*2)/2
    assert superadditivity_margin(bs) == 20 - Q(26, 2)
    # k = 2 is Brunn-Minkowski in 1-D
    a, b = intervals([I(0, 1), I(3, 4)]), intervals([I(0, Q(1, 2))])
    assert superadditivity_margin([a, b]) >= 0
    assert check_superadditivity([a, b, GAPPY]).violations == 0


@settings(max_examples=25)
@given(st.integers(0, 2 ** 32), st.integers(2, 4))
def test_equal_sets_reduction_matches_monotonicity(seed, k):
    a = random_set(1, INTERVALS, 3, seed)
    scaled_margin, step = equal_sets_reduction(a, k)
    assert scaled_margin == step
    mono = check_1d_monotonicity(kmax=k, sets=[a])
    assert (step >= 0) == mono.ok


def test_supermodularity_examples():
    u = B((0, 0), (1, 1))
    assert check_supermodularity(u, u, u).worst_margin == 9 + 1 - 4 - 4
    pt = B((5, 5), (5, 5))
    b2, b3 = B((0, 0), (1, 2)), B((0, 0), (3, 1))
    # with a point for B1 this is Vol(B2+B3) >= Vol(B2) + Vol(B3)
    assert check_supermodularity(pt, b2, b3).worst_margin == 4 * 3 - 2 - 3
    assert supermodularity_suite(trials=30, seed=5).violations == 0


def test_triple_c_example():
    two = points([0, 1])
    assert c_1d(minkowski_sum(minkowski_sum(two, two), two)) == Q(1, 3)
    assert c_1d(minkowski_sum(two, two)) == Q(1, 2)
    assert check_triple_c(trials=50, seed=6).violations == 0


# -- gallery, rates, search ------------------------------------------------------------------


def test_gallery_report():
    r = check_gallery()
    assert r.violations == 0, r.witnesses
    grid = r.details["finite_grid"]
    assert [row["delta"] for row in grid] == [1, 1, 1]
    assert [row["d_square"] for row in grid] == [Q(1, 32), Q(1, 128), Q(1, 512)]
    tp = r.details["three_point"]
    assert [row["delta"] for row in tp] == [Q(1, 8), Q(1, 16), Q(1, 32)]


def test_rates_two_point():
    t = rates(points([0, 1]), 12)
    assert t.column("k") == list(range(1, 13))
    assert set(t.column("k_d_lo")) == set(t.column("k_d_hi")) == {Q(1, 2)}
    assert set(t.column("k_c_lo")) == set(t.column("k_c_hi")) == {1}
    header = t.to_csv().splitlines()[0]
    assert header.split(",") == RATE_COLUMNS


def test_rates_convex_and_gappy():
    t = rates(intervals([I(0, 3)]), 4)
    for col in RATE_COLUMNS[1:]:
        assert all(v == 0 for v in t.column(col) if v is not None)
    t = rates(GAPPY, 5)
    assert t.column("delta_lo")[:2] == [Q(1, 2), Q(1, 4)]
    assert all(v == 0 for v in t.column("delta_hi")[2:])


def test_search():
    r = search_violation(2, trials=30, seed=7)
    assert r.violations == 0
    assert r.message == f"no witness found in 30 trials ({r.skipped} skipped by budget)"
    r = search_violation(2, trials=10, seed=7, budget=3)
    assert r.skipped > 0 and r.instances + r.skipped == 10
    with pytest.raises(ValueError, match="use verify_counterexample for n >= 12"):
        search_violation(12)
    with pytest.raises(ValueError):
        search_violation(1)


def test_search_convex_single_box():
    # a single box never witnesses a decrease
    r = search_violation(3, trials=20, seed=8, max_boxes=1)
    assert r.violations == 0 and r.worst_margin == 0
