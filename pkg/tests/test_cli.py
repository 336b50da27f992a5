import json
import subprocess
import sys

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from minklab.cli import main
from minklab.exact import Q
from minklab.serialize import SetFormatError, dumps_set, loads_set, set_from_dict, set_to_dict
from minklab.sets import (BOXES, INTERVALS, POINTS, CrossSpec, cross_build, gallery, points,
                          random_set)


@settings(max_examples=50)
@given(st.sampled_from([(1, POINTS), (2, POINTS), (1, INTERVALS), (2, BOXES), (4, BOXES)]),
       st.integers(1, 6), st.integers(0, 2 ** 32))
def test_roundtrip(kind, size, seed):
    a = random_set(kind[0], kind[1], size, seed)
    assert loads_set(dumps_set(a)) == a


def test_roundtrip_keeps_hull_hint():
    a = cross_build(CrossSpec(4, 2))
    b = loads_set(dumps_set(a))
    assert b == a and b.hull_volume == a.hull_volume


@pytest.mark.parametrize("text, fragment", [
    ('{"dim": 1, "rep": "points",\n "data": [[0.5]]}', "line 2: decimal literal 0.5"),
    ('{"dim": 1, "rep": "points",\n "data": [["1/0"]]}', "line 2"),
    ('{"dim": 1, "rep": "points", "data": [["x"]', "malformed JSON"),
    ('{"dim": 1, "rep": "blobs", "data": [["1"]]}', "rep must be one of"),
    ('{"dim": 2, "rep": "intervals", "data": [["0", "1"]]}', "intervals require dim 1"),
    ('{"dim": 2, "rep": "boxes", "data": [{"lo": ["1", "0"], "hi": ["0", "1"]}]}', "data[0]"),
    ('{"dim": 1, "rep": "points", "data": []}', "nonempty"),
])
def test_parse_errors(text, fragment):
    with pytest.raises(SetFormatError, match=None) as exc:
        loads_set(text)
    assert fragment in str(exc.value)


def test_dict_forms():
    d = set_to_dict(points([(0, Q(1, 2))]))
    assert d == {"dim": 2, "rep": "points", "data": [["0", "1/2"]]}
    assert set_from_dict(d) == points([(0, Q(1, 2))])


# -- commands -----------------------------------------------------------------------


@pytest.fixture
def two_point(tmp_path):
    p = tmp_path / "two.json"
    p.write_text(dumps_set(points([0, 1])))
    return str(p)


def run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def test_avg(capsys, tmp_path, two_point):
    code, out, err = run(capsys, "avg", two_point, "--k", "4")
    assert code == 0 and "5 points" in err
    assert loads_set(out) == points([0, Q(1, 4), Q(1, 2), Q(3, 4), 1])
    cross = tmp_path / "cross.json"
    cross.write_text(dumps_set(cross_build(CrossSpec(2, 1))))
    code, out, _ = run(capsys, "avg", str(cross), "--k", "2")
    assert code == 0 and len(loads_set(out)) == 3
    box = tmp_path / "box.json"
    box.write_text('{"dim": 2, "rep": "boxes", "data": [{"lo": ["0", "0"], "hi": ["1", "2"]}]}')
    code, out, _ = run(capsys, "avg", str(box), "--k", "5")
    assert loads_set(out) == loads_set(box.read_text())


def test_avg_budget(capsys, tmp_path):
    p = tmp_path / "pts.json"
    p.write_text(dumps_set(random_set(2, BOXES, 4, 1)))
    code, _, err = run(capsys, "avg", str(p), "--k", "4", "--budget", "10")
    assert code == 2 and "budget" in err


def test_measure(capsys, tmp_path, two_point):
    code, out, _ = run(capsys, "measure", two_point, "--which", "all")
    res = json.loads(out)["results"]
    assert code == 0
    assert (res["delta"]["value_lo"], res["d"]["value_lo"], res["c"]["value_lo"]) == ("1", "1/2", "1")
    tri = tmp_path / "tri.json"
    tri.write_text(dumps_set(points([(0, 0), (1, 0), (0, 1)])))
    code, out, _ = run(capsys, "measure", str(tri), "--which", "c")
    c = json.loads(out)["results"]["c"]
    assert Q(c["value_hi"]) == 2 and 2 - Q(c["value_lo"]) <= Q(1, 2 ** 20)
    box = tmp_path / "box.json"
    box.write_text('{"dim": 3, "rep": "boxes", "data": [{"lo": ["0", "0", "0"], "hi": ["1", "1", "1"]}]}')
    code, out, _ = run(capsys, "measure", str(box))
    assert all(r["value_hi"] == "0" for r in json.loads(out)["results"].values())


def test_measure_bad_input(capsys, tmp_path):
    p = tmp_path / "bad.json"
    p.write_text('{"dim": 1, "rep": "points",\n"data": [["1/2"], [0.25]]}')
    code, _, err = run(capsys, "measure", str(p))
    assert code == 2 and "line 2" in err and "0.25" in err
    code, _, err = run(capsys, "measure", str(tmp_path / "missing.json"))
    assert code == 2 and "cannot read" in err


def test_measure_unsupported(capsys, monkeypatch, two_point):
    from minklab import cli
    from minklab.measures import UnsupportedMeasure

    def boom(*a, **k):
        raise UnsupportedMeasure("no engine for this combination")

    monkeypatch.setattr(cli, "measure_all", boom)
    code, _, err = run(capsys, "measure", two_point)
    assert code == 2 and "no engine" in err


def test_measure_deterministic(capsys, tmp_path):
    p = tmp_path / "tet.json"
    p.write_text(dumps_set(points([(0, 0, 0), (1, 0, 0), (0, 1, 0), (0, 0, 1)])))
    outs = []
    for i in range(2):
        out = tmp_path / f"m{i}.json"
        assert run(capsys, "measure", str(p), "--seed", "9", "--out", str(out))[0] == 0
        outs.append(out.read_bytes())
        assert json.loads((tmp_path / f"m{i}.json.meta.json").read_text())["runtime_ms"] >= 0
    assert outs[0] == outs[1]
    assert json.loads(outs[0])["seed"] == 9


def test_verify_counterexample(capsys):
    code, out, _ = run(capsys, "verify", "counterexample", "--n", "12", "--p", "6")
    assert code == 0 and out.splitlines()[0] == "VIOLATION CONFIRMED: 127/531441 < 1/4096"
    code, out, _ = run(capsys, "verify", "counterexample", "--n", "5", "--p", "2")
    assert code == 0 and out.splitlines()[0] == "no violation (construction insufficient below n=12)"
    code, _, err = run(capsys, "verify", "counterexample", "--n", "12")
    assert code == 2 and "--p" in err
    with pytest.raises(SystemExit) as exc:
        main(["verify", "thm9"])
    assert exc.value.code == 2


def test_verify_exit_codes(capsys, monkeypatch):
    from minklab import harness

    code, out, _ = run(capsys, "verify", "thm2", "--trials", "200", "--kmax", "4", "--seed", "1")
    assert code == 0 and "0 violations" in out
    real = harness.check_triple_c

    def broken(*a, **k):
        r = real(5, 0)
        r.record(Q(-1), lambda: {"fake": True})
        return r

    monkeypatch.setattr(harness, "check_triple_c", broken)
    assert run(capsys, "verify", "triple-c")[0] == 1


def test_verify_json_deterministic(capsys, tmp_path):
    texts = []
    for i in range(2):
        out = tmp_path / f"r{i}.json"
        code, _, _ = run(capsys, "verify", "mono1d", "--trials", "20", "--seed", "3", "--out", str(out))
        assert code == 0
        texts.append(out.read_bytes())
    assert texts[0] == texts[1]
    doc = json.loads(texts[0])
    assert doc["seed"] == 3 and "runtime_ms" not in doc


def test_rates(capsys, tmp_path, two_point):
    code, out, _ = run(capsys, "rates", "--set", two_point, "--kmax", "10")
    rows = [line.split(",") for line in out.splitlines()]
    header = rows[0]
    assert code == 0 and len(rows) == 11
    kd = header.index("k_d_lo")
    assert {r[kd] for r in rows[1:]} == {"1/2"}
    box = tmp_path / "box.json"
    box.write_text('{"dim": 1, "rep": "intervals", "data": [["0", "2"]]}')
    code, out, _ = run(capsys, "rates", "--set", str(box), "--kmax", "3")
    for r in out.splitlines()[1:]:
        assert all(v in ("0", "") for v in r.split(",")[1:])


def test_search(capsys):
    code, out, _ = run(capsys, "search", "--dim", "2", "--trials", "100", "--seed", "7")
    assert code == 0 and out.startswith("no witness found in 100 trials (")
    assert out.rstrip().endswith("skipped by budget)")
    with pytest.raises(SystemExit) as exc:
        main(["search", "--dim", "12"])
    assert exc.value.code == 2


def test_gallery_command(capsys):
    code, out, _ = run(capsys, "gallery", "three_point", "1/8")
    assert code == 0 and loads_set(out) == gallery("three_point", Q(1, 8))
    code, _, err = run(capsys, "gallery", "finite_grid", "2/3")
    assert code == 2 and "1/N" in err


def test_bad_tolerance():
    with pytest.raises(SystemExit):
        main(["measure", "x.json", "--tol", "0"])
    with pytest.raises(SystemExit):
        main(["measure", "x.json", "--tol", "0.001"])


def test_budget_env(capsys, tmp_path, monkeypatch):
    monkeypatch.setenv("MINKLAB_BUDGET", "3")
    code, out, _ = run(capsys, "search", "--dim", "2", "--trials", "10", "--seed", "7")
    assert code == 0 and "0 skipped" not in out


def test_module_entry_point(two_point):
    proc = subprocess.run([sys.executable, "-m", "minklab", "avg", two_point, "--k", "2"],
                          capture_output=True, text=True)
    assert proc.returncode == 0 and "3 points" in proc.stderr
