import csv
import io
import json

import pytest

from fraisselab.cli import ExperimentReport, emit_report, load_report, load_structure, run
from fraisselab.core import hypergraph


def invoke(*argv):
    out, err = io.StringIO(), io.StringIO()
    code = run(list(argv), stdout=out, stderr=err)
    return code, out.getvalue(), err.getvalue()


def test_pestov_example():
    code, out, _ = invoke("pestov", "--class", "set", "--n", "2", "--k", "1")
    assert code == 0
    report = json.loads(out)
    assert report["counters"]["N"] == 4
    assert report["counters"]["minimal_bound"] == "384"
    assert report["counters"]["dense_bound"] == "4096"
    assert [row["crossing_flag"] for row in report["rows"]] == [0, 0, 1]


def test_pestov_without_crossing_fails_with_reason():
    code, out, _ = invoke("pestov", "--class", "set", "--n", "6", "--k", "6")
    assert code == 1
    assert "reason" in json.loads(out)["witnesses"]


def test_extend_example():
    code, out, _ = invoke("extend", "--class", "krfree", "--r", "3", "--host", "c5", "--template", "path3")
    assert code == 0
    report = json.loads(out)
    assert report["counters"]["D"] == 11
    assert report["verdicts"] == {"size_formula": True, "verified": True}
    assert len(report["witnesses"]["D"]["attachments"]) == 6


def test_extend_hypergraph_class():
    code, out, _ = invoke("extend", "--class", "hypergraph:2", "--host", "k3", "--template", "path3")
    assert code == 0 and json.loads(out)["counters"]["D"] == 9


def test_census_is_byte_identical():
    argv = ("census", "--universe", "5", "--n", "3", "--m", "2", "--ell", "4", "--k", "1", "--seed", "7")
    first, second = invoke(*argv), invoke(*argv)
    assert first[0] == 0
    assert first[1] == second[1]
    assert json.loads(first[1])["counters"]["total"] == 1024


def test_timing_is_opt_in():
    _, out, _ = invoke("orders", "--o0", "0,1,2", "--o1", "2,1,0")
    assert "duration" not in json.loads(out)
    _, out, _ = invoke("orders", "--o0", "0,1,2", "--o1", "2,1,0", "--timing")
    assert json.loads(out)["duration"] >= 0


def test_ramsey_failure_exit_code_carries_witness():
    code, out, _ = invoke("thick", "--ramsey", "3", "5")
    assert code == 1
    cells = json.loads(out)["witnesses"]["coloring"]
    assert [len(c) for c in cells] == [5, 5]
    assert invoke("thick", "--ramsey", "3", "6")[0] == 0


def test_invalid_input_exit_codes():
    assert invoke("nonsense")[0] == 2
    assert invoke("pestov", "--bogus-flag")[0] == 2
    code, _, err = invoke("orders", "--A", "2,4,5", "--blocks", "2,3;4,5")
    assert code == 2 and "single vertex" in err
    assert invoke("extend", "--class", "krfree:3", "--host", "k3", "--template", "path3")[0] == 2
    assert invoke("extend", "--host", "nowhere", "--template", "path3")[0] == 2


def test_cost_cap_override(monkeypatch):
    monkeypatch.setenv("FORGE_MAX_COST", "100")
    code, _, err = invoke("census")
    assert code == 2 and "FORGE_MAX_COST" in err
    monkeypatch.setenv("FORGE_MAX_COST", str(2**22))
    assert invoke("census")[0] == 0


def test_csv_columns(tmp_path):
    target = tmp_path / "census.csv"
    assert invoke("census", "--out", str(target))[0] == 0
    rows = list(csv.reader(target.open()))
    assert rows[0] == ["universe", "n", "m", "ell", "k", "total", "near_closed", "closed_count",
                       "clique_free_count", "bound_lhs", "bound_rhs"]
    assert rows[1][5] == "1024"
    target = tmp_path / "pestov.csv"
    assert invoke("pestov", "--out", str(target))[0] == 0
    rows = list(csv.reader(target.open()))
    assert rows[0] == ["class", "m", "n", "k", "N", "minimal_bound", "dense_bound", "crossing_flag"]
    assert rows[-1][4:] == ["4", "384", "4096", "1"]


def test_csv_falls_back_to_key_value_rows(tmp_path):
    target = tmp_path / "emb.csv"
    assert invoke("emb", "--out", str(target))[0] == 0
    rows = list(csv.reader(target.open()))
    assert rows[0] == ["section", "key", "value"]
    assert ["verdicts", "dual_surjective", "true"] in rows


def test_json_out_file(tmp_path):
    target = tmp_path / "r.json"
    assert invoke("closure", "--trials", "5", "--out", str(target), "--format", "json")[0] == 0
    report = load_report(target.read_bytes())
    assert report.experiment == "closure" and report.ok


def test_report_round_trip():
    report = ExperimentReport("x", {"a": 1}, {"ok": True}, {"c": 3}, {"w": [1, 2]}, seed=5,
                              rows=[{"p": 1}], columns=["p"])
    back = load_report(emit_report(report))
    back.duration = report.duration
    assert back == report
    assert emit_report(back) == emit_report(report)


def test_structure_files(tmp_path):
    h = hypergraph(5, 3, [(0, 1, 2), (2, 3, 4)])
    good = tmp_path / "h.json"
    good.write_text(json.dumps(h.to_json()))
    loaded = load_structure(good)
    assert loaded == h and len(loaded.edges) == 2

    dup = tmp_path / "dup.json"
    dup.write_text(json.dumps({"flavor": "graph", "n": 3, "edges": [[0, 1], [1, 2], [0, 1]]}))
    code, _, err = invoke("emb", "--source", str(dup), "--target", "k3")
    assert code == 2 and "[0, 1]" in err

    tri = tmp_path / "tri.json"
    tri.write_text(json.dumps({"flavor": "krfree", "r": 3, "n": 4, "edges": [[0, 1], [1, 2], [0, 2], [2, 3]]}))
    code, _, err = invoke("extend", "--class", "krfree:3", "--host", str(tri), "--template", "path3")
    assert code == 2 and "[0, 1, 2]" in err

    bad = tmp_path / "bad.json"
    bad.write_text("{not json")
    assert invoke("emb", "--source", str(bad), "--target", "k3")[0] == 2


@pytest.mark.parametrize("argv", [
    ("emb",), ("emb", "--m", "1", "--n", "2", "--universe", "3"),
    ("patterns", "--N", "3", "--universe", "5"),
    ("orders", "--A", "2,3,4,5", "--blocks", "2,3;4,5"),
    ("closure", "--trials", "10", "--seed", "4"),
    ("census", "--sample", "--trials", "15", "--seed", "2"),
    ("extend", "--class", "hypergraph:3", "--host", "k4_3", "--template", "pendant3"),
])
def test_every_experiment_reports_success(argv):
    code, out, _ = invoke(*argv)
    assert code == 0
    assert json.loads(out)["experiment"] == argv[0]
