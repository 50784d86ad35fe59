import json

import pytest

from qlens.cli import load_settings, main


def run(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


def test_invariants(capsys):
    code, out, _ = run(capsys, "invariants", "5", "1", "2", "3", "--json")
    d = json.loads(out)
    assert code == 0 and d["gcd_chain"] == [1, 1] and len(d["wbar"]) == 3


def test_decide_d3(capsys):
    code, out, _ = run(capsys, "decide", "5", "1", "3", "--", "2", "3")
    d = json.loads(out)
    assert code == 0 and d["equivalent"] and d["scope"] == "d=3"


def test_decide_general(capsys):
    code, out, _ = run(capsys, "decide", "5", "1", "2", "3", "1", "--", "1", "3", "2", "1")
    d = json.loads(out)
    assert d["scope"] == "conditions only" and d["report"]["cond_vii"]


def test_solve_h_extended(capsys):
    code, out, _ = run(capsys, "solve-h", "5", "1", "3", "4", "1", "2", "3", "--", "1", "4", "3", "1", "2", "4",
                       "--extended", "--dq1", "--budget", "2")
    d = json.loads(out)
    assert code == 0 and d["status"] == "found" and d["dq1_witness"]


def test_pattern(capsys):
    code, out, _ = run(capsys, "pattern", "5", "1", "2", "3", "1", "--", "1", "3", "2", "1")
    assert json.loads(out) == {"pattern": "1", "in_language": True}


def test_export_dot(capsys):
    code, out, _ = run(capsys, "export-dot", "8", "1", "3", "--graph", "hasse")
    assert code == 0 and out.count("->") == 4


def test_search_outputs(capsys, tmp_path):
    jl, cs = tmp_path / "out.jsonl", tmp_path / "out.csv"
    code, _, _ = run(capsys, "search", "8", "3", "--jsonl", str(jl), "--csv", str(cs))
    assert code == 0
    rows = [json.loads(x) for x in jl.read_text().splitlines()]
    assert len(rows) == 4
    assert len(cs.read_text().splitlines()) == 5


def test_precondition_exit_code(capsys):
    code, _, err = run(capsys, "invariants", "8", "1", "2")
    assert code == 2 and "not a unit" in err
    code, _, err = run(capsys, "decide", "5", "1", "2")
    assert code == 2


def test_settings_precedence(tmp_path, capsys):
    cfg = tmp_path / "q.conf"
    cfg.write_text("# defaults\nbudget = 7\nworkers=3\n")
    assert load_settings(str(cfg), env={})["budget"] == 7
    s = load_settings(str(cfg), env={"QLENS_BUDGET": "9"})
    assert s["budget"] == 9 and s["workers"] == 3
    code, out, _ = run(capsys, "--config", str(cfg), "search", "5", "2", "--budget", "4")
    assert json.loads(out.splitlines()[-1]) == {"truncated": True, "evaluated": 4}


def test_bad_config(tmp_path, capsys):
    cfg = tmp_path / "q.conf"
    cfg.write_text("colour = blue\n")
    code, _, err = run(capsys, "--config", str(cfg), "invariants", "5", "1", "2")
    assert code == 2 and "expected one of" in err
