import csv
import json

import numpy as np
import pytest

from rootbranch import EntireFunction, fixture_names, parse_expression
from rootbranch.cli import EXIT_CODES, main


def read_csv(path):
    with open(path, newline="") as fh:
        return list(csv.DictReader(fh))


def test_list_fixtures(capsys):
    assert main(["--list-fixtures"]) == 0
    out = capsys.readouterr().out
    names = [line.split()[0] for line in out.strip().splitlines()]
    assert names == sorted(names)
    assert set(names) == set(fixture_names())


def test_fixture_run_writes_outputs(tmp_path):
    code = main(["--fixture", "remark-exp", "--out", str(tmp_path)])
    assert code == 0
    rows = read_csv(tmp_path / "branch.csv")
    assert len(rows) >= 2
    assert set(rows[0]) == {"segment", "arc", "edge", "t", "re_w", "im_w", "residual"}
    # w = 0 along the whole branch
    assert max(abs(float(r["re_w"])) for r in rows) < 1e-10
    summary = json.loads((tmp_path / "summary.json").read_text())
    assert summary["status"] == "Completed"
    assert summary["output_samples"] == len(rows)


def test_exit_code_matches_status(tmp_path):
    code = main(["--fixture", "counterexample-x2z-x", "--out", str(tmp_path)])
    assert code == EXIT_CODES[__import__("rootbranch").Status.ASYMPTOTIC_BLOWUP] == 2
    summary = json.loads((tmp_path / "summary.json").read_text())
    assert summary["status"] == "AsymptoticBlowup"


def test_problem_file_round_trip(tmp_path):
    doc = {
        "function": "pow(z, 2) - x",
        "domain": {"kind": "interval"},
        "seed": {"x": 0.25, "z": [0.5, 0.0]},
        "config": {"max_steps": 4000},
    }
    pf = tmp_path / "problem.json"
    pf.write_text(json.dumps(doc))
    out = tmp_path / "run"
    assert main(["--problem", str(pf), "--out", str(out), "--samples", "50"]) == 0
    rows = read_csv(out / "branch.csv")
    assert len(rows) == 50
    f = EntireFunction(parse_expression(doc["function"]))
    # 17 significant digits make the CSV loss-free for float64; seed 0.25
    # sweeps left (segment 0) and right (segment 1)
    for r in rows:
        w = complex(float(r["re_w"]), float(r["im_w"]))
        res = float(r["residual"])
        arc = float(r["arc"])
        x = 0.25 - arc if r["segment"] == "0" else 0.25 + arc
        assert abs(f.eval(x, w)) <= max(2 * res, 1e-12)
        if r["edge"] != "-":
            assert float(r["t"]) == pytest.approx(x)


def test_csv_deterministic(tmp_path):
    a, b = tmp_path / "a", tmp_path / "b"
    assert main(["--fixture", "monic-sqrt", "--out", str(a)]) == 0
    assert main(["--fixture", "monic-sqrt", "--out", str(b)]) == 0
    assert (a / "branch.csv").read_bytes() == (b / "branch.csv").read_bytes()
    # default density gives 1000+ rows, all meeting the residual contract
    rows = read_csv(a / "branch.csv")
    assert len(rows) >= 1000
    assert max(float(r["residual"]) for r in rows) <= 1e-8


def test_tree_fixture_csv_has_edges(tmp_path):
    assert main(["--fixture", "monic-cubic-ytree", "--out", str(tmp_path)]) == 0
    rows = read_csv(tmp_path / "branch.csv")
    assert {r["edge"] for r in rows} >= {"0", "1", "2"}
    segs = sorted({int(r["segment"]) for r in rows})
    assert segs == [0, 1, 2]


def test_malformed_problem_file_fails_cleanly(tmp_path, capsys):
    pf = tmp_path / "bad.json"
    pf.write_text('{"function": "z -", "domain": {"kind": "interval"}')
    assert main(["--problem", str(pf), "--out", str(tmp_path)]) == 1
    err = capsys.readouterr().err
    assert err.strip()


def test_invalid_tree_problem_fails_cleanly(tmp_path, capsys):
    doc = {
        "function": "z - x",
        "domain": {
            "kind": "tree",
            "vertices": ["a", "b", "c"],
            "edges": [["a", "b", 1.0], ["b", "c", 1.0], ["c", "a", 1.0]],
        },
        "seed": {"point": {"vertex": "a"}, "z": [0.0, 0.0]},
    }
    pf = tmp_path / "cyclic.json"
    pf.write_text(json.dumps(doc))
    assert main(["--problem", str(pf), "--out", str(tmp_path)]) == 1
    assert capsys.readouterr().err.strip()


def test_unknown_fixture_fails_cleanly(tmp_path, capsys):
    assert main(["--fixture", "no-such-fixture", "--out", str(tmp_path)]) == 1
    assert capsys.readouterr().err.strip()


def test_config_override_in_fixture_problem(tmp_path):
    pf = tmp_path / "p.json"
    pf.write_text(json.dumps({"fixture": "remark-exp", "config": {"max_steps": 200}}))
    assert main(["--problem", str(pf), "--out", str(tmp_path)]) == 0
    summary = json.loads((tmp_path / "summary.json").read_text())
    assert summary["config"]["max_steps"] == 200


def test_requires_a_source(capsys):
    assert main([]) == 1
    assert capsys.readouterr().err.strip()
