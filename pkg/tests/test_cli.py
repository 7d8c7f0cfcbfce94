import csv
import json

import pytest

from warmcg import __version__
from warmcg.cli import main


@pytest.fixture
def toy_file(tmp_path):
    path = tmp_path / "toy.jsonl"
    assert main(["gen-toy", "--out", str(path)]) == 0
    return path


def test_version(capsys):
    assert main(["--version"]) == 0
    assert capsys.readouterr().out.strip() == f"warmcg {__version__} (format 1)"


def test_usage_errors(capsys):
    assert main(["bogus"]) == 2
    assert main(["gen-toy", "--out", "x", "--frobnicate"]) == 2
    assert "usage" in capsys.readouterr().err


def test_solve(toy_file, capsys):
    assert main(["solve", "--dataset", str(toy_file), "--name", "toy-test-b1.3"]) == 0
    rec = json.loads(capsys.readouterr().out)
    assert rec["objective"] == pytest.approx(-0.5)
    assert rec["solution"] == pytest.approx([0.5, 1.0])
    assert main(["solve", "--dataset", str(toy_file), "--name", "nope"]) == 1


def test_benchmark_toy_s_learner(toy_file, tmp_path, capsys):
    out, summary = tmp_path / "m.csv", tmp_path / "s.json"
    code = main(["benchmark", "--dataset", str(toy_file), "--method", "s-learner", "--k", "1",
                 "--out", str(out), "--summary", str(summary)])
    assert code == 0
    (group,) = json.loads(summary.read_text())["groups"]
    assert group["P1"] == 100.0
    with open(out) as fh:
        assert len(list(csv.DictReader(fh))) == 4


def test_identify_predict_and_corrupted_sets(toy_file, tmp_path, capsys):
    sets = tmp_path / "sets.jsonl"
    assert main(["identify", "--in", str(toy_file), "--out", str(sets)]) == 0
    recs = [json.loads(l) for l in sets.read_text().splitlines()]
    assert recs[0] == {"name": "toy-b1", "B": [2], "S": [1, 2], "objective": -0.5}

    assert main(["predict", "--sets", str(sets), "--dataset", str(toy_file), "--k", "1",
                 "--query", "toy-test-b1.3"]) == 0
    assert json.loads(capsys.readouterr().out)["predicted"] == [1, 2]

    recs[0]["objective"] = 3.0
    sets.write_text("".join(json.dumps(r) + "\n" for r in recs))
    code = main(["benchmark", "--dataset", str(toy_file), "--method", "s-learner", "--k", "1",
                 "--sets", str(sets), "--out", str(tmp_path / "m.csv")])
    assert code == 1
    assert "ObjectiveMismatchError" in capsys.readouterr().err


def test_report(toy_file, tmp_path, capsys):
    out = tmp_path / "m.csv"
    main(["benchmark", "--dataset", str(toy_file), "--method", "cg,b-learner", "--k", "1,2",
          "--out", str(out)])
    capsys.readouterr()
    assert main(["report", "--in", str(out), "--out", str(tmp_path / "r.json")]) == 0
    lines = [json.loads(l) for l in capsys.readouterr().out.splitlines()]
    assert [(l["method"], l["k"]) for l in lines] == [("cg", None), ("b-learner", 1),
                                                      ("b-learner", 2)]


def test_config_defaults_and_flag_override(toy_file, tmp_path, capsys):
    cfg = tmp_path / "cfg.json"
    cfg.write_text(json.dumps({"dataset": str(toy_file), "method": "b-learner", "k": "1",
                               "out": str(tmp_path / "m.csv")}))
    assert main(["--config", str(cfg), "benchmark", "--method", "s-learner"]) == 0
    (line,) = [json.loads(l) for l in capsys.readouterr().out.splitlines()]
    assert line["method"] == "s-learner" and line["P1"] == 100.0
    assert main(["--config", str(tmp_path / "missing.json"), "gen-toy", "--out", "x"]) == 2


def test_generators_are_reproducible(tmp_path):
    a, b = tmp_path / "a.jsonl", tmp_path / "b.jsonl"
    for p in (a, b):
        assert main(["gen-uc", "--n", "4", "--m", "5", "--T", "3", "--seed", "5",
                     "--out", str(p)]) == 0
    assert a.read_bytes() == b.read_bytes()
    assert main(["gen-uc", "--n", "6", "--m", "2", "--T", "1", "--out", str(a)]) == 1
