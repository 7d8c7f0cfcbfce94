import json

import numpy as np
import pytest

from warmcg.bench import (CSV_HEADER, ObjectiveMismatchError, RunMetrics, aggregate, prepare,
                          read_metrics, run_pipeline, summarize, write_metrics, write_summary)
from warmcg.instances import SyntheticFamilyConfig, gen_synthetic


@pytest.fixture(scope="module")
def toy_data(toy):
    train, test = toy
    return train + [test]


@pytest.fixture(scope="module")
def toy_offline(toy_data):
    return prepare(toy_data)


def run(name, I, C=3, method="s-learner", k=1):
    return RunMetrics(name, method, k, C, I, 0.1, 1.0, 2.0, -0.5, -0.5, True)


def test_aggregate_examples():
    agg = aggregate([run("a", 1), run("b", 1)])
    assert agg["P1"] == 100.0
    single = aggregate([run("a", 4, C=7)])
    q = single["quantiles"]["I"]
    assert q["min"] == q["median"] == q["max"] == 4
    assert (single["C_min"], single["C_max"]) == (7, 7)
    with pytest.raises(ValueError):
        aggregate([])


def test_delta():
    assert run("a", 1).delta_pct == pytest.approx(55.0)


@pytest.mark.parametrize("method,iters", [("s-learner", 1), ("b-learner", 2)])
def test_toy_pipeline(toy_data, toy_offline, method, iters):
    for k in (1, 2, 3):
        runs, agg = run_pipeline(toy_data, method, k, offline=toy_offline)
        test = runs[-1]
        assert test.instance == "toy-test-b1.3"
        assert test.I == iters
        assert all(r.match and r.objective == pytest.approx(-0.5) for r in runs)
        assert agg["mismatches"] == 0


def test_cg_and_full(toy_data, toy_offline):
    runs, agg = run_pipeline(toy_data, "cg", offline=toy_offline)
    assert all(r.I == 3 and r.k is None for r in runs)
    runs, agg = run_pipeline(toy_data, "full", offline=toy_offline)
    assert agg["P1"] == 100.0 and agg["Delta"] == pytest.approx(100.0)


def test_pipeline_validation(toy_data, toy_offline):
    with pytest.raises(ValueError):
        run_pipeline(toy_data, "oracle", 1, offline=toy_offline)
    with pytest.raises(ValueError):
        run_pipeline(toy_data, "s-learner", len(toy_data), offline=toy_offline)
    with pytest.raises(ValueError):
        run_pipeline(toy_data[:1], "s-learner", 1)


def test_corrupted_sets_detected(toy_data):
    sets = {i.name: {"B": [2], "S": [1, 2], "objective": 7.0} for i in toy_data}
    with pytest.raises(ObjectiveMismatchError):
        prepare(toy_data, sets=sets)


def test_csv_round_trip(tmp_path, toy_data, toy_offline):
    runs, _ = run_pipeline(toy_data, "s-learner", 2, offline=toy_offline)
    path = tmp_path / "m.csv"
    write_metrics(path, runs)
    assert path.read_text().splitlines()[0] == ",".join(CSV_HEADER)
    back = read_metrics(path)
    assert [(r.instance, r.k, r.C, r.I, r.objective) for r in back] == \
           [(r.instance, r.k, r.C, r.I, r.objective) for r in runs]
    rows = write_summary(tmp_path / "s.json", back)
    assert json.loads((tmp_path / "s.json").read_text())["groups"][0]["P1"] == rows[0]["P1"]


def test_summary_groups_in_order():
    runs = [run("a", 1, k=1), run("a", 2, k=2), run("b", 1, k=1)]
    assert [(g["k"], g["runs"]) for g in summarize(runs)] == [(1, 2), (2, 1)]


def test_parallel_matches_sequential():
    data = gen_synthetic(SyntheticFamilyConfig(n=6, m=5, T=8, seed=1))
    off = prepare(data)
    seq, _ = run_pipeline(data, "s-learner", 3, offline=off)
    par, _ = run_pipeline(data, "s-learner", 3, offline=off, jobs=2)
    assert [(r.instance, r.C, r.I, r.final) for r in seq] == \
           [(r.instance, r.C, r.I, r.final) for r in par]
