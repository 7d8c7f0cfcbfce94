"""Leave-one-out benchmark of cold CG, B-learner + CG and S-learner + CG.

Per held-out instance the learners are fitted on the other T-1 instances'
offline sets, predict a warm start from theta, and run constraint generation
from it. Every run's objective is checked against the full-problem optimum;
a mismatch is a correctness bug and aborts the benchmark.

``C`` counts learnable rows in the final reduced problem; the always-present
non-learnable rows are not counted.
"""
from __future__ import annotations

import csv
import json
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from typing import Iterable, Optional, Sequence

import numpy as np

from .congen import constraint_generation, identify_invariant_set
from .learner import LabelMatrix, fit
from .lp import warmup
from .milp import solve_milp
from .model import ConstraintSet, MilpInstance, SolveOutcome

METHODS = ("cg", "b-learner", "s-learner", "full")
CSV_HEADER = ["instance", "method", "k", "C", "I", "tau_pred_ms", "tau_cg_ms", "tau_milp_ms",
              "delta_pct", "objective", "full_objective", "match"]
TIMING_COLUMNS = ("tau_pred_ms", "tau_cg_ms", "tau_milp_ms", "delta_pct")
MATCH_TOL = 1e-6


class ObjectiveMismatchError(RuntimeError):
    pass


@dataclass
class RunMetrics:
    instance: str
    method: str
    k: Optional[int]
    C: int
    I: int
    tau_pred_ms: float
    tau_cg_ms: float
    tau_milp_ms: float
    objective: float
    full_objective: float
    match: bool
    initial: tuple = ()
    final: tuple = ()

    @property
    def delta_pct(self) -> float:
        return 100.0 * (self.tau_pred_ms + self.tau_cg_ms) / self.tau_milp_ms

    def row(self) -> list:
        return [self.instance, self.method, "" if self.k is None else self.k, self.C, self.I,
                f"{self.tau_pred_ms:.4f}", f"{self.tau_cg_ms:.4f}", f"{self.tau_milp_ms:.4f}",
                f"{self.delta_pct:.4f}", repr(float(self.objective)),
                repr(float(self.full_objective)), "true" if self.match else "false"]


@dataclass
class Offline:
    """Instance-local offline artifacts, shared by every fold."""

    full: SolveOutcome
    tau_milp_ms: float
    binding: Optional[ConstraintSet] = None
    invariant: Optional[ConstraintSet] = None


def _timed_full(inst: MilpInstance) -> tuple[SolveOutcome, float]:
    t0 = time.perf_counter()
    out = solve_milp(inst)
    return out, max((time.perf_counter() - t0) * 1e3, 1e-6)


def prepare(dataset: Sequence[MilpInstance], with_sets: bool = True,
            sets: Optional[dict] = None) -> list[Offline]:
    """Full solves (timed) and, if requested, B_t / S_t for every instance.

    ``sets`` may supply precomputed ``{name: {"B": ids, "S": ids}}`` records;
    an optional ``"objective"`` entry is cross-checked against the full solve.
    """
    warmup()
    out = []
    for inst in dataset:
        full, tau = _timed_full(inst)
        if not full.optimal:
            raise ValueError(f"{inst.name}: full problem is {full.status.value}")
        off = Offline(full, tau)
        if sets is not None and inst.name in sets:
            rec = sets[inst.name]
            if "objective" in rec and abs(rec["objective"] - full.objective) > MATCH_TOL:
                raise ObjectiveMismatchError(
                    f"{inst.name}: sets file records objective {rec['objective']!r}, "
                    f"full solve gives {full.objective!r}")
            off.binding = inst.make_set(rec["B"])
            off.invariant = inst.make_set(rec["S"])
        elif with_sets:
            ident = identify_invariant_set(inst, full=full)
            off.binding, off.invariant = ident.binding, ident.invariant
        out.append(off)
    return out


def _check(inst, method, k, objective, full_objective):
    if abs(objective - full_objective) > MATCH_TOL:
        raise ObjectiveMismatchError(
            f"{inst.name} [{method}, k={k}]: objective {objective!r} differs from "
            f"full-problem objective {full_objective!r}")


def run_holdout(test: MilpInstance, labels: LabelMatrix,
                k: int, method: str, full_objective: float, tau_milp_ms: float) -> RunMetrics:
    """Online phase for one test instance: predict a warm start, then CG from it."""
    t0 = time.perf_counter()
    model = fit(labels, k)
    warm = model.predict_set(test.theta, test)
    tau_pred = (time.perf_counter() - t0) * 1e3
    trace = constraint_generation(test, warm)
    obj = trace.objective
    _check(test, method, k, obj, full_objective)
    return RunMetrics(test.name, method, k, trace.final.learnable_count(test), trace.iterations,
                      tau_pred, trace.seconds * 1e3, tau_milp_ms, obj, full_objective, True,
                      tuple(warm.ids), tuple(sorted(trace.final.ids)))


# worker-process globals for --jobs > 1
_W: dict = {}


def _init_worker(dataset, offline, method, k):
    _W.update(dataset=dataset, offline=offline, method=method, k=k)


def _one(t: int) -> RunMetrics:
    dataset, offline, method, k = _W["dataset"], _W["offline"], _W["method"], _W["k"]
    inst, off = dataset[t], offline[t]
    full_obj = off.full.objective
    if method == "full":
        return RunMetrics(inst.name, method, None, len(inst.learnable_ids), 1, 0.0,
                          off.tau_milp_ms, off.tau_milp_ms, full_obj, full_obj, True)
    if method == "cg":
        trace = constraint_generation(inst, inst.default_set())
        _check(inst, method, None, trace.objective, full_obj)
        return RunMetrics(inst.name, method, None, trace.final.learnable_count(inst),
                          trace.iterations, 0.0, trace.seconds * 1e3, off.tau_milp_ms,
                          trace.objective, full_obj, True, tuple(trace.initial.ids),
                          tuple(sorted(trace.final.ids)))
    others = [i for i in range(len(dataset)) if i != t]
    labels = _W["labels"].subset(others)
    return run_holdout(inst, labels, k, method, full_obj,
                       off.tau_milp_ms)


def run_pipeline(dataset: Sequence[MilpInstance], method: str, k: Optional[int] = None,
                 offline: Optional[list[Offline]] = None, jobs: int = 1) -> tuple[list[RunMetrics], dict]:
    """Run ``method`` over every instance (leave-one-out for the learners)."""
    if method not in METHODS:
        raise ValueError(f"unknown method {method!r}; choose from {METHODS}")
    learner = method.endswith("learner")
    if learner:
        if len(dataset) < 2:
            raise ValueError("learner methods need at least 2 instances")
        if k is None or not 1 <= k <= len(dataset) - 1:
            raise ValueError(f"k must be in [1, {len(dataset) - 1}] for leave-one-out")
    else:
        k = None
    if offline is None:
        offline = prepare(dataset, with_sets=learner)
    _init_worker(dataset, offline, method, k)
    if learner:
        source = "binding" if method == "b-learner" else "invariant"
        sets = [o.binding if source == "binding" else o.invariant for o in offline]
        _W["labels"] = LabelMatrix.from_sets(dataset, sets, source)
    idx = range(len(dataset))
    if jobs > 1:
        with ProcessPoolExecutor(jobs, initializer=_init_worker_full,
                                 initargs=(dataset, offline, method, k, _W.get("labels"))) as ex:
            runs = list(ex.map(_one, idx, chunksize=max(1, len(dataset) // (4 * jobs))))
    else:
        runs = [_one(t) for t in idx]
    return runs, aggregate(runs)


def _init_worker_full(dataset, offline, method, k, labels):
    _init_worker(dataset, offline, method, k)
    _W["labels"] = labels


def _quantiles(values) -> dict:
    v = np.asarray(values, dtype=float)
    q = np.quantile(v, [0.0, 0.25, 0.5, 0.75, 1.0])
    return dict(zip(("min", "q1", "median", "q3", "max"), (float(x) for x in q)))


def aggregate(runs: Sequence[RunMetrics]) -> dict:
    """C/I ranges, P1, Delta and boxplot quantiles for one (method, k) group."""
    if not runs:
        raise ValueError("no runs to aggregate")
    C = [r.C for r in runs]
    I = [r.I for r in runs]
    delta = [r.delta_pct for r in runs]
    return {
        "method": runs[0].method,
        "k": runs[0].k,
        "runs": len(runs),
        "C_min": min(C), "C_max": max(C),
        "I_min": min(I), "I_max": max(I),
        "I_mean": float(np.mean(I)), "C_mean": float(np.mean(C)),
        "P1": 100.0 * sum(1 for i in I if i == 1) / len(I),
        "Delta": float(np.mean(delta)),
        "mismatches": sum(1 for r in runs if not r.match),
        "quantiles": {"C": _quantiles(C), "I": _quantiles(I), "delta": _quantiles(delta)},
    }


def write_metrics(path, runs: Iterable[RunMetrics], append: bool = False) -> None:
    with open(path, "a" if append else "w", newline="") as fh:
        w = csv.writer(fh)
        if not append:
            w.writerow(CSV_HEADER)
        for r in runs:
            w.writerow(r.row())


def read_metrics(path) -> list[RunMetrics]:
    runs = []
    with open(path, newline="") as fh:
        rd = csv.DictReader(fh)
        if rd.fieldnames != CSV_HEADER:
            raise ValueError(f"{path}: unexpected header {rd.fieldnames}")
        for row in rd:
            runs.append(RunMetrics(
                row["instance"], row["method"], int(row["k"]) if row["k"] else None,
                int(row["C"]), int(row["I"]), float(row["tau_pred_ms"]),
                float(row["tau_cg_ms"]), float(row["tau_milp_ms"]), float(row["objective"]),
                float(row["full_objective"]), row["match"] == "true"))
    return runs


def summarize(runs: Sequence[RunMetrics]) -> list[dict]:
    """One aggregate per (method, k) group, in first-seen order."""
    groups: dict = {}
    for r in runs:
        groups.setdefault((r.method, r.k), []).append(r)
    return [aggregate(g) for g in groups.values()]


def write_summary(path, runs: Sequence[RunMetrics]) -> list[dict]:
    rows = summarize(runs)
    with open(path, "w") as fh:
        json.dump({"groups": rows}, fh, indent=2)
        fh.write("\n")
    return rows
