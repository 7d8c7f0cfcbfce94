"""Constraint generation and invariant-set identification."""
from __future__ import annotations

import time
from dataclasses import dataclass, field
from typing import Optional, Union

import numpy as np

from .milp import solve_milp
from .model import (ConstraintSet, MilpInstance, SolveOutcome, Status, binding_set,
                    max_violation)

RAY_CUT = "ray-cut"


class UnboundedProblemError(RuntimeError):
    """The reduced problem is unbounded and no missing row cuts off its ray."""


@dataclass
class CgStep:
    iteration: int
    added: int
    kind: str  # "violation" or RAY_CUT
    magnitude: float


@dataclass
class CgTrace:
    initial: ConstraintSet
    steps: list[CgStep] = field(default_factory=list)
    final: Optional[ConstraintSet] = None
    outcome: Optional[SolveOutcome] = None
    iterations: int = 0
    seconds: float = 0.0

    @property
    def added(self) -> list[int]:
        return [s.added for s in self.steps]

    @property
    def objective(self) -> Optional[float]:
        return self.outcome.objective if self.outcome is not None else None


def ray_cut(instance: MilpInstance, ray: np.ndarray, current: ConstraintSet) -> Optional[tuple[int, float]]:
    """Row outside ``current`` that most opposes ``ray`` (argmax a_j^T r > 0)."""
    A, _ = instance.dense()
    scores = A @ ray
    mask = np.ones(instance.num_constraints, dtype=bool)
    mask[list(current.ids)] = False
    cand = np.where(mask, scores, -np.inf)
    if cand.size == 0:
        return None
    j = int(np.argmax(cand))
    if cand[j] <= 1e-12:
        return None
    return j, float(cand[j])


def constraint_generation(instance: MilpInstance, initial: Union[ConstraintSet, list, None] = None,
                          solver=solve_milp, max_iterations: Optional[int] = None) -> CgTrace:
    """Solve reduced problems, adding one row per iteration until feasible for all rows.

    Optimal reduced solution: add the most violated row. Unbounded reduced
    problem: add the row that most opposes the returned ray. The iteration
    count is the number of reduced solves.
    """
    if initial is None:
        current = instance.default_set()
    elif isinstance(initial, ConstraintSet):
        current = instance.make_set(initial.ids)
    else:
        current = instance.make_set(initial)
    trace = CgTrace(initial=current)
    limit = max_iterations or instance.num_constraints + 1
    start = time.perf_counter()
    while True:
        trace.iterations += 1
        out = solver(instance, current)
        if out.status is Status.INFEASIBLE:
            trace.outcome = out
            break
        if out.status is Status.UNBOUNDED:
            pick = ray_cut(instance, out.ray, current)
            if pick is None:
                raise UnboundedProblemError("genuinely unbounded over J")
            kind = RAY_CUT
        else:
            pick = max_violation(instance, out.solution, excluded=current.ids)
            if pick is None:
                trace.outcome = out
                break
            kind = "violation"
        if trace.iterations >= limit:
            raise RuntimeError("constraint generation did not terminate")
        j, mag = pick
        trace.steps.append(CgStep(trace.iterations, j, kind, mag))
        current = current.add(j)
    trace.final = current
    trace.seconds = time.perf_counter() - start
    return trace


@dataclass
class Identification:
    binding: ConstraintSet
    invariant: ConstraintSet
    full: SolveOutcome
    trace: CgTrace


def identify_invariant_set(instance: MilpInstance, full: Optional[SolveOutcome] = None,
                           solver=solve_milp) -> Identification:
    """Binding set of the full optimum, grown by constraint generation into an invariant set."""
    full = full if full is not None else solver(instance, None)
    if full.status is not Status.OPTIMAL:
        raise ValueError(f"{instance.name}: full problem is {full.status.value}, need Optimal")
    binding = binding_set(instance, full.solution)
    trace = constraint_generation(instance, binding, solver=solver)
    if trace.outcome is None or not trace.outcome.optimal:
        raise RuntimeError(f"{instance.name}: reduced problem lost feasibility")
    return Identification(binding, trace.final, full, trace)
