"""Exact MILP solves over a subset of constraints.

``solve_milp`` is a plain best-bound branch-and-bound on top of
:func:`warmcg.lp.solve_lp`: no cuts, no heuristics, no presolve.
``solve_bruteforce`` enumerates every integer assignment and is only meant as
an oracle for small instances.
"""
from __future__ import annotations

import heapq
import itertools
import math
from typing import Iterable, Optional

import numpy as np

from .lp import LpProblem, LpState, solve_lp
from .model import ConstraintSet, MilpInstance, SolveOutcome, Status

INT_TOL = 1e-6
ABS_GAP = 1e-9
NODE_LIMIT = 10**6
GRID_LIMIT = 10**6


class NodeLimitError(RuntimeError):
    pass


def _active_ids(instance: MilpInstance, active) -> list[int]:
    if active is None:
        return list(range(instance.num_constraints))
    ids = list(active.ids if isinstance(active, ConstraintSet) else active)
    missing = set(instance.fixed_ids) - set(ids)
    if missing:
        raise ValueError(f"active set lacks non-learnable constraints {sorted(missing)[:5]}")
    return ids


def relaxation(instance: MilpInstance, active=None) -> LpProblem:
    """LP relaxation of ``instance`` restricted to ``active`` (all rows if None)."""
    A, b = instance.dense()
    ids = _active_ids(instance, active)
    lo, hi = instance.bounds_arrays()
    q = instance.integer_mask
    lo[q] = np.ceil(lo[q] - INT_TOL)
    hi[q] = np.floor(hi[q] + INT_TOL)
    return LpProblem(np.array(instance.objective, dtype=float), A[ids], b[ids], lo, hi)


def _fractional(z: np.ndarray, mask: np.ndarray) -> Optional[int]:
    frac = np.abs(z - np.round(z))
    frac[~mask] = 0.0
    j = int(np.argmax(frac))  # most fractional, lowest index on ties
    return j if frac[j] > INT_TOL else None


def _polish(p: LpProblem, z: np.ndarray, mask: np.ndarray) -> tuple[np.ndarray, float]:
    """Snap integers and re-solve the continuous part for a clean solution."""
    y = np.round(z[mask])
    lo, hi = p.lo.copy(), p.hi.copy()
    lo[mask] = y
    hi[mask] = y
    out = solve_lp(LpProblem(p.c, p.A, p.b, lo, hi))
    if out.optimal:
        sol = out.solution
        sol[mask] = y
        return sol, float(p.c @ sol)
    sol = z.copy()
    sol[mask] = y
    return sol, float(p.c @ sol)


def _branch_and_bound(p: LpProblem, mask: np.ndarray, node_limit: int) -> SolveOutcome:
    root_state = LpState(p)
    root = root_state.solve()
    nodes = 1
    if root.status is not Status.OPTIMAL:
        return SolveOutcome(root.status, ray=root.ray, nodes=nodes)

    best_z, best_obj = None, math.inf
    heap: list = []
    seq = itertools.count()

    def consider(out: SolveOutcome, state: LpState, lo, hi):
        nonlocal best_z, best_obj
        if not out.optimal or out.objective >= best_obj - ABS_GAP:
            return
        j = _fractional(out.solution, mask)
        if j is None:
            best_z, best_obj = out.solution, out.objective
        else:
            heapq.heappush(heap, (out.objective, next(seq), j, out.solution[j], lo, hi, state))

    consider(root, root_state, p.lo, p.hi)
    while heap:
        bound, _, j, v, lo, hi, state = heapq.heappop(heap)
        if bound >= best_obj - ABS_GAP:
            break
        for side in (0, 1):
            clo, chi = lo.copy(), hi.copy()
            if side == 0:
                chi[j] = math.floor(v)
            else:
                clo[j] = math.ceil(v)
            if clo[j] > chi[j]:
                continue
            nodes += 1
            if nodes > node_limit:
                raise NodeLimitError(f"branch-and-bound node limit {node_limit} exceeded")
            # the second child may reuse the parent tableau in place
            child = state.copy() if side == 0 else state
            out = child.resolve(clo, chi)
            consider(out, child, clo, chi)

    if best_z is None:
        return SolveOutcome(Status.INFEASIBLE, nodes=nodes)
    z, obj = _polish(p, best_z, mask)
    return SolveOutcome(Status.OPTIMAL, solution=z, objective=obj, nodes=nodes)


def solve_milp(instance: MilpInstance, active=None, node_limit: int = NODE_LIMIT) -> SolveOutcome:
    """Globally optimal solve of ``instance`` over the constraints in ``active``.

    An unbounded root relaxation is reported as Unbounded (carrying the LP ray)
    once an integer-feasible point is known to exist; otherwise Infeasible.
    """
    p = relaxation(instance, active)
    mask = instance.integer_mask
    out = _branch_and_bound(p, mask, node_limit)
    if out.status is not Status.UNBOUNDED:
        return out
    feas = _branch_and_bound(LpProblem(np.zeros_like(p.c), p.A, p.b, p.lo, p.hi), mask, node_limit)
    if feas.status is Status.INFEASIBLE:
        return SolveOutcome(Status.INFEASIBLE, nodes=out.nodes + feas.nodes)
    return SolveOutcome(Status.UNBOUNDED, ray=out.ray, nodes=out.nodes + feas.nodes)


def solve_bruteforce(instance: MilpInstance, active=None, grid_limit: int = GRID_LIMIT) -> SolveOutcome:
    """Enumerate all integer assignments and solve the continuous LP for each."""
    p = relaxation(instance, active)
    mask = instance.integer_mask
    idx = np.flatnonzero(mask)
    ranges = []
    size = 1
    for i in idx:
        lo, hi = p.lo[i], p.hi[i]
        if not (np.isfinite(lo) and np.isfinite(hi)):
            raise ValueError(f"integer variable {i} has no finite range; cannot enumerate")
        if hi < lo:
            return SolveOutcome(Status.INFEASIBLE)
        ranges.append(range(int(lo), int(hi) + 1))
        size *= len(ranges[-1])
        if size > grid_limit:
            raise ValueError(f"integer grid exceeds {grid_limit} points")

    best: Optional[SolveOutcome] = None
    for point in itertools.product(*ranges):
        lo, hi = p.lo.copy(), p.hi.copy()
        lo[idx] = point
        hi[idx] = point
        out = solve_lp(LpProblem(p.c, p.A, p.b, lo, hi))
        if out.status is Status.UNBOUNDED:
            return SolveOutcome(Status.UNBOUNDED, ray=out.ray)
        if out.optimal and (best is None or out.objective < best.objective - 1e-12):
            z = out.solution
            z[idx] = point
            best = SolveOutcome(Status.OPTIMAL, solution=z, objective=float(p.c @ z))
    return best if best is not None else SolveOutcome(Status.INFEASIBLE)
