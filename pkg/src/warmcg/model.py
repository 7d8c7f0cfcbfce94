"""Data model for parametric MILP families.

Every instance is stored in canonical form ``min c^T z  s.t.  a_j^T z <= b_j``
with ``z = (x, y)``: the first ``num_continuous`` entries are continuous, the
remaining ``num_integer`` entries are integer. Constraint order is positional
and shared by every instance of a family, so constraint ids double as labels.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from enum import Enum
from typing import Iterable, Optional, Sequence

import numpy as np

EPS_FEAS = 1e-6
EPS_BIND = 1e-6


class InfeasiblePointError(ValueError):
    """Raised when a point handed to :func:`binding_set` violates the instance."""

    def __init__(self, index: int, violation: float):
        super().__init__(
            f"point violates constraint {index} by {violation:.3e} (> {EPS_FEAS:g})")
        self.index = index
        self.violation = violation


@dataclass(frozen=True)
class Constraint:
    """One canonical row ``sum_i coeffs[i] * z[i] <= rhs``."""

    coeffs: tuple[tuple[int, float], ...]
    rhs: float
    learnable: bool = True

    def __post_init__(self):
        idx = [i for i, _ in self.coeffs]
        if any(b <= a for a, b in zip(idx, idx[1:])):
            raise ValueError("coefficient indices must be strictly increasing")
        if any(v == 0.0 for _, v in self.coeffs):
            raise ValueError("zero coefficients must not be stored")
        if not math.isfinite(self.rhs) or not all(math.isfinite(v) for _, v in self.coeffs):
            raise ValueError("non-finite constraint data")

    @classmethod
    def from_dense(cls, row: Sequence[float], rhs: float, learnable: bool = True) -> "Constraint":
        return cls(tuple((i, float(v)) for i, v in enumerate(row) if v != 0.0),
                   float(rhs), learnable)

    def activity(self, z: np.ndarray) -> float:
        return math.fsum(v * z[i] for i, v in self.coeffs)


def canonicalize(coeffs: Iterable[tuple[int, float]], sense: str, rhs: float,
                 learnable: bool = True) -> list[Constraint]:
    """Turn a ``<=``, ``>=`` or ``=`` row into one or two ``<=`` rows.

    ``>=`` rows are negated, ``=`` rows become the pair (``<=``, negated ``>=``).
    """
    merged: dict[int, float] = {}
    for i, v in coeffs:
        if not (math.isfinite(v)):
            raise ValueError(f"non-finite coefficient for variable {i}")
        merged[int(i)] = merged.get(int(i), 0.0) + float(v)
    if not math.isfinite(rhs):
        raise ValueError("non-finite right-hand side")
    terms = tuple((i, v) for i, v in sorted(merged.items()) if v != 0.0)
    neg = tuple((i, -v) for i, v in terms)
    if sense in ("<=", "≤", "L"):
        return [Constraint(terms, float(rhs), learnable)]
    if sense in (">=", "≥", "G"):
        return [Constraint(neg, -float(rhs), learnable)]
    if sense in ("=", "==", "E"):
        return [Constraint(terms, float(rhs), learnable),
                Constraint(neg, -float(rhs), learnable)]
    raise ValueError(f"unknown constraint sense {sense!r}")


@dataclass(frozen=True)
class MilpInstance:
    name: str
    num_continuous: int
    num_integer: int
    objective: tuple[float, ...]
    constraints: tuple[Constraint, ...]
    var_bounds: tuple[tuple[Optional[float], Optional[float]], ...] = ()
    theta: tuple[float, ...] = ()
    _dense: dict = field(default_factory=dict, init=False, repr=False, compare=False)

    def __post_init__(self):
        nv = self.num_continuous + self.num_integer
        if len(self.objective) != nv:
            raise ValueError(f"objective has length {len(self.objective)}, expected {nv}")
        if not self.var_bounds:
            object.__setattr__(self, "var_bounds", tuple((None, None) for _ in range(nv)))
        if len(self.var_bounds) != nv:
            raise ValueError("var_bounds length does not match variable count")
        for j, con in enumerate(self.constraints):
            if con.coeffs and con.coeffs[-1][0] >= nv:
                raise ValueError(f"constraint {j} references variable >= {nv}")
        for lo, hi in self.var_bounds:
            if lo is not None and hi is not None and lo > hi:
                raise ValueError("variable lower bound exceeds upper bound")

    @property
    def num_vars(self) -> int:
        return self.num_continuous + self.num_integer

    @property
    def num_constraints(self) -> int:
        return len(self.constraints)

    @property
    def integer_mask(self) -> np.ndarray:
        mask = np.zeros(self.num_vars, dtype=bool)
        mask[self.num_continuous:] = True
        return mask

    @property
    def learnable_ids(self) -> list[int]:
        return [j for j, c in enumerate(self.constraints) if c.learnable]

    @property
    def fixed_ids(self) -> list[int]:
        return [j for j, c in enumerate(self.constraints) if not c.learnable]

    def dense(self) -> tuple[np.ndarray, np.ndarray]:
        """Dense ``(A, b)`` over all constraints, cached."""
        if "A" not in self._dense:
            A = np.zeros((self.num_constraints, self.num_vars))
            for j, con in enumerate(self.constraints):
                for i, v in con.coeffs:
                    A[j, i] = v
            b = np.array([c.rhs for c in self.constraints], dtype=float)
            A.setflags(write=False)
            b.setflags(write=False)
            self._dense["A"], self._dense["b"] = A, b
        return self._dense["A"], self._dense["b"]

    def bounds_arrays(self) -> tuple[np.ndarray, np.ndarray]:
        lo = np.array([-np.inf if l is None else l for l, _ in self.var_bounds], dtype=float)
        hi = np.array([np.inf if h is None else h for _, h in self.var_bounds], dtype=float)
        return lo, hi

    def objective_value(self, z) -> float:
        return math.fsum(c * v for c, v in zip(self.objective, z))

    def full_set(self) -> "ConstraintSet":
        return ConstraintSet(self.name, tuple(range(self.num_constraints)))

    def default_set(self) -> "ConstraintSet":
        """The set every warm start contains: all non-learnable rows."""
        return ConstraintSet(self.name, tuple(self.fixed_ids))

    def make_set(self, ids: Iterable[int]) -> "ConstraintSet":
        """Build a ConstraintSet over ``ids`` plus all non-learnable rows, sorted."""
        ids = set(int(j) for j in ids)
        bad = [j for j in ids if not 0 <= j < self.num_constraints]
        if bad:
            raise ValueError(f"constraint ids out of range: {sorted(bad)}")
        ids.update(self.fixed_ids)
        return ConstraintSet(self.name, tuple(sorted(ids)))


@dataclass(frozen=True)
class ConstraintSet:
    instance: str
    ids: tuple[int, ...]

    def __post_init__(self):
        if len(set(self.ids)) != len(self.ids):
            raise ValueError("duplicate constraint ids")

    def __contains__(self, j) -> bool:
        return j in self._members

    def __len__(self) -> int:
        return len(self.ids)

    def __iter__(self):
        return iter(self.ids)

    @property
    def _members(self) -> frozenset:
        return frozenset(self.ids)

    def add(self, j: int) -> "ConstraintSet":
        if j in self._members:
            raise ValueError(f"constraint {j} already in set")
        return ConstraintSet(self.instance, self.ids + (int(j),))

    def learnable_count(self, instance: MilpInstance) -> int:
        return sum(1 for j in self.ids if instance.constraints[j].learnable)

    def labels(self, instance: MilpInstance) -> np.ndarray:
        """+1/-1 label per learnable constraint, in ``instance.learnable_ids`` order."""
        members = self._members
        return np.array([1 if j in members else -1 for j in instance.learnable_ids], dtype=np.int8)


class Status(str, Enum):
    OPTIMAL = "Optimal"
    INFEASIBLE = "Infeasible"
    UNBOUNDED = "Unbounded"


@dataclass(frozen=True)
class SolveOutcome:
    status: Status
    solution: Optional[np.ndarray] = None
    objective: Optional[float] = None
    ray: Optional[np.ndarray] = None
    # LP only: row multipliers (<= 0) for the active rows, in active-row order
    duals: Optional[np.ndarray] = None
    # LP only: active-row position left infeasible after phase 1
    infeasible_row: Optional[int] = None
    nodes: int = 0

    @property
    def optimal(self) -> bool:
        return self.status is Status.OPTIMAL


def residuals(instance: MilpInstance, z: np.ndarray) -> np.ndarray:
    """``a_j^T z - b_j`` for every constraint (positive means violated)."""
    A, b = instance.dense()
    return A @ np.asarray(z, dtype=float) - b


def binding_set(instance: MilpInstance, z, tol: float = EPS_BIND) -> ConstraintSet:
    """Rows holding with equality at ``z`` plus all non-learnable rows."""
    r = residuals(instance, z)
    worst = int(np.argmax(r)) if r.size else -1
    if r.size and r[worst] > EPS_FEAS:
        raise InfeasiblePointError(worst, float(r[worst]))
    tight = np.flatnonzero(np.abs(r) <= tol)
    return instance.make_set(tight.tolist())


def max_violation(instance: MilpInstance, z, excluded: Iterable[int] = (),
                  tol: float = EPS_FEAS) -> Optional[tuple[int, float]]:
    """Most violated row outside ``excluded``; lowest index on ties, None if feasible."""
    r = residuals(instance, z)
    if r.size == 0:
        return None
    mask = np.ones(r.size, dtype=bool)
    ex = list(excluded)
    if ex:
        mask[ex] = False
    cand = np.where(mask, r, -np.inf)
    j = int(np.argmax(cand))  # argmax returns the first maximiser
    if cand[j] > tol:
        return j, float(cand[j])
    return None
