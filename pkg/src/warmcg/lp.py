"""Dense two-phase primal simplex with bounded variables.

Solves ``min c^T z  s.t.  A z <= b,  lo <= z <= hi`` where bounds may be
infinite. Slacks turn rows into equalities; rows whose slack would start
negative get an artificial column and phase 1 drives those to zero. Bland's
rule picks both the entering and the leaving variable, so the primal method
cannot cycle. Upper bounds are handled implicitly (bound flips), never as rows.

A solved tableau can be re-optimised after bound changes with the bounded
dual simplex (:meth:`LpState.resolve`); branch-and-bound uses this to avoid
solving every node from scratch.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from numba import njit

from .model import SolveOutcome, Status

PHASE1_TOL = 1e-8
COST_TOL = 1e-9
PIVOT_TOL = 1e-9
FEAS_TOL = 1e-9
CHECK_TOL = 1e-7

_OPTIMAL, _UNBOUNDED, _CAP, _INFEASIBLE = 0, 1, 2, 3


class CyclingError(RuntimeError):
    pass


@dataclass
class LpProblem:
    """LP data restricted to the active rows.

    ``lo``/``hi`` already include any branch-and-bound fixings.
    """

    c: np.ndarray
    A: np.ndarray
    b: np.ndarray
    lo: np.ndarray
    hi: np.ndarray

    def __post_init__(self):
        self.c = np.asarray(self.c, dtype=float)
        self.A = np.ascontiguousarray(np.asarray(self.A, dtype=float).reshape(-1, self.c.size))
        self.b = np.asarray(self.b, dtype=float)
        self.lo = np.asarray(self.lo, dtype=float)
        self.hi = np.asarray(self.hi, dtype=float)
        if self.b.size != self.A.shape[0]:
            raise ValueError("row count mismatch between A and b")
        if self.lo.size != self.c.size or self.hi.size != self.c.size:
            raise ValueError("bound vectors must match the variable count")
        if not (np.all(np.isfinite(self.c)) and np.all(np.isfinite(self.A))
                and np.all(np.isfinite(self.b))):
            raise ValueError("LP data must be finite")
        if np.any(np.isnan(self.lo)) or np.any(np.isnan(self.hi)):
            raise ValueError("NaN bounds")

    def with_bounds(self, lo, hi) -> "LpProblem":
        return LpProblem(self.c, self.A, self.b, lo, hi)


@njit(cache=True)
def _pivot(T, d, basis, is_basic, r, j):
    m, N = T.shape
    piv = T[r, j]
    for k in range(N):
        T[r, k] /= piv
    for i in range(m):
        if i == r:
            continue
        f = T[i, j]
        if f != 0.0:
            for k in range(N):
                T[i, k] -= f * T[r, k]
            T[i, j] = 0.0
    f = d[j]
    if f != 0.0:
        for k in range(N):
            d[k] -= f * T[r, k]
        d[j] = 0.0
    is_basic[basis[r]] = False
    is_basic[j] = True
    basis[r] = j


@njit(cache=True)
def _ratio(T, x, lo, hi, basis, i, j, sigma):
    delta = -sigma * T[i, j]
    b = basis[i]
    if delta < -PIVOT_TOL:
        if lo[b] == -np.inf:
            return np.inf
        t = (x[b] - lo[b]) / -delta
    elif delta > PIVOT_TOL:
        if hi[b] == np.inf:
            return np.inf
        t = (hi[b] - x[b]) / delta
    else:
        return np.inf
    return t if t > 0.0 else 0.0


@njit(cache=True)
def _primal(T, d, x, lo, hi, basis, is_basic, cap):
    """Bland-rule primal simplex. Returns (code, entering, direction, iterations)."""
    m, N = T.shape
    it = 0
    while True:
        if it >= cap:
            return _CAP, -1, 0.0, it
        it += 1
        j = -1
        sigma = 0.0
        for k in range(N):
            if is_basic[k]:
                continue
            if d[k] < -COST_TOL and x[k] < hi[k]:
                j = k
                sigma = 1.0
                break
            if d[k] > COST_TOL and x[k] > lo[k]:
                j = k
                sigma = -1.0
                break
        if j < 0:
            return _OPTIMAL, -1, 0.0, it
        tmin = np.inf
        for i in range(m):
            t = _ratio(T, x, lo, hi, basis, i, j, sigma)
            if t < tmin:
                tmin = t
        own = hi[j] - x[j] if sigma > 0 else x[j] - lo[j]
        if tmin == np.inf and own == np.inf:
            return _UNBOUNDED, j, sigma, it
        if own <= tmin:
            for i in range(m):
                x[basis[i]] -= sigma * T[i, j] * own
            x[j] = hi[j] if sigma > 0 else lo[j]
            continue
        # Bland: among tied rows the basic variable with the lowest index leaves
        tol = 1e-12 * (1.0 + tmin)
        r = -1
        for i in range(m):
            t = _ratio(T, x, lo, hi, basis, i, j, sigma)
            if t <= tmin + tol and (r < 0 or basis[i] < basis[r]):
                r = i
        leave = basis[r]
        to_lower = -sigma * T[r, j] < 0
        for i in range(m):
            x[basis[i]] -= sigma * T[i, j] * tmin
        x[j] += sigma * tmin
        x[leave] = lo[leave] if to_lower else hi[leave]
        _pivot(T, d, basis, is_basic, r, j)


@njit(cache=True)
def _dual(T, d, x, lo, hi, basis, is_basic, cap):
    """Bounded dual simplex from a dual-feasible basis. Returns (code, iterations)."""
    m, N = T.shape
    it = 0
    while True:
        if it >= cap:
            return _CAP, it
        it += 1
        r = -1
        worst = FEAS_TOL
        for i in range(m):
            b = basis[i]
            v = 0.0
            if x[b] < lo[b]:
                v = lo[b] - x[b]
            elif x[b] > hi[b]:
                v = x[b] - hi[b]
            if v > worst:
                worst = v
                r = i
        if r < 0:
            return _OPTIMAL, it
        b = basis[r]
        below = x[b] < lo[b]
        target = lo[b] if below else hi[b]
        j = -1
        best = np.inf
        best_a = 0.0
        for k in range(N):
            if is_basic[k]:
                continue
            a = T[r, k]
            if abs(a) <= PIVOT_TOL:
                continue
            # x_b moves by -a * dx_k; pick the direction of dx_k that repairs x_b
            up = (a < 0) if below else (a > 0)
            if up and not x[k] < hi[k]:
                continue
            if not up and not x[k] > lo[k]:
                continue
            ratio = abs(d[k]) / abs(a)
            if ratio < best - 1e-12 or (ratio <= best + 1e-12 and abs(a) > best_a):
                best = ratio
                best_a = abs(a)
                j = k
        if j < 0:
            return _INFEASIBLE, it
        step = (x[b] - target) / T[r, j]
        for i in range(m):
            x[basis[i]] -= T[i, j] * step
        x[j] += step
        x[b] = target
        _pivot(T, d, basis, is_basic, r, j)


class LpState:
    """A simplex tableau over a fixed row set; solved in place."""

    def __init__(self, p: LpProblem):
        m, n = p.A.shape
        self.p = p
        self.m, self.n = m, n
        lo = np.concatenate([p.lo, np.zeros(m)])
        hi = np.concatenate([p.hi, np.full(m, np.inf)])
        x = np.where(np.isfinite(lo), lo, np.where(np.isfinite(hi), hi, 0.0))
        x[n:] = 0.0
        slack = p.b - p.A @ x[:n]
        bad = np.flatnonzero(slack < 0)
        na = bad.size

        N = n + m + na
        T = np.zeros((m, N))
        T[:, :n] = p.A
        T[:, n:n + m] = np.eye(m)
        basis = np.arange(n, n + m)
        if na:
            T[bad, n + m + np.arange(na)] = -1.0
            T[bad] *= -1.0
            basis[bad] = n + m + np.arange(na)
        self.N = N
        self.T = T
        self.basis = basis
        self.lo = np.concatenate([lo, np.zeros(na)])
        self.hi = np.concatenate([hi, np.full(na, np.inf)])
        self.x = np.concatenate([x, np.zeros(na)])
        self.x[basis] = np.abs(slack)
        self.is_basic = np.zeros(N, dtype=np.bool_)
        self.is_basic[basis] = True
        self.art_rows = bad
        self.cost = np.zeros(N)
        self.cost[:n] = p.c
        self.d = np.zeros(N)
        self.iterations = 0
        self.cap = 10 * (m + N) ** 2 + 100

    def copy(self) -> "LpState":
        new = object.__new__(LpState)
        new.__dict__.update(self.__dict__)
        for k in ("T", "basis", "lo", "hi", "x", "is_basic", "d"):
            setattr(new, k, getattr(self, k).copy())
        return new

    @property
    def num_art(self) -> int:
        return self.art_rows.size

    def refresh_basics(self):
        """Recompute basic values from the nonbasic ones through B^-1."""
        n, m = self.n, self.m
        if m == 0:
            return
        # slack columns started as I, so they now hold B^-1; nonbasic slacks
        # and artificials always sit at zero
        binv = self.T[:, n:n + m]
        xn = np.where(self.is_basic[:n], 0.0, self.x[:n])
        self.x[self.basis] = binv @ (self.p.b - self.p.A @ xn)

    def _run_primal(self, cost):
        self.d = cost - cost[self.basis] @ self.T if self.m else cost.copy()
        code, j, sigma, it = _primal(self.T, self.d, self.x, self.lo, self.hi,
                                     self.basis, self.is_basic, self.cap)
        self.iterations += it
        if code == _CAP:
            raise CyclingError("cycling suspected: simplex iteration cap exceeded")
        return code, j, sigma

    def solve(self) -> SolveOutcome:
        """Cold two-phase solve."""
        n, m = self.n, self.m
        if np.any(self.lo > self.hi):
            return SolveOutcome(Status.INFEASIBLE)
        if self.num_art:
            cost1 = np.zeros(self.N)
            cost1[n + m:] = 1.0
            self._run_primal(cost1)
            self.refresh_basics()
            art = self.x[n + m:]
            if art.sum() > PHASE1_TOL:
                row = int(self.art_rows[int(np.argmax(art))])
                return SolveOutcome(Status.INFEASIBLE, infeasible_row=row)
            self.hi[n + m:] = 0.0
        code, j, sigma = self._run_primal(self.cost)
        if code == _UNBOUNDED:
            full = np.zeros(self.N)
            full[j] = sigma
            full[self.basis] = -sigma * self.T[:, j]
            return SolveOutcome(Status.UNBOUNDED, ray=full[:n] + 0.0)  # drop negative zeros
        return self._optimal()

    def _optimal(self) -> SolveOutcome:
        n, m = self.n, self.m
        self.refresh_basics()
        z = self.x[:n].copy()
        duals = self.cost[self.basis] @ self.T[:, n:n + m] if m else np.zeros(0)
        return SolveOutcome(Status.OPTIMAL, solution=z, objective=float(self.p.c @ z), duals=duals)

    def resolve(self, lo, hi) -> SolveOutcome:
        """Re-optimise in place after changing structural bounds (dual simplex).

        Requires the state to hold an optimal basis. Falls back to a cold solve
        if the warm path stalls or its answer fails an independent check.
        """
        n = self.n
        lo = np.asarray(lo, dtype=float)
        hi = np.asarray(hi, dtype=float)
        if np.any(lo > hi):
            return SolveOutcome(Status.INFEASIBLE)
        self.lo[:n] = lo
        self.hi[:n] = hi
        nb = ~self.is_basic[:n]
        moved = nb & ((self.x[:n] < lo) | (self.x[:n] > hi))
        if np.any(moved):
            self.x[:n][moved] = np.clip(self.x[:n][moved], lo[moved], hi[moved])
            self.refresh_basics()
        code, it = _dual(self.T, self.d, self.x, self.lo, self.hi, self.basis,
                         self.is_basic, self.cap)
        self.iterations += it
        if code == _INFEASIBLE:
            return SolveOutcome(Status.INFEASIBLE)
        if code == _OPTIMAL:
            out = self._optimal()
            if _certified(self.p.with_bounds(lo, hi), out.solution):
                return out
        cold = LpState(self.p.with_bounds(lo, hi))
        res = cold.solve()
        self.__dict__.update(cold.__dict__)
        return res


def _certified(p: LpProblem, z: np.ndarray) -> bool:
    if p.A.shape[0] and np.max(p.A @ z - p.b) > CHECK_TOL:
        return False
    return bool(np.all(z >= p.lo - CHECK_TOL) and np.all(z <= p.hi + CHECK_TOL))


def solve_lp(p: LpProblem) -> SolveOutcome:
    """Solve ``p``; returns an Optimal, Infeasible or Unbounded outcome."""
    return LpState(p).solve()


def dual_bound(p: LpProblem, duals: np.ndarray) -> float:
    """Lagrangian lower bound ``pi^T b + sum_j min_{lo<=z_j<=hi} d_j z_j`` for ``pi <= 0``.

    Valid for any nonpositive ``duals``; returns ``-inf`` if some reduced cost
    points towards an infinite bound.
    """
    pi = np.minimum(np.asarray(duals, dtype=float), 0.0)
    d = p.c - p.A.T @ pi
    total = float(pi @ p.b)
    for dj, l, h in zip(d, p.lo, p.hi):
        if abs(dj) <= 1e-12:
            continue
        bound = l if dj > 0 else h
        if not np.isfinite(bound):
            return -np.inf
        total += dj * bound
    return total


def warmup() -> None:
    """Compile the simplex kernels so the first timed solve is not a JIT compile."""
    p = LpProblem([1.0, -1.0], [[1.0, 1.0], [-1.0, 0.0]], [1.5, -0.25],
                  [-np.inf, 0.0], [np.inf, 1.0])
    st = LpState(p)
    st.solve()
    st.resolve(p.lo, np.array([np.inf, 0.0]))
