"""Seeded generators for the three problem families.

* toy: two variables, six rows, parameter ``b`` on the row ``x + y >= b``.
* synthetic: ``min c^T x`` with ``m`` coupling rows ``a_j^T x <= b_j`` and
  on/off links ``l_i y_i <= x_i <= u_i y_i``; only ``b`` varies.
* uc: single-period DC unit commitment over a random connected network;
  only the nodal demand vector varies.

Variables are always ordered ``z = (x, y)``. Every generated instance is
screened to be feasible and bounded over its full constraint set.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .milp import solve_milp
from .model import Constraint, MilpInstance, canonicalize

MAX_RESAMPLES = 100

TOY_TRAIN_B = (1.0, 1.25, 1.5)
TOY_TEST_B = 1.3


class GenerationError(RuntimeError):
    pass


def toy_instance(b: float, name: str | None = None) -> MilpInstance:
    rows = [
        canonicalize([(0, 1.0)], "<=", 1.5),            # x <= 1.5
        canonicalize([(1, 1.0)], "<=", 1.75),           # y <= 1.75
        canonicalize([(0, 1.0)], ">=", 0.5),            # x >= 0.5
        canonicalize([(0, 1.0), (1, 1.0)], ">=", b),    # x + y >= b
        canonicalize([(1, 1.0)], ">=", 0.0),            # y >= 0
        canonicalize([(1, 1.0)], "<=", 2.25),           # y <= 2.25
    ]
    return MilpInstance(
        name=name or f"toy-b{b:g}",
        num_continuous=1,
        num_integer=1,
        objective=(1.0, -1.0),
        constraints=tuple(r for group in rows for r in group),
        theta=(float(b),),
    )


def gen_toy() -> tuple[list[MilpInstance], MilpInstance]:
    """The three training instances and the held-out ``b = 1.3`` instance."""
    train = [toy_instance(b) for b in TOY_TRAIN_B]
    return train, toy_instance(TOY_TEST_B, name=f"toy-test-b{TOY_TEST_B:g}")


@dataclass(frozen=True)
class SyntheticFamilyConfig:
    n: int = 50
    m: int = 25
    T: int = 200
    seed: int = 7
    scale: float = 10.0  # standard deviation of every sampled coefficient
    screen: bool = True  # resample until the full problem solves to optimality

    def __post_init__(self):
        if min(self.n, self.m, self.T) < 1:
            raise ValueError("n, m and T must all be >= 1")


def _ordered_pair(rng, size, scale):
    l = rng.normal(0.0, scale, size)
    u = rng.normal(0.0, scale, size)
    swap = l > u
    l[swap], u[swap] = u[swap], l[swap]
    tie = l == u
    u[tie] += 1e-3  # measure-zero event, keeps l < u strict
    return l, u


def _link_rows(n: int, l, u) -> list[Constraint]:
    """``l_i y_i - x_i <= 0`` and ``x_i - u_i y_i <= 0`` for each i."""
    rows = []
    for i in range(n):
        rows += canonicalize([(n + i, l[i]), (i, -1.0)], "<=", 0.0, learnable=False)
        rows += canonicalize([(i, 1.0), (n + i, -u[i])], "<=", 0.0, learnable=False)
    return rows


def _screened(build, sample, rng, what: str, screen: bool = True) -> MilpInstance:
    if not screen:
        return build(sample(rng))
    for _ in range(MAX_RESAMPLES):
        inst = build(sample(rng))
        if solve_milp(inst).optimal:
            return inst
    raise GenerationError(f"{what}: no feasible bounded sample in {MAX_RESAMPLES} attempts")


def gen_synthetic(cfg: SyntheticFamilyConfig) -> list[MilpInstance]:
    n, m = cfg.n, cfg.m
    rng = np.random.default_rng(cfg.seed)
    a = rng.normal(0.0, cfg.scale, (m, n))  # a[j, i] multiplies x_i in row j
    c = rng.normal(0.0, cfg.scale, n)
    l, u = _ordered_pair(rng, n, cfg.scale)
    links = _link_rows(n, l, u)
    objective = tuple(c.tolist()) + (0.0,) * n
    bounds = ((None, None),) * n + ((0.0, 1.0),) * n

    def build(b, name):
        rows = [Constraint.from_dense(a[j], b[j], learnable=True) for j in range(m)]
        return MilpInstance(name, n, n, objective, tuple(rows + links), bounds,
                            tuple(float(v) for v in b))

    out = []
    for t in range(cfg.T):
        sub = np.random.default_rng([cfg.seed, t])
        name = f"syn-{t:05d}"
        out.append(_screened(lambda b: build(b, name),
                             lambda r: r.normal(0.0, cfg.scale, m), sub, name, cfg.screen))
    return out


@dataclass(frozen=True)
class UcFamilyConfig:
    n: int = 24
    m: int = 30
    T: int = 240
    seed: int = 11
    screen: bool = True

    def __post_init__(self):
        if min(self.n, self.m, self.T) < 1:
            raise ValueError("n, m and T must all be >= 1")
        if self.m < self.n - 1:
            raise ValueError("a connected network on n nodes needs at least n-1 lines")


def ptdf_matrix(n: int, lines: list[tuple[int, int]], reactance: np.ndarray) -> np.ndarray:
    """DC power transfer distribution factors, node 0 as slack; shape (lines, n)."""
    inc = np.zeros((len(lines), n))
    for k, (f, t) in enumerate(lines):
        inc[k, f] = 1.0
        inc[k, t] = -1.0
    bl = np.diag(1.0 / reactance)
    bbus = inc.T @ bl @ inc
    ptdf = np.zeros((len(lines), n))
    ptdf[:, 1:] = bl @ inc[:, 1:] @ np.linalg.inv(bbus[1:, 1:])
    return ptdf


def _network(rng, n: int, m: int) -> list[tuple[int, int]]:
    order = rng.permutation(n)
    lines = []
    for k in range(1, n):
        lines.append((int(order[rng.integers(0, k)]), int(order[k])))
    seen = {tuple(sorted(e)) for e in lines}
    while len(lines) < m:
        f, t = (int(v) for v in rng.choice(n, 2, replace=False))
        if (min(f, t), max(f, t)) in seen and len(seen) < n * (n - 1) // 2:
            continue
        seen.add((min(f, t), max(f, t)))
        lines.append((f, t))
    return lines


def _merit_order(c, u, total):
    x = np.zeros_like(u)
    left = total
    for i in np.argsort(c, kind="stable"):
        x[i] = min(u[i], left)
        left -= x[i]
    return x


def gen_uc(cfg: UcFamilyConfig) -> list[MilpInstance]:
    n, m = cfg.n, cfg.m
    rng = np.random.default_rng(cfg.seed)
    lines = _network(rng, n, m)
    ptdf = ptdf_matrix(n, lines, rng.uniform(0.05, 0.5, m))
    ptdf[np.abs(ptdf) < 1e-10] = 0.0
    u = rng.uniform(50.0, 200.0, n)
    l = u * rng.uniform(0.2, 0.5, n)
    c = rng.uniform(10.0, 60.0, n)
    shape = rng.dirichlet(np.full(n, 2.0))  # how demand spreads over nodes
    total_cap = u.sum()

    # line limits sized from a reference merit-order dispatch at mid demand
    d_ref = 0.55 * total_cap * shape
    flow = ptdf @ (_merit_order(c, u, d_ref.sum()) - d_ref)
    f = np.maximum(np.abs(flow) * rng.uniform(0.7, 1.6, m), 0.05 * total_cap / n)

    hours = np.arange(24)
    daily = 0.75 + 0.25 * np.sin((hours - 8) / 24 * 2 * np.pi)
    week = np.array([1.0, 1.02, 1.03, 1.02, 0.98, 0.85, 0.8])

    links = _link_rows(n, l, u)
    objective = tuple(c.tolist()) + (0.0,) * n
    bounds = ((None, None),) * n + ((0.0, 1.0),) * n
    ones = [(i, 1.0) for i in range(n)]

    def build(d, name):
        rows = canonicalize(ones, "=", float(d.sum()), learnable=False)
        for j in range(m):
            terms = [(i, float(ptdf[j, i])) for i in range(n) if ptdf[j, i] != 0.0]
            shift = float(ptdf[j] @ d)
            rows += canonicalize(terms, "<=", f[j] + shift)
            rows += canonicalize(terms, ">=", -f[j] + shift)
        return MilpInstance(name, n, n, objective, tuple(rows + links), bounds,
                            tuple(float(v) for v in d))

    def sample_for(t):
        level = daily[t % 24] * week[(t // 24) % 7]

        def sample(r):
            frac = np.clip(level * r.uniform(0.9, 1.1) * 0.6, 0.3, 0.8)
            d = shape * r.lognormal(0.0, 0.15, n)
            return d / d.sum() * frac * total_cap
        return sample

    out = []
    for t in range(cfg.T):
        sub = np.random.default_rng([cfg.seed, t])
        name = f"uc-{t:05d}"
        out.append(_screened(lambda d: build(d, name), sample_for(t), sub, name, cfg.screen))
    return out
