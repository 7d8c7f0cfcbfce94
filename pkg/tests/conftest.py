import numpy as np
import pytest

from warmcg.instances import gen_toy
from warmcg.model import MilpInstance, canonicalize

# toy rows by role, in canonical order
X_LE_15, Y_LE_175, X_GE_05, XY_GE_B, Y_GE_0, Y_LE_225 = range(6)


@pytest.fixture(scope="session")
def toy():
    return gen_toy()


def random_milp(rng, n_cont=None, n_int=None, n_rows=None, name="rand",
                int_range=(-3, 3), cont_range=(-5.0, 5.0), learnable_frac=1.0, free_cont=False):
    """Small random MILP with finite integer ranges and boxed continuous vars."""
    n_cont = rng.integers(0, 4) if n_cont is None else n_cont
    n_int = rng.integers(1, 5) if n_int is None else n_int
    nv = n_cont + n_int
    n_rows = rng.integers(1, 7) if n_rows is None else n_rows
    rows = []
    for j in range(n_rows):
        coeffs = [(i, float(v)) for i, v in enumerate(rng.integers(-4, 5, nv)) if v != 0]
        if not coeffs:
            coeffs = [(int(rng.integers(nv)), 1.0)]
        rhs = float(rng.integers(-6, 10)) + float(rng.choice([0.0, 0.5, 0.25]))
        rows += canonicalize(coeffs, "<=", rhs, learnable=bool(rng.random() < learnable_frac))
    cont = (None, None) if free_cont else (float(cont_range[0]), float(cont_range[1]))
    bounds = [cont] * n_cont
    bounds += [(float(int_range[0]), float(int_range[1]))] * n_int
    obj = tuple(float(v) for v in rng.integers(-5, 6, nv))
    return MilpInstance(name, int(n_cont), int(n_int), obj, tuple(rows), tuple(bounds),
                        tuple(float(r.rhs) for r in rows))


ACCEPTANCE: list[str] = []


def record(criterion: int, title: str, ok: bool, detail: str = "") -> None:
    line = f"criterion {criterion} [{'PASS' if ok else 'FAIL'}] {title}"
    ACCEPTANCE.append(line + (f" :: {detail}" if detail else ""))


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE:
        terminalreporter.section("acceptance")
        for line in sorted(ACCEPTANCE, key=lambda l: int(l.split()[1])):
            terminalreporter.write_line(line)
