import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from warmcg.congen import (RAY_CUT, UnboundedProblemError, constraint_generation,
                           identify_invariant_set, ray_cut)
from warmcg.milp import solve_milp
from warmcg.model import MilpInstance, Status, canonicalize

from conftest import X_GE_05, X_LE_15, XY_GE_B, Y_LE_175, random_milp

# toy golden: binding and invariant sets per training b
GOLDEN = {
    1.0: ({X_GE_05}, {X_GE_05, Y_LE_175}),
    1.25: ({X_GE_05}, {X_GE_05, Y_LE_175}),
    1.5: ({X_GE_05, XY_GE_B}, {X_GE_05, XY_GE_B, Y_LE_175}),
}


def test_toy_identification(toy):
    train, _ = toy
    for inst in train:
        ident = identify_invariant_set(inst)
        B, S = GOLDEN[inst.theta[0]]
        assert set(ident.binding.ids) == B
        assert set(ident.invariant.ids) == S
        np.testing.assert_allclose(ident.full.solution, [0.5, 1.0])


def test_first_step_is_a_ray_cut(toy):
    train, _ = toy
    trace = identify_invariant_set(train[0]).trace
    assert trace.steps[0].kind == RAY_CUT
    assert trace.steps[0].added == Y_LE_175
    assert trace.iterations == 2


def test_ray_cut_prefers_lowest_index_on_ties(toy):
    _, test = toy
    # y <= 1.75 and y <= 2.25 both score 1 against r = (0, 1)
    assert ray_cut(test, np.array([0.0, 1.0]), test.make_set([X_GE_05])) == (Y_LE_175, 1.0)


def test_cold_cg_on_toy(toy):
    _, test = toy
    trace = constraint_generation(test)
    assert trace.outcome.optimal
    assert trace.objective == pytest.approx(-0.5)
    assert trace.iterations == len(trace.steps) + 1


def test_genuinely_unbounded():
    rows = canonicalize([(0, 1.0)], "<=", 3.0)
    inst = MilpInstance("open", 1, 1, (-1.0, -1.0), tuple(rows), ((None, None), (0.0, None)))
    with pytest.raises(UnboundedProblemError, match="genuinely unbounded"):
        constraint_generation(inst)


def test_infeasible_reduced_problem_stops():
    rows = canonicalize([(0, 1.0)], "<=", 0.5, learnable=False)
    rows += canonicalize([(0, 1.0)], ">=", 0.7, learnable=False)
    rows += canonicalize([(0, 1.0)], "<=", 3.0)
    inst = MilpInstance("bad", 1, 0, (1.0,), tuple(rows), ((0.0, 5.0),))
    trace = constraint_generation(inst)
    assert trace.outcome.status is Status.INFEASIBLE
    assert trace.iterations == 1


def test_warm_start_with_full_set_takes_one_iteration(toy):
    _, test = toy
    assert constraint_generation(test, test.full_set()).iterations == 1


@settings(max_examples=80, deadline=None)
@given(st.integers(0, 10**6), st.data())
def test_cg_reaches_full_optimum(seed, data):
    rng = np.random.default_rng(seed)
    inst = random_milp(rng, learnable_frac=0.7)
    full = solve_milp(inst)
    if not full.optimal:
        return
    start = data.draw(st.sets(st.sampled_from(inst.learnable_ids))) if inst.learnable_ids else set()
    try:
        trace = constraint_generation(inst, sorted(start))
    except UnboundedProblemError:
        pytest.fail("bounded full problem reported as unbounded")
    assert trace.objective == pytest.approx(full.objective, abs=1e-6)
    assert set(start) <= set(trace.final.ids)
    # every step adds a new row
    assert len(set(trace.added)) == len(trace.added)


@settings(max_examples=60, deadline=None)
@given(st.integers(0, 10**6))
def test_invariant_set_is_invariant(seed):
    inst = random_milp(np.random.default_rng(seed), learnable_frac=0.8)
    if not solve_milp(inst).optimal:
        return
    ident = identify_invariant_set(inst)
    assert set(ident.binding.ids) <= set(ident.invariant.ids)
    again = constraint_generation(inst, ident.invariant)
    assert again.iterations == 1
    assert again.objective == pytest.approx(ident.full.objective, abs=1e-6)
