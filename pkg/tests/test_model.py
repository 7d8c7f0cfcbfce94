import json

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from warmcg.formats import instance_from_dict, instance_to_dict
from warmcg.model import (Constraint, ConstraintSet, InfeasiblePointError, binding_set,
                          canonicalize, max_violation)

from conftest import X_GE_05, XY_GE_B, Y_LE_175


def test_canonicalize_examples():
    (row,) = canonicalize([(0, 1.0)], ">=", 0.5)
    assert row.coeffs == ((0, -1.0),) and row.rhs == -0.5
    (row,) = canonicalize([(0, 1.0), (1, 1.0)], ">=", 1.3)
    assert row.coeffs == ((0, -1.0), (1, -1.0)) and row.rhs == -1.3
    (row,) = canonicalize([(0, 1.0)], "<=", 1.5)
    assert row.coeffs == ((0, 1.0),) and row.rhs == 1.5


def test_canonicalize_equality_splits():
    le, ge = canonicalize([(1, 2.0), (0, -1.0)], "=", 4.0)
    assert le.coeffs == ((0, -1.0), (1, 2.0)) and le.rhs == 4.0
    assert ge.coeffs == ((0, 1.0), (1, -2.0)) and ge.rhs == -4.0


@pytest.mark.parametrize("bad", [float("nan"), float("inf")])
def test_canonicalize_rejects_non_finite(bad):
    with pytest.raises(ValueError):
        canonicalize([(0, bad)], "<=", 1.0)
    with pytest.raises(ValueError):
        canonicalize([(0, 1.0)], "<=", bad)


def test_constraint_invariants():
    with pytest.raises(ValueError):
        Constraint(((1, 1.0), (0, 1.0)), 0.0)
    with pytest.raises(ValueError):
        Constraint(((0, 0.0),), 0.0)


coeff_lists = st.lists(
    st.tuples(st.integers(0, 6), st.floats(-100, 100, allow_nan=False).filter(lambda v: v != 0)),
    min_size=1, max_size=6, unique_by=lambda t: t[0])


@given(coeff_lists, st.floats(-1e3, 1e3))
def test_canonicalize_idempotent_on_le(coeffs, rhs):
    (row,) = canonicalize(coeffs, "<=", rhs)
    (again,) = canonicalize(row.coeffs, "<=", row.rhs)
    assert again == row


def test_binding_set_toy(toy):
    train, _ = toy
    b1, _, b15 = train
    assert binding_set(b1, np.array([0.5, 1.0])).ids == (X_GE_05,)
    assert binding_set(b15, np.array([0.5, 1.0])).ids == (X_GE_05, XY_GE_B)


def test_binding_set_interior_is_empty(toy):
    train, _ = toy
    assert binding_set(train[0], np.array([1.0, 1.0])).ids == ()


def test_binding_set_rejects_infeasible_point(toy):
    train, _ = toy
    with pytest.raises(InfeasiblePointError) as err:
        binding_set(train[0], np.array([0.5, 2.0]))
    assert err.value.index == Y_LE_175


def test_max_violation_example(toy):
    _, test = toy
    j, v = max_violation(test, np.array([0.5, 2.0]), excluded=[X_GE_05])
    assert j == Y_LE_175
    assert v == pytest.approx(0.25)


def test_max_violation_feasible_and_ties(toy):
    _, test = toy
    assert max_violation(test, np.array([0.5, 1.0])) is None
    # x = 2.0, y = 2.25: rows x<=1.5 and y<=1.75 are both violated by 0.5
    j, v = max_violation(test, np.array([2.0, 2.25]))
    assert (j, v) == (0, pytest.approx(0.5))


@given(st.lists(st.floats(-3, 3), min_size=2, max_size=2), st.sets(st.integers(0, 5)))
def test_max_violation_none_iff_feasible(z, excluded):
    from warmcg.instances import toy_instance
    inst = toy_instance(1.3)
    A, b = inst.dense()
    r = A @ np.array(z) - b
    rest = [j for j in range(6) if j not in excluded]
    feasible = all(r[j] <= 1e-6 for j in rest)
    assert (max_violation(inst, np.array(z), excluded) is None) == feasible


def test_constraint_set_helpers(toy):
    train, _ = toy
    s = train[0].make_set([Y_LE_175, X_GE_05])
    assert s.ids == (Y_LE_175, X_GE_05)
    assert list(s.labels(train[0])) == [-1, 1, 1, -1, -1, -1]
    with pytest.raises(ValueError):
        s.add(X_GE_05)
    with pytest.raises(ValueError):
        ConstraintSet("x", (1, 1))
    with pytest.raises(ValueError):
        train[0].make_set([99])


def test_instance_json_round_trip(toy):
    train, test = toy
    d = instance_to_dict(test)
    back = instance_from_dict(json.loads(json.dumps(d)))
    assert back == test
    assert d["constraints"][XY_GE_B] == {"coeffs": [[0, -1.0], [1, -1.0]], "rhs": -1.3,
                                          "learnable": True}
