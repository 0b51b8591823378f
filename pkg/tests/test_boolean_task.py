import pytest
from hypothesis import given
from hypothesis import strategies as st

from oracles import truth_value
from qboolearn.boolean_task import (BooleanTask, active_set, eval_boolean, monomial_vars,
                                    popcount)


@st.composite
def tasks(draw, max_bits=4):
    n = draw(st.integers(1, max_bits))
    coeffs = draw(st.lists(st.integers(0, 1), min_size=1 << n, max_size=1 << n))
    return BooleanTask(n, tuple(coeffs))


def test_table1_functions():
    f1 = BooleanTask(1, (0, 0))
    f4 = BooleanTask(1, (1, 1))
    assert eval_boolean(f1, 1) == 0
    assert eval_boolean(f4, 1) == 0
    assert eval_boolean(f4, 0) == 1


def test_and_function():
    assert eval_boolean(BooleanTask(2, (0, 0, 0, 1)), 3) == 1
    assert [eval_boolean(BooleanTask(2, (0, 0, 0, 1)), x) for x in range(4)] == [0, 0, 0, 1]


def test_active_set_examples():
    assert active_set(0) == [0]
    assert active_set(2) == [0, 2]
    assert active_set(5, 3) == [0, 1, 4, 5]


def test_monomial_vars():
    assert monomial_vars(0) == []
    assert monomial_vars(5) == [1, 3]


@pytest.mark.parametrize("n", range(1, 11))
def test_active_set_even_and_balanced(n):
    for x in range(1, 1 << n):
        subs = active_set(x, n)
        assert len(subs) == 2 ** popcount(x)
        assert subs == sorted(subs) and subs[0] == 0
        even = sum(1 for k in subs if popcount(k) % 2 == 0)
        assert 2 * even == len(subs)


def test_active_set_is_submasks():
    for x in range(64):
        assert active_set(x) == [k for k in range(64) if k & x == k]


@given(tasks())
def test_eval_matches_monomial_oracle(task):
    for x in range(task.dim):
        assert eval_boolean(task, x) == truth_value(task.coefficients, x)


@given(tasks(max_bits=6))
def test_truth_table_matches_eval(task):
    table = task.truth_table()
    assert [int(v) for v in table] == [eval_boolean(task, x) for x in range(task.dim)]


@given(tasks(max_bits=6))
def test_string_roundtrip(task):
    for fmt in ("hex", "bin"):
        assert BooleanTask.from_string(task.to_string(fmt), task.n_bits) == task
    assert BooleanTask.from_int(task.to_int(), task.n_bits) == task


def test_constant_zero():
    for n in range(1, 6):
        task = BooleanTask.constant_zero(n)
        assert not task.truth_table().any()
        assert task.to_string() == "0x0"


def test_bare_binary_string():
    # Bit k of the value is a_k, so "10" sets a_1.
    assert BooleanTask.from_string("10", 1).coefficients == (0, 1)


@pytest.mark.parametrize("bad", [
    lambda: BooleanTask(1, (0, 0, 0)),
    lambda: BooleanTask(1, (0, 2)),
    lambda: BooleanTask(0, (0,)),
    lambda: BooleanTask.from_int(16, 1),
    lambda: eval_boolean(BooleanTask(1, (0, 0)), 2),
    lambda: active_set(4, 2),
    lambda: BooleanTask(1, (0, 0)).to_string("oct"),
])
def test_invalid(bad):
    with pytest.raises(ValueError):
        bad()
