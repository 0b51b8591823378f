import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from qboolearn.boolean_task import BooleanTask
from qboolearn.circuits import (CLASSICAL, QUANTUM, ConditionalDistribution,
                                circuit_distribution)
from qboolearn.fidelity import (closed_form_fc_1bit, closed_form_fq_1bit, geometric_mean,
                                target_distribution, task_fidelity)

probs = st.floats(0.0, 1.0)
F1 = target_distribution(BooleanTask.constant_zero(1))


def test_target_examples():
    np.testing.assert_array_equal(F1.probs, [[1, 0], [1, 0]])
    np.testing.assert_array_equal(
        target_distribution(BooleanTask.constant_zero(2)).probs[:, 0], [1, 1, 1, 1])
    f3 = target_distribution(BooleanTask(1, (0, 1)))
    assert f3(0, 0) == 1 and f3(1, 1) == 1


def test_fidelity_examples():
    fc = task_fidelity(circuit_distribution(CLASSICAL, [0.9, 0.9]), F1)
    assert fc == pytest.approx(0.738 ** 0.25, abs=1e-12)
    assert fc == pytest.approx(0.9269, abs=1e-4)
    fq = task_fidelity(circuit_distribution(QUANTUM, [0.9, 0.9], [0.0, math.pi]), F1)
    assert fq == pytest.approx(0.9 ** 0.25, abs=1e-12)
    assert fq == pytest.approx(0.9740, abs=1e-4)


def test_closed_form_examples():
    assert closed_form_fc_1bit(1, 1) == 1.0
    assert closed_form_fc_1bit(0.5, 0.5) == pytest.approx(0.7071, abs=1e-4)
    assert closed_form_fq_1bit(1, 1, 2.0) == 1.0
    assert closed_form_fq_1bit(0.9, 0.9, math.pi) == pytest.approx(0.9740, abs=1e-4)
    assert closed_form_fq_1bit(0.9, 0.9, math.pi / 2) == pytest.approx(
        closed_form_fc_1bit(0.9, 0.9), abs=1e-15)


@given(st.integers(1, 4), st.data())
def test_self_fidelity_is_one(n, data):
    D = 1 << n
    task = BooleanTask(n, data.draw(st.lists(st.integers(0, 1), min_size=D, max_size=D)))
    t = target_distribution(task)
    assert task_fidelity(t, t) == 1.0
    p0 = data.draw(st.lists(probs, min_size=D, max_size=D))
    d = ConditionalDistribution.from_prob_zero(p0)
    assert task_fidelity(d, d) == pytest.approx(1.0, abs=1e-12)


@given(probs, probs, st.floats(0, 2 * math.pi))
def test_interference_identity(p0, p1, delta):
    fc4 = closed_form_fc_1bit(p0, p1) ** 4
    fq4 = closed_form_fq_1bit(p0, p1, delta) ** 4
    term = -2 * p0 * math.sqrt(p0 * p1 * (1 - p0) * (1 - p1)) * math.cos(delta)
    assert fq4 - fc4 == pytest.approx(term, abs=1e-12)


@given(st.integers(1, 4), st.data())
def test_constant_zero_reduces_to_sqrt_p0(n, data):
    D = 1 << n
    p = data.draw(st.lists(probs, min_size=D, max_size=D))
    d = circuit_distribution(CLASSICAL, p)
    want = np.prod(np.sqrt(d.probs[:, 0])) ** (1 / D)
    got = task_fidelity(d, target_distribution(BooleanTask.constant_zero(n)))
    assert got == pytest.approx(want, abs=1e-12)


@given(st.integers(1, 3), st.data())
def test_fidelity_one_iff_target_reached(n, data):
    D = 1 << n
    bits = data.draw(st.lists(st.integers(0, 1), min_size=D, max_size=D))
    target = target_distribution(BooleanTask(n, tuple(bits)))
    exact = target.probs.copy()
    assert task_fidelity(ConditionalDistribution(exact), target) == 1.0
    x = data.draw(st.integers(0, D - 1))
    off = data.draw(st.floats(1e-6, 1.0))
    y = int(np.argmax(exact[x]))
    exact[x, y] -= off
    exact[x, 1 - y] += off
    assert task_fidelity(ConditionalDistribution(exact), target) < 1.0


def test_geometric_mean_paths_agree(rng):
    terms = rng.uniform(0.5, 1.0, size=(50, 64))
    direct = geometric_mean(terms)
    logs = np.exp(np.log(terms).mean(axis=1))
    np.testing.assert_allclose(direct, logs, rtol=0, atol=1e-12)
    big = rng.uniform(0.5, 1.0, size=(50, 128))
    np.testing.assert_allclose(geometric_mean(big), np.prod(big, axis=1) ** (1 / 128),
                               atol=1e-12)


def test_geometric_mean_zero_and_underflow():
    terms = np.full((2, 1024), 1e-3)
    terms[1, 5] = 0.0
    out = geometric_mean(terms)
    assert out[0] == pytest.approx(1e-3, rel=1e-12)
    assert out[1] == 0.0


def test_dimension_mismatch():
    with pytest.raises(ValueError):
        task_fidelity(F1, target_distribution(BooleanTask.constant_zero(2)))
