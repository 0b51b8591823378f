import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from qboolearn.circuits import CLASSICAL, KINDS, QUANTUM
from qboolearn.kernels import FidelityKernel
from qboolearn.learners import (DE_MAX_ITERATIONS, DEConfig, InvalidConfigError,
                                LearnConfig, LearningTrace, average_series, de_run,
                                de_step, draw_de_indices, learning_probability,
                                mean_curve, random_search)
from qboolearn.region import estimate_gamma


def trace(n):
    return LearningTrace(n, 0, "")


def test_learning_probability_examples():
    traces = [trace(1), trace(2), trace(4)]
    assert learning_probability(traces, 0) == 0
    assert learning_probability(traces, 2) == pytest.approx(2 / 3)
    assert learning_probability(traces + [trace(None)], 10**9) == 0.75
    with pytest.raises(ValueError):
        learning_probability([], 1)


@given(st.lists(st.one_of(st.none(), st.integers(0, 50)), min_size=1, max_size=30))
def test_learning_probability_nondecreasing(lengths):
    traces = [trace(n) for n in lengths]
    values = [learning_probability(traces, n) for n in range(60)]
    assert values == sorted(values) and 0 <= values[0] and values[-1] <= 1


@pytest.mark.parametrize("kind", KINDS)
def test_random_search_epsilon_one(kind):
    tr = random_search(LearnConfig(kind, 2, epsilon=1.0, seed=3))
    assert tr.iterations == 1 and tr.converged


def test_random_search_cap():
    tr = random_search(LearnConfig(CLASSICAL, 3, max_iterations=500, seed=1))
    assert tr.iterations is None and not tr.converged


def test_random_search_first_hit_is_reported(backend):
    cfg = LearnConfig(QUANTUM, 2, seed=17)
    tr = random_search(cfg, keep_series=True, backend=backend)
    # Replay the draws: same generator, same batch schedule.
    rng = np.random.default_rng(17)
    k = FidelityKernel(QUANTUM, 2)
    F = np.concatenate([k(rng.random((b, 4))) for b in (64, 128, 256)])
    first = int(np.flatnonzero(F >= 0.95)[0]) + 1
    assert tr.iterations == first
    assert len(tr.best_fidelity) == first
    assert np.all(np.diff(tr.best_fidelity) >= 0)
    assert FidelityKernel(QUANTUM, 2)(tr.best_params[None])[0] >= 0.95


def test_random_search_mean_matches_geometric():
    cfg = dict(kind=QUANTUM, n_bits=1)
    lengths = [random_search(LearnConfig(**cfg, seed=s)).iterations for s in range(1500)]
    est = estimate_gamma(QUANTUM, 1, samples=10**6, seed=0)
    sem = np.std(lengths, ddof=1) / math.sqrt(len(lengths))
    sigma = math.hypot(sem, est.std_error / est.gamma**2)
    assert abs(np.mean(lengths) - 1 / est.gamma) <= 3 * sigma


def test_de_indices_distinct_and_uniform():
    rng = np.random.default_rng(0)
    M = 5
    seen = {}
    for _ in range(4000):
        a, b, c = draw_de_indices(rng, M)
        i = np.arange(M)
        assert np.all((a != i) & (b != i) & (c != i) & (a != b) & (b != c) & (a != c))
        key = (int(a[0]), int(b[0]), int(c[0]))
        seen[key] = seen.get(key, 0) + 1
    assert len(seen) == 4 * 3 * 2
    counts = np.array(list(seen.values()))
    assert counts.min() > 0.6 * counts.mean()


def _population(rng, M, D):
    return rng.random((M, D))


@pytest.mark.parametrize("kind", KINDS)
def test_de_step_elitism_and_bounds(kind, backend):
    rng = np.random.default_rng(2)
    k = FidelityKernel(kind, 3, backend=backend)
    de = DEConfig(population=12, weight=1.5)
    P = _population(rng, 12, 8)
    F = k(P)
    for _ in range(40):
        P2, F2 = de_step(P, F, de, k, rng)
        assert np.all(F2 >= F)
        assert F2.mean() >= F.mean()
        assert np.all((P2 >= 0) & (P2 <= 1))
        np.testing.assert_allclose(F2, k(P2), atol=1e-12)
        P, F = P2, F2


def test_de_step_fused_matches_generic():
    de = DEConfig(population=10)
    k = FidelityKernel(CLASSICAL, 2)
    P = np.random.default_rng(0).random((10, 4))
    F = k(P)
    fused = de_step(P, F, de, k, np.random.default_rng(1))
    generic = de_step(P, F, de, lambda X: k(X), np.random.default_rng(1))
    np.testing.assert_allclose(fused[0], generic[0], atol=1e-15)
    np.testing.assert_allclose(fused[1], generic[1], atol=1e-15)


def test_de_step_crossover_zero_changes_one_component():
    de = DEConfig(population=8, crossover=0.0)
    P = np.random.default_rng(0).random((8, 16))
    # An objective that accepts every trial exposes the trial vectors.
    calls = {}

    def objective(X):
        calls["trial"] = X.copy()
        return np.full(len(X), 2.0)

    P2, _ = de_step(P, np.zeros(8), de, objective, np.random.default_rng(3))
    changed = (calls["trial"] != P).sum(axis=1)
    assert np.all(changed <= 1)


def test_de_step_zero_weight_copies_a():
    de = DEConfig(population=6, weight=0.0, crossover=1.0)
    P = np.random.default_rng(0).random((6, 4))
    seen = {}

    def objective(X):
        seen["trial"] = X.copy()
        return np.zeros(len(X))

    rng = np.random.default_rng(5)
    de_step(P, np.ones(6), de, objective, rng)
    a, _, _ = draw_de_indices(np.random.default_rng(5), 6)
    s = np.random.default_rng(5)
    draw_de_indices(s, 6)
    s.random((6, 4))
    s_idx = s.integers(0, 4, 6)
    want = P[a].copy()
    want[np.arange(6), s_idx] = P[np.arange(6), s_idx]
    np.testing.assert_array_equal(seen["trial"], want)


def test_de_step_solution_population_is_fixed():
    k = FidelityKernel(QUANTUM, 2)
    P = np.ones((6, 4))
    F = k(P)
    P2, F2 = de_step(P, F, DEConfig(population=6), k, np.random.default_rng(0))
    np.testing.assert_array_equal(P2, P)
    assert np.all(F2 == 1.0)


def test_de_step_validation():
    with pytest.raises(InvalidConfigError):
        DEConfig(population=3)
    with pytest.raises(InvalidConfigError):
        DEConfig(crossover=1.5)
    with pytest.raises(InvalidConfigError):
        de_step(np.zeros((5, 2)), np.zeros(5), DEConfig(population=6), lambda X: X[:, 0],
                np.random.default_rng())


@pytest.mark.parametrize("kind", KINDS)
def test_de_run_epsilon_one(kind):
    tr = de_run(LearnConfig(kind, 3, epsilon=1.0, seed=1))
    assert tr.iterations == 0
    assert len(tr.best_fidelity) == 1


@pytest.mark.parametrize("kind", KINDS)
def test_de_run_trace(kind):
    tr = de_run(LearnConfig(kind, 2, seed=4))
    assert tr.converged
    assert len(tr.best_fidelity) == tr.iterations + 1
    assert tr.best_fidelity[-1] >= 0.95 > tr.best_fidelity[-2] if tr.iterations else True
    for s in (tr.best_fidelity, tr.mean_fidelity):
        assert np.all(np.diff(s) >= 0)
        assert np.all((s >= 0) & (s <= 1))


def test_de_run_horizon_keeps_iteration_count():
    cfg = LearnConfig(CLASSICAL, 2, seed=9)
    short = de_run(cfg)
    long = de_run(cfg, horizon=200)
    assert short.iterations == long.iterations
    assert len(long.mean_fidelity) == 201
    np.testing.assert_array_equal(long.mean_fidelity[: len(short.mean_fidelity)],
                                  short.mean_fidelity)


def test_de_run_cap():
    tr = de_run(LearnConfig(CLASSICAL, 5, epsilon=0.001, max_iterations=20, seed=0))
    assert tr.iterations is None
    assert len(tr.best_fidelity) <= 21
    assert DE_MAX_ITERATIONS == 10**4


def test_de_run_deterministic_across_backends():
    from qboolearn.kernels import available_backends
    cfg = LearnConfig(QUANTUM, 3, seed=21)
    runs = [de_run(cfg, horizon=60, backend=b) for b in available_backends()]
    for r in runs[1:]:
        assert r.iterations == runs[0].iterations
        np.testing.assert_allclose(r.mean_fidelity, runs[0].mean_fidelity, atol=1e-12)


def test_average_series_holds_last_value():
    out = average_series([[0.0, 1.0], [0.0, 0.5, 0.7, 0.9]])
    np.testing.assert_allclose(out, [0.0, 0.75, 0.85, 0.95])
    tr = LearningTrace(1, 0, "", mean_fidelity=np.array([0.2, 0.4]))
    np.testing.assert_allclose(mean_curve([tr], 3), [0.2, 0.4, 0.4])


@pytest.mark.parametrize("kwargs", [dict(epsilon=0.0), dict(epsilon=1.2),
                                    dict(max_iterations=0), dict(kind="analog")])
def test_invalid_config(kwargs):
    base = dict(kind=CLASSICAL, n_bits=1)
    with pytest.raises(ValueError):
        LearnConfig(**{**base, **kwargs})
