"""Random search and differential evolution over the circuit parameters.

Both learners maximize the task-fidelity of a :class:`FidelityKernel` and
stop at the first parameter vector with fidelity >= 1 - epsilon. Quantum
runs keep the phases fixed at the optimized assignment.
"""
from __future__ import annotations

from dataclasses import asdict, dataclass, field

import numpy as np

from .boolean_task import BooleanTask
from .circuits import check_kind
from .kernels import FidelityKernel
from .records import digest

RS_MAX_ITERATIONS = 10**7
DE_MAX_ITERATIONS = 10**4


class InvalidConfigError(ValueError):
    pass


@dataclass(frozen=True)
class LearnConfig:
    kind: str
    n_bits: int
    target: BooleanTask | None = None
    epsilon: float = 0.05
    max_iterations: int | None = None
    seed: int = 0

    def __post_init__(self):
        check_kind(self.kind)
        if not 0.0 < self.epsilon <= 1.0:
            raise InvalidConfigError("epsilon must lie in (0, 1]")
        if self.max_iterations is not None and self.max_iterations < 1:
            raise InvalidConfigError("max_iterations must be positive")

    @property
    def threshold(self) -> float:
        return 1.0 - self.epsilon

    def kernel(self, backend: str | None = None) -> FidelityKernel:
        return FidelityKernel(self.kind, self.n_bits, self.target, backend=backend)

    def as_dict(self) -> dict:
        d = asdict(self)
        task = self.target or BooleanTask.constant_zero(self.n_bits)
        d["target"] = task.to_string("hex")
        return d


@dataclass(frozen=True)
class DEConfig:
    population: int = 50
    weight: float = 0.4
    crossover: float = 0.85

    def __post_init__(self):
        if self.population < 4:
            raise InvalidConfigError("population must be at least 4")
        if not 0.0 <= self.crossover <= 1.0:
            raise InvalidConfigError("crossover must lie in [0, 1]")


@dataclass
class LearningTrace:
    """Outcome of one learning trial.

    ``iterations`` is None when the iteration cap was reached first. The
    fidelity series start at the initial population (index 0) for DE; random
    search only records its best-so-far series on request.
    """

    iterations: int | None
    seed: int
    config_digest: str
    best_fidelity: np.ndarray = field(default_factory=lambda: np.zeros(0))
    mean_fidelity: np.ndarray | None = None
    best_params: np.ndarray | None = None

    @property
    def converged(self) -> bool:
        return self.iterations is not None


def random_search(config: LearnConfig, keep_series: bool = False,
                  backend: str | None = None) -> LearningTrace:
    """Draw uniform parameter vectors until one is acceptable.

    Iterations count draws, starting at 1. Draws are taken from the seeded
    stream in growing batches; the batch size does not affect the result.
    """
    kernel = config.kernel(backend)
    rng = np.random.default_rng(config.seed)
    cap = config.max_iterations or RS_MAX_ITERATIONS
    tag = digest(config.as_dict())
    drawn, batch = 0, 64
    series = []
    running = 0.0
    while drawn < cap:
        size = min(batch, cap - drawn)
        P = rng.random((size, kernel.dim))
        if keep_series:
            F = kernel(P)
            hit = np.flatnonzero(F >= config.threshold)
            idx = int(hit[0]) if hit.size else -1
            upto = F[: idx + 1] if idx >= 0 else F
            best = np.maximum.accumulate(np.maximum(upto, running))
            running = float(best[-1])
            series.append(best)
        else:
            idx = kernel.first_at_least(P, config.threshold)
        if idx >= 0:
            return LearningTrace(drawn + idx + 1, config.seed, tag,
                                 _concat(series), best_params=P[idx].copy())
        drawn += size
        batch = min(batch * 2, 1 << 16)
    return LearningTrace(None, config.seed, tag, _concat(series))


def _concat(series):
    return np.concatenate(series) if series else np.zeros(0)


def learning_probability(traces, n: int) -> float:
    """Fraction of trials that succeeded within ``n`` iterations."""
    traces = list(traces)
    if not traces:
        raise ValueError("need at least one trace")
    done = sum(1 for t in traces if t.converged and t.iterations <= n)
    return done / len(traces)


def draw_de_indices(rng: np.random.Generator, M: int):
    """Per member ``i``, three indices distinct from each other and from i.

    Each index is drawn from the remaining pool size and shifted past the
    already-taken indices in ascending order.
    """
    i = np.arange(M)
    a = rng.integers(0, M - 1, M)
    a += a >= i
    lo, hi = np.minimum(i, a), np.maximum(i, a)
    b = rng.integers(0, M - 2, M)
    b += b >= lo
    b += b >= hi
    t1 = np.minimum(lo, b)
    t3 = np.maximum(hi, b)
    t2 = i + a + b - t1 - t3
    c = rng.integers(0, M - 3, M)
    c += c >= t1
    c += c >= t2
    c += c >= t3
    return a, b, c


def _draw_generation(rng, M, D):
    a, b, c = draw_de_indices(rng, M)
    r = rng.random((M, D))
    s = rng.integers(0, D, M)
    return a, b, c, r, s


def de_step(population, fitness, de: DEConfig, objective, rng):
    """One DE generation; returns the new (population, fitness).

    ``objective`` maps an (M, D) array to M fidelities. A
    :class:`FidelityKernel` objective runs the fused backend kernel.
    Trials keep the incumbent component where ``r_k > R`` or ``k == s`` and
    take the clamped mutant component elsewhere. A trial replaces its parent
    only on strict improvement.
    """
    P = np.array(population, dtype=np.float64)
    F = np.array(fitness, dtype=np.float64)
    M, D = P.shape
    if M != de.population:
        raise InvalidConfigError(f"population has {M} members, config says {de.population}")
    if M < 4:
        raise InvalidConfigError("population must be at least 4")
    a, b, c, r, s = _draw_generation(rng, M, D)
    if isinstance(objective, FidelityKernel):
        objective.de_generation(P, F, a, b, c, r, s, de.weight, de.crossover)
        return P, F
    mutant = np.clip(P[a] + de.weight * (P[b] - P[c]), 0.0, 1.0)
    keep = r > de.crossover
    keep[np.arange(M), s] = True
    trial = np.where(keep, P, mutant)
    ft = np.asarray(objective(trial), dtype=np.float64)
    better = ft > F
    P[better] = trial[better]
    F[better] = ft[better]
    return P, F


def de_run(config: LearnConfig, de: DEConfig = DEConfig(), horizon: int = 0,
           backend: str | None = None) -> LearningTrace:
    """Differential evolution from a uniform random population.

    Iterations count generations; success in the initial population counts
    as iteration 0. The run stops at the first success or at
    ``max_iterations``, but never before ``horizon`` generations, so that
    fidelity curves of a fixed length can be recorded. Continuing past the
    success does not change the reported iteration count.
    """
    kernel = config.kernel(backend)
    rng = np.random.default_rng(config.seed)
    M, D = de.population, kernel.dim
    cap = config.max_iterations or DE_MAX_ITERATIONS
    horizon = min(horizon, cap)
    P = rng.random((M, D))
    F = kernel(P)
    best = [F.max()]
    mean = [F.mean()]
    success = 0 if best[0] >= config.threshold else None
    it = 0
    while it < cap and (success is None or it < horizon):
        a, b, c, r, s = _draw_generation(rng, M, D)
        kernel.de_generation(P, F, a, b, c, r, s, de.weight, de.crossover)
        it += 1
        best.append(F.max())
        mean.append(F.mean())
        if success is None and best[-1] >= config.threshold:
            success = it
        if it % 64 == 0 and not np.any(np.ptp(P, axis=0)):
            # Identical members make every mutant equal its parent: frozen.
            pad = max(horizon - it, 0)
            best.extend([best[-1]] * pad)
            mean.extend([mean[-1]] * pad)
            break
    top = int(np.argmax(F))
    return LearningTrace(success, config.seed,
                         digest({**config.as_dict(), **asdict(de)}),
                         np.array(best), np.array(mean), P[top].copy())


def average_series(series, length: int | None = None) -> np.ndarray:
    """Average fidelity series over trials.

    Shorter series (runs that stopped early) hold their last value for the
    remaining iterations.
    """
    series = [np.asarray(s, dtype=np.float64) for s in series]
    if not series:
        raise ValueError("need at least one series")
    length = length or max(len(s) for s in series)
    out = np.zeros(length)
    for s in series:
        s = s[:length]
        out[: len(s)] += s
        out[len(s):] += s[-1]
    return out / len(series)


def mean_curve(traces, length: int | None = None, attr: str = "mean_fidelity") -> np.ndarray:
    """Average the ``attr`` series of a set of traces, see :func:`average_series`."""
    return average_series([getattr(t, attr) for t in traces], length)
