"""Task-fidelity between a circuit's conditional distribution and a target.

The per-input term is the Bhattacharyya coefficient
``F_x = sum_y sqrt(P(y|x) P_target(y|x))`` and the task-fidelity is the
geometric mean of ``F_x`` over all 2^N inputs.
"""
from __future__ import annotations

import math

import numpy as np

from .boolean_task import BooleanTask
from .circuits import ConditionalDistribution

# Above this many inputs the geometric mean is taken in log space.
LOG_SPACE_MIN_DIM = 65


def target_distribution(task: BooleanTask) -> ConditionalDistribution:
    """Deterministic distribution concentrated on y = f(x)."""
    table = task.truth_table()
    return ConditionalDistribution.from_prob_zero(1.0 - table.astype(np.float64))


def geometric_mean(terms: np.ndarray) -> np.ndarray:
    """Geometric mean over the last axis of nonnegative terms.

    Uses a direct product for up to 64 terms and log space beyond, where an
    exact zero term forces the result to zero.
    """
    terms = np.asarray(terms, dtype=np.float64)
    dim = terms.shape[-1]
    if dim < LOG_SPACE_MIN_DIM:
        return np.prod(terms, axis=-1) ** (1.0 / dim)
    zero = np.any(terms == 0.0, axis=-1)
    with np.errstate(divide="ignore"):
        logs = np.log(np.where(terms == 0.0, 1.0, terms))
    return np.where(zero, 0.0, np.exp(logs.mean(axis=-1)))


def task_fidelity(circuit: ConditionalDistribution,
                  target: ConditionalDistribution) -> float:
    if circuit.probs.shape != target.probs.shape:
        raise ValueError(
            f"dimension mismatch: {circuit.probs.shape} vs {target.probs.shape}"
        )
    per_input = np.sqrt(circuit.probs * target.probs).sum(axis=1)
    return float(min(1.0, geometric_mean(per_input)))


def closed_form_fc_1bit(p0: float, p1: float) -> float:
    """Classical 1-bit fidelity against the constant-0 target."""
    return max(0.0, p0 - p0 * (p0 + p1) + 2.0 * p0 * p0 * p1) ** 0.25


def closed_form_fq_1bit(p0: float, p1: float, delta: float) -> float:
    """Quantum 1-bit fidelity against the constant-0 target.

    ``delta`` is the phase difference phi_1 - phi_0.
    """
    interference = 2.0 * p0 * math.sqrt(p0 * p1 * (1.0 - p0) * (1.0 - p1))
    radicand = closed_form_fc_1bit(p0, p1) ** 4 - interference * math.cos(delta)
    if radicand < -1e-12:
        raise ArithmeticError(f"negative fourth power {radicand!r}")
    return max(radicand, 0.0) ** 0.25
