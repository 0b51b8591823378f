"""Classical probabilistic and quantum single-qubit circuits on the work channel.

Each gate ``G_k`` is controlled by the input bits in monomial ``k`` and acts
on a work channel prepared in 0. In the classical circuit ``G_k`` is the
identity with probability ``p_k`` and NOT otherwise. In the quantum circuit
it is the unitary returned by :func:`gate_unitary`.
"""
from __future__ import annotations

import cmath
import math
from dataclasses import dataclass

import numpy as np

from .boolean_task import active_set, check_input, popcount

CLASSICAL = "classical"
QUANTUM = "quantum"
KINDS = (CLASSICAL, QUANTUM)


def check_kind(kind: str) -> str:
    if kind not in KINDS:
        raise ValueError(f"kind must be one of {KINDS}, got {kind!r}")
    return kind


def n_bits_for(dim: int) -> int:
    n = int(dim).bit_length() - 1
    if n < 1 or 1 << n != dim:
        raise ValueError(f"vector length {dim} is not 2^N with N >= 1")
    return n


def as_params(params, n_bits: int | None = None) -> np.ndarray:
    """Validate a parameter vector: length 2^N, every entry in [0, 1]."""
    p = np.asarray(params, dtype=np.float64)
    if p.ndim != 1:
        raise ValueError("parameter vector must be one-dimensional")
    n = n_bits_for(p.size)
    if n_bits is not None and n != n_bits:
        raise ValueError(f"expected {1 << n_bits} parameters, got {p.size}")
    if not np.all((p >= 0.0) & (p <= 1.0)):
        raise ValueError("probabilities must lie in [0, 1]")
    return p


def as_phases(phases, n_bits: int) -> np.ndarray:
    phi = np.asarray(phases, dtype=np.float64)
    if phi.shape != (1 << n_bits,):
        raise ValueError(f"expected {1 << n_bits} phases, got shape {phi.shape}")
    return phi


def gate_unitary(p: float, phi: float) -> np.ndarray:
    if not 0.0 <= p <= 1.0:
        raise ValueError(f"probability {p} outside [0, 1]")
    c = math.sqrt(p)
    s = math.sqrt(1.0 - p)
    e = cmath.exp(1j * phi)
    return np.array([[c, e * s], [-e.conjugate() * s, c]], dtype=np.complex128)


def optimized_phases(n_bits: int) -> np.ndarray:
    """Phase 0 for even-weight gate indices, pi for odd-weight ones."""
    if n_bits < 1:
        raise ValueError("n_bits must be positive")
    return np.array(
        [math.pi if popcount(k) % 2 else 0.0 for k in range(1 << n_bits)]
    )


def classical_prob_zero(params, x: int) -> float:
    """P_C(0|x): probability of an even number of flips among active gates."""
    p = as_params(params)
    x = check_input(x, n_bits_for(p.size))
    prod = 1.0
    for k in active_set(x):
        prod *= 2.0 * p[k] - 1.0
    return 0.5 + 0.5 * prod


def quantum_amplitude(params, phases, x: int) -> complex:
    """<0| G_{k_m} ... G_{k_1} |0> with active gates applied in ascending k.

    The state is propagated gate by gate, so the cost is linear in the
    number of active gates.
    """
    p = as_params(params)
    n = n_bits_for(p.size)
    phi = as_phases(phases, n)
    x = check_input(x, n)
    alpha, beta = 1.0 + 0j, 0j
    for k in active_set(x):
        c = math.sqrt(p[k])
        s = math.sqrt(1.0 - p[k])
        e = cmath.exp(1j * phi[k])
        alpha, beta = c * alpha + e * s * beta, -e.conjugate() * s * alpha + c * beta
    return alpha


@dataclass(frozen=True)
class ConditionalDistribution:
    """The set {P(y|x)} stored as an array ``probs[x, y]`` of shape (2^N, 2)."""

    probs: np.ndarray

    def __post_init__(self):
        probs = np.array(self.probs, dtype=np.float64)
        if probs.ndim != 2 or probs.shape[1] != 2:
            raise ValueError("probs must have shape (2^N, 2)")
        n_bits_for(probs.shape[0])
        if np.any(probs < 0.0) or np.any(probs > 1.0):
            raise ValueError("probabilities must lie in [0, 1]")
        if np.max(np.abs(probs.sum(axis=1) - 1.0)) > 1e-12:
            raise ValueError("P(0|x) + P(1|x) must equal 1")
        probs.setflags(write=False)
        object.__setattr__(self, "probs", probs)

    @classmethod
    def from_prob_zero(cls, p0) -> "ConditionalDistribution":
        p0 = np.clip(np.asarray(p0, dtype=np.float64), 0.0, 1.0)
        return cls(np.column_stack([p0, 1.0 - p0]))

    @property
    def n_bits(self) -> int:
        return n_bits_for(self.probs.shape[0])

    def __call__(self, y: int, x: int) -> float:
        return float(self.probs[x, y])

    def rows(self):
        """(x, P(0|x), P(1|x)) tuples, the CSV export layout."""
        return [(x, float(a), float(b)) for x, (a, b) in enumerate(self.probs)]


def circuit_distribution(kind: str, params, phases=None) -> ConditionalDistribution:
    check_kind(kind)
    p = as_params(params)
    n = n_bits_for(p.size)
    if kind == CLASSICAL:
        if phases is not None:
            raise ValueError("phases only apply to the quantum circuit")
        p0 = [classical_prob_zero(p, x) for x in range(1 << n)]
    else:
        if phases is None:
            raise ValueError("the quantum circuit requires phases")
        p0 = [abs(quantum_amplitude(p, phases, x)) ** 2 for x in range(1 << n)]
    return ConditionalDistribution.from_prob_zero(p0)
