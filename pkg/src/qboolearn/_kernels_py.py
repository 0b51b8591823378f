"""Pure numpy implementation of the batch kernels.

Mirrors ``_ckernels.pyx`` function for function. Every function takes the
same trailing circuit arguments::

    n_bits, mode, target, signs, cos_phi, sin_phi, sub_index, sub_offset

``mode`` selects the classical parity product (0), the commuting-rotation
quantum form valid for phases in {0, pi} (1), or general sequential 2x2
products (2). ``sub_index[sub_offset[x]:sub_offset[x + 1]]`` lists the
active gates of ``x`` in ascending order (used by mode 2 only).
"""
from functools import lru_cache

import numpy as np

MODE_CLASSICAL = 0
MODE_QUANTUM_REAL = 1
MODE_QUANTUM_GENERAL = 2
LOG_SPACE_MIN_DIM = 65


@lru_cache(maxsize=None)
def _levels(n_bits):
    idx = np.arange(1 << n_bits)
    out = []
    for i in range(n_bits):
        hi = idx[(idx & (1 << i)) != 0]
        out.append((hi, hi ^ (1 << i)))
    return out


def prob_zero(P, n_bits, mode, signs, cos_phi, sin_phi, sub_index, sub_offset):
    """P(0|x) for every row of ``P``; returns shape (B, 2^N)."""
    P = np.asarray(P, dtype=np.float64)
    if mode == MODE_CLASSICAL:
        w = 2.0 * P - 1.0
        for hi, lo in _levels(n_bits):
            w[:, hi] *= w[:, lo]
        return 0.5 + 0.5 * w
    if mode == MODE_QUANTUM_REAL:
        # Gates commute as plane rotations; track exp(i * angle) per input.
        w = np.sqrt(P) + 1j * (signs * np.sqrt(1.0 - P))
        for hi, lo in _levels(n_bits):
            w[:, hi] *= w[:, lo]
        return w.real ** 2
    cs = np.sqrt(P)
    sn = np.sqrt(1.0 - P)
    e = cos_phi + 1j * sin_phi
    out = np.empty_like(P)
    for x in range(1 << n_bits):
        alpha = np.ones(P.shape[0], dtype=np.complex128)
        beta = np.zeros(P.shape[0], dtype=np.complex128)
        for k in sub_index[sub_offset[x]:sub_offset[x + 1]]:
            alpha, beta = (cs[:, k] * alpha + e[k] * sn[:, k] * beta,
                           -e[k].conjugate() * sn[:, k] * alpha + cs[:, k] * beta)
        out[:, x] = alpha.real ** 2 + alpha.imag ** 2
    return out


def batch_fidelity(P, n_bits, mode, target, signs, cos_phi, sin_phi,
                   sub_index, sub_offset):
    p0 = prob_zero(P, n_bits, mode, signs, cos_phi, sin_phi, sub_index, sub_offset)
    pt = np.clip(np.where(target == 1, 1.0 - p0, p0), 0.0, 1.0)
    terms = np.sqrt(pt)
    dim = 1 << n_bits
    if dim < LOG_SPACE_MIN_DIM:
        return np.prod(terms, axis=1) ** (1.0 / dim)
    zero = np.any(terms == 0.0, axis=1)
    with np.errstate(divide="ignore"):
        logs = np.log(np.where(zero[:, None], 1.0, terms))
    return np.where(zero, 0.0, np.exp(logs.sum(axis=1) / dim))


def count_at_least(P, threshold, *circuit):
    return int(np.count_nonzero(batch_fidelity(P, *circuit) >= threshold))


def first_at_least(P, threshold, *circuit):
    hits = np.flatnonzero(batch_fidelity(P, *circuit) >= threshold)
    return int(hits[0]) if hits.size else -1


def de_generation(P, F, a, b, c, r, s, weight, crossover, *circuit):
    """One synchronous DE generation, updating ``P`` and ``F`` in place.

    Returns the number of replaced members.
    """
    M = P.shape[0]
    mutant = np.clip(P[a] + weight * (P[b] - P[c]), 0.0, 1.0)
    keep = r > crossover
    keep[np.arange(M), s] = True
    trial = np.where(keep, P, mutant)
    ft = batch_fidelity(trial, *circuit)
    better = ft > F
    P[better] = trial[better]
    F[better] = ft[better]
    return int(np.count_nonzero(better))
