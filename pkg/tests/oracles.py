"""Slow reference implementations written independently of the package.

They follow the circuit definitions literally: enumerate flip patterns,
multiply dense matrices on the full register, evaluate monomials one by one.
"""
import itertools
import math

import numpy as np


def controls(k):
    return [j for j in range(k.bit_length()) if (k >> j) & 1]


def truth_value(coefficients, x):
    out = 0
    for k, a in enumerate(coefficients):
        term = a
        for j in controls(k):
            term &= (x >> j) & 1
        out ^= term
    return out


def classical_p0_enumerated(p, x):
    """Sum the probabilities of all flip patterns with even parity."""
    active = [k for k in range(len(p)) if all((x >> j) & 1 for j in controls(k))]
    total = 0.0
    for flips in itertools.product((0, 1), repeat=len(active)):
        prob = 1.0
        for k, f in zip(active, flips):
            prob *= (1.0 - p[k]) if f else p[k]
        if sum(flips) % 2 == 0:
            total += prob
    return total


def gate(p, phi):
    c, s = math.sqrt(p), math.sqrt(1.0 - p)
    e = complex(math.cos(phi), math.sin(phi))
    return np.array([[c, e * s], [-e.conjugate() * s, c]])


def quantum_p0_register(p, phi, x):
    """Controlled gates as dense matrices on (input bits, work qubit).

    Basis index is 2 * x + w; gate k acts on w when every control bit of k
    is set. Gates are applied in increasing k.
    """
    n = len(p).bit_length() - 1
    dim = 2 << n
    state = np.zeros(dim, dtype=complex)
    state[2 * x] = 1.0
    for k in range(len(p)):
        U = np.eye(dim, dtype=complex)
        g = gate(p[k], phi[k])
        for xi in range(1 << n):
            if all((xi >> j) & 1 for j in controls(k)):
                U[2 * xi:2 * xi + 2, 2 * xi:2 * xi + 2] = g
        state = U @ state
    return abs(state[2 * x]) ** 2


def chain_product(p, phi, ks):
    M = np.eye(2, dtype=complex)
    for k in ks:
        M = gate(p[k], phi[k]) @ M
    return M
