"""Boolean functions in positive-polarity Reed-Muller form.

Gate index ``k`` and input word ``x`` share one binary encoding: bit ``j-1``
of ``k`` is set iff the variable ``x_j`` appears in the monomial of ``a_k``.
A gate is activated by ``x`` exactly when ``k`` is a submask of ``x``.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np


def popcount(k: int) -> int:
    return bin(k).count("1")


def check_input(x: int, n_bits: int) -> int:
    x = int(x)
    if not 0 <= x < (1 << n_bits):
        raise ValueError(f"input word {x} out of range for {n_bits} bits")
    return x


@dataclass(frozen=True)
class BooleanTask:
    """An N-bit Boolean function given by its Reed-Muller coefficients.

    Parameters
    ----------
    n_bits : int
        Number of input bits N.
    coefficients : tuple of int
        Coefficients ``a_0 .. a_{2^N - 1}``, each 0 or 1.
    """

    n_bits: int
    coefficients: tuple[int, ...]

    def __post_init__(self):
        if int(self.n_bits) < 1:
            raise ValueError("n_bits must be positive")
        coeffs = tuple(int(a) for a in self.coefficients)
        if len(coeffs) != 1 << self.n_bits:
            raise ValueError(
                f"expected {1 << self.n_bits} coefficients, got {len(coeffs)}"
            )
        if any(a not in (0, 1) for a in coeffs):
            raise ValueError("coefficients must be 0 or 1")
        object.__setattr__(self, "coefficients", coeffs)

    @property
    def dim(self) -> int:
        return 1 << self.n_bits

    @classmethod
    def constant_zero(cls, n_bits: int) -> "BooleanTask":
        return cls(n_bits, (0,) * (1 << n_bits))

    @classmethod
    def from_int(cls, value: int, n_bits: int) -> "BooleanTask":
        """Bit ``k`` of ``value`` is the coefficient ``a_k``."""
        if value < 0 or value >> (1 << n_bits):
            raise ValueError(f"{value:#x} does not fit {1 << n_bits} coefficients")
        return cls(n_bits, tuple((value >> k) & 1 for k in range(1 << n_bits)))

    @classmethod
    def from_string(cls, text: str, n_bits: int) -> "BooleanTask":
        """Parse ``0x..`` (hex) or ``0b..``/bare binary coefficient strings."""
        text = text.strip().lower().replace("_", "")
        if text.startswith("0x"):
            value = int(text[2:], 16)
        else:
            value = int(text[2:] if text.startswith("0b") else text, 2)
        return cls.from_int(value, n_bits)

    def to_int(self) -> int:
        return sum(a << k for k, a in enumerate(self.coefficients))

    def to_string(self, fmt: str = "hex") -> str:
        value = self.to_int()
        if fmt == "hex":
            return f"{value:#x}"
        if fmt == "bin":
            return "0b" + format(value, f"0{self.dim}b")
        raise ValueError(f"unknown format {fmt!r}")

    def truth_table(self) -> np.ndarray:
        """Outputs ``f(x)`` for every ``x`` as a uint8 array of length 2^N."""
        # Moebius (XOR-zeta) transform of the coefficient vector.
        table = np.array(self.coefficients, dtype=np.uint8)
        for i in range(self.n_bits):
            b = 1 << i
            idx = np.arange(self.dim)
            hi = idx[(idx & b) != 0]
            table[hi] ^= table[hi ^ b]
        return table


def active_set(x: int, n_bits: int | None = None) -> list[int]:
    """Indices of the gates activated by input ``x``, ascending.

    These are the submasks of ``x``; index 0 is always present.
    """
    if n_bits is not None:
        check_input(x, n_bits)
    elif x < 0:
        raise ValueError("input word must be nonnegative")
    subs = []
    k = x
    while True:
        subs.append(k)
        if k == 0:
            break
        k = (k - 1) & x
    subs.reverse()
    return subs


def eval_boolean(task: BooleanTask, x: int) -> int:
    x = check_input(x, task.n_bits)
    out = 0
    for k in active_set(x):
        out ^= task.coefficients[k]
    return out


def monomial_vars(k: int) -> Sequence[int]:
    """1-based variable indices ``C_k`` appearing in monomial ``k``."""
    return [j + 1 for j in range(k.bit_length()) if (k >> j) & 1]
