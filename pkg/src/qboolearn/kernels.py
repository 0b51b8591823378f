"""Batch fidelity evaluation with a compiled backend and a numpy fallback.

The compiled extension ``_ckernels`` is used when it imports; otherwise the
pure numpy module ``_kernels_py`` is. Set ``QBOOLEARN_BACKEND=python`` to
force the fallback. Both backends consume identical inputs, so results are
reproducible for a given seed regardless of which one runs (up to last-ulp
differences in libm versus numpy transcendental functions).
"""
from __future__ import annotations

import importlib
import math
import os
from dataclasses import dataclass, field

import numpy as np

from . import _kernels_py
from .boolean_task import BooleanTask, active_set
from .circuits import CLASSICAL, check_kind, optimized_phases

MODE_CLASSICAL = _kernels_py.MODE_CLASSICAL
MODE_QUANTUM_REAL = _kernels_py.MODE_QUANTUM_REAL
MODE_QUANTUM_GENERAL = _kernels_py.MODE_QUANTUM_GENERAL


def _load_compiled():
    try:
        return importlib.import_module(f"{__package__}._ckernels")
    except ImportError:
        return None


_compiled = _load_compiled()


def available_backends() -> list[str]:
    return ["cython", "python"] if _compiled is not None else ["python"]


def get_backend(name: str | None = None):
    """Return the kernel module for ``name`` (``cython``, ``python`` or auto)."""
    name = name or os.environ.get("QBOOLEARN_BACKEND", "auto")
    if name == "python":
        return _kernels_py
    if name in ("cython", "auto"):
        if _compiled is not None:
            return _compiled
        if name == "cython":
            raise ImportError("compiled kernels are not built")
        return _kernels_py
    raise ValueError(f"unknown backend {name!r}")


def backend_name(module=None) -> str:
    module = module or get_backend()
    return "cython" if module is _compiled and _compiled is not None else "python"


def _submask_table(n_bits: int):
    lists = [active_set(x) for x in range(1 << n_bits)]
    offset = np.zeros(len(lists) + 1, dtype=np.int64)
    offset[1:] = np.cumsum([len(s) for s in lists])
    index = np.fromiter((k for s in lists for k in s), dtype=np.int64,
                        count=int(offset[-1]))
    return index, offset


@dataclass(frozen=True)
class FidelityKernel:
    """Vectorized task-fidelity of one circuit kind against one target.

    Call it with an array of shape (B, 2^N) of parameter vectors to get the
    B task-fidelities. Quantum phases default to the optimized assignment.
    Phases that are all 0 or pi use the commuting-rotation fast path.
    """

    kind: str
    n_bits: int
    target: BooleanTask | None = None
    phases: tuple[float, ...] | None = None
    backend: str | None = None
    _args: tuple = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        check_kind(self.kind)
        n = int(self.n_bits)
        if n < 1:
            raise ValueError("n_bits must be positive")
        task = self.target or BooleanTask.constant_zero(n)
        if task.n_bits != n:
            raise ValueError("target and kernel disagree on n_bits")
        object.__setattr__(self, "target", task)
        dim = 1 << n
        target_bits = task.truth_table()
        signs = np.zeros(dim)
        cos_phi = np.ones(dim)
        sin_phi = np.zeros(dim)
        sub_index = np.zeros(0, dtype=np.int64)
        sub_offset = np.zeros(dim + 1, dtype=np.int64)
        if self.kind == CLASSICAL:
            if self.phases is not None:
                raise ValueError("phases only apply to the quantum circuit")
            mode = MODE_CLASSICAL
        else:
            phi = optimized_phases(n) if self.phases is None else np.asarray(
                self.phases, dtype=np.float64)
            if phi.shape != (dim,):
                raise ValueError(f"expected {dim} phases")
            object.__setattr__(self, "phases", tuple(float(v) for v in phi))
            if np.all((phi == 0.0) | (phi == math.pi)):
                mode = MODE_QUANTUM_REAL
                # G(p, 0) rotates by -theta and G(p, pi) by +theta.
                signs = np.where(phi == math.pi, 1.0, -1.0)
            else:
                mode = MODE_QUANTUM_GENERAL
                cos_phi = np.cos(phi)
                sin_phi = np.sin(phi)
                sub_index, sub_offset = _submask_table(n)
        object.__setattr__(self, "_args", (
            n, mode, target_bits, signs, cos_phi, sin_phi, sub_index, sub_offset,
        ))

    @property
    def dim(self) -> int:
        return 1 << self.n_bits

    @property
    def mode(self) -> int:
        return self._args[1]

    @property
    def module(self):
        return get_backend(self.backend)

    def with_backend(self, backend: str | None) -> "FidelityKernel":
        return FidelityKernel(self.kind, self.n_bits, self.target, self.phases,
                              backend)

    def __call__(self, P) -> np.ndarray:
        P = np.ascontiguousarray(P, dtype=np.float64)
        if P.ndim != 2 or P.shape[1] != self.dim:
            raise ValueError(f"expected shape (B, {self.dim}), got {P.shape}")
        return self.module.batch_fidelity(P, *self._args)

    def prob_zero(self, P) -> np.ndarray:
        P = np.ascontiguousarray(P, dtype=np.float64)
        n, mode, _, *rest = self._args
        return self.module.prob_zero(P, n, mode, *rest)

    def count_at_least(self, P, threshold: float) -> int:
        P = np.ascontiguousarray(P, dtype=np.float64)
        return int(self.module.count_at_least(P, threshold, *self._args))

    def first_at_least(self, P, threshold: float) -> int:
        P = np.ascontiguousarray(P, dtype=np.float64)
        return int(self.module.first_at_least(P, threshold, *self._args))

    def de_generation(self, P, F, a, b, c, r, s, weight, crossover) -> int:
        return int(self.module.de_generation(P, F, a, b, c, r, s, weight,
                                             crossover, *self._args))
