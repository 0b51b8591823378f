"""Worker pool and seed derivation shared by the Monte-Carlo and learner runs.

Every unit of work (a sample chunk or a learning trial) owns a random stream
derived from ``SeedSequence(root_seed, spawn_key=key)``, where ``key``
identifies the unit. Results therefore do not depend on how units are
distributed over workers or in which order they finish.
"""
from __future__ import annotations

import os
from concurrent.futures import ProcessPoolExecutor

import numpy as np

WORKERS_ENV = "QBOOLEARN_WORKERS"


def worker_count(workers: int | None = None) -> int:
    if workers is None:
        workers = int(os.environ.get(WORKERS_ENV, "1") or 1)
    return max(1, int(workers))


def substream(seed: int, *key: int) -> np.random.Generator:
    return np.random.default_rng(np.random.SeedSequence(seed, spawn_key=key))


def derived_seed(seed: int, *key: int) -> int:
    """A 63-bit integer seed for unit ``key``, printable in result files."""
    state = np.random.SeedSequence(seed, spawn_key=key).generate_state(2, np.uint32)
    return (int(state[0]) << 31) ^ int(state[1])


def pmap(fn, items, workers: int | None = None) -> list:
    """Order-preserving map, in-process for one worker."""
    items = list(items)
    n = worker_count(workers)
    if n == 1 or len(items) < 2:
        return [fn(item) for item in items]
    with ProcessPoolExecutor(max_workers=n) as pool:
        return list(pool.map(fn, items, chunksize=max(1, len(items) // (4 * n))))
