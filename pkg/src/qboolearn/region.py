"""Monte-Carlo volume of the acceptable region {p : F(p) >= 1 - epsilon}.

Points are drawn uniformly from the unit hypercube [0, 1]^D. Sampling is cut
into fixed chunks of ``CHUNK`` points; chunk ``j`` draws from the substream
keyed by ``(n_bits, j)``, so the classical and quantum estimates at the same
seed share their sample points and the result is independent of the worker
count.

For very small regions an optional corner stratification samples only the
box [1 - delta, 1]^D around the all-ones solution and rescales the hit
fraction by delta^D. This is exact only if the region lies inside the box.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from functools import partial
from statistics import NormalDist


from ._parallel import pmap, substream
from .boolean_task import BooleanTask
from .kernels import FidelityKernel

CHUNK = 1 << 20


@dataclass(frozen=True)
class RegionEstimate:
    kind: str
    n_bits: int
    epsilon: float
    samples: int
    hits: int
    stratify_delta: float | None = None

    @property
    def dim(self) -> int:
        return 1 << self.n_bits

    @property
    def scale(self) -> float:
        """Volume of the sampled box relative to the unit hypercube."""
        if self.stratify_delta is None:
            return 1.0
        return self.stratify_delta ** self.dim

    @property
    def gamma(self) -> float:
        return self.scale * self.hits / self.samples

    @property
    def std_error(self) -> float:
        f = self.hits / self.samples
        return self.scale * math.sqrt(f * (1.0 - f) / self.samples)


def _count_chunk(args, kernel: FidelityKernel, threshold: float, seed: int,
                 delta: float | None) -> int:
    index, size = args
    rng = substream(seed, kernel.n_bits, index)
    P = rng.random((size, kernel.dim))
    if delta is not None:
        P = 1.0 - delta * P
    return kernel.count_at_least(P, threshold)


def estimate_gamma(kind: str, n_bits: int, target: BooleanTask | None = None,
                   epsilon: float = 0.05, samples: int = 10**6, seed: int = 0,
                   stratify_delta: float | None = None, workers: int | None = None,
                   backend: str | None = None) -> RegionEstimate:
    if not 0.0 < epsilon <= 1.0:
        raise ValueError("epsilon must lie in (0, 1]")
    if samples < 1:
        raise ValueError("samples must be positive")
    if stratify_delta is not None and not 0.0 < stratify_delta <= 1.0:
        raise ValueError("stratify_delta must lie in (0, 1]")
    kernel = FidelityKernel(kind, n_bits, target, backend=backend)
    chunks = [(j, min(CHUNK, samples - j * CHUNK))
              for j in range(-(-samples // CHUNK))]
    count = partial(_count_chunk, kernel=kernel, threshold=1.0 - epsilon,
                    seed=seed, delta=stratify_delta)
    hits = sum(pmap(count, chunks, workers))
    return RegionEstimate(kind, n_bits, epsilon, samples, hits, stratify_delta)


def upper_bound(estimate: RegionEstimate, confidence: float = 0.95) -> float:
    """One-sided upper confidence bound on gamma.

    Zero hits give the exact binomial limit -ln(1 - confidence) / samples;
    otherwise the normal approximation gamma + z * std_error.
    """
    if not 0.0 < confidence < 1.0:
        raise ValueError("confidence must lie in (0, 1)")
    if estimate.hits == 0:
        return estimate.scale * -math.log1p(-confidence) / estimate.samples
    z = NormalDist().inv_cdf(confidence)
    return estimate.gamma + z * estimate.std_error


def gamma_upper_bound(kind: str, n_bits: int, target: BooleanTask | None = None,
                      epsilon: float = 0.05, samples: int = 10**6,
                      confidence: float = 0.95, seed: int = 0,
                      workers: int | None = None) -> float:
    est = estimate_gamma(kind, n_bits, target, epsilon, samples, seed,
                         workers=workers)
    return upper_bound(est, confidence)
