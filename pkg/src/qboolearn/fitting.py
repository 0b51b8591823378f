"""Learning-curve models: exponential CDF and power-law scaling."""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.optimize import minimize_scalar


class FitUndefinedError(ValueError):
    pass


@dataclass(frozen=True)
class ExponentialFit:
    n_c: float
    residual: float
    n_points: int


@dataclass(frozen=True)
class PowerLawFit:
    alpha: float
    beta: float
    residual: float
    n_points: int

    def __call__(self, D):
        return self.alpha * np.asarray(D, dtype=np.float64) ** self.beta


def empirical_cdf(lengths, n_trials: int | None = None):
    """P(n) at each distinct trial length.

    ``lengths`` holds iterations-to-success of converged trials; when
    ``n_trials`` exceeds their count the rest are treated as unfinished.
    """
    lengths = np.sort(np.asarray(lengths, dtype=np.float64))
    total = n_trials if n_trials is not None else lengths.size
    if total < lengths.size or total == 0:
        raise ValueError("n_trials must cover all lengths")
    n, idx = np.unique(lengths, return_index=True)
    counts = np.append(idx[1:], lengths.size)
    return n, counts / total


def exponential_cdf(n, n_c):
    return 1.0 - np.exp(-np.asarray(n, dtype=np.float64) / n_c)


def fit_exponential_cdf(points, guess: float | None = None) -> ExponentialFit:
    """Least-squares n_c for P(n) = 1 - exp(-n / n_c).

    ``points`` is a sequence of (n, P(n)). The search is a bounded 1-D
    minimization in log n_c around ``guess``, by default the n at which P
    first reaches 1 - 1/e.
    """
    pts = np.asarray(points, dtype=np.float64)
    if pts.ndim != 2 or pts.shape[1] != 2 or pts.shape[0] < 2:
        raise FitUndefinedError("need at least two (n, P) points")
    n, p = pts[:, 0], pts[:, 1]
    if np.any((p < 0.0) | (p > 1.0)):
        raise ValueError("P values must lie in [0, 1]")
    if np.all(p == 0.0) or np.all(p == 1.0):
        raise FitUndefinedError("all P equal 0 or 1; n_c is not identified")
    order = np.argsort(n)
    n, p = n[order], p[order]
    if guess is None:
        # n at which the empirical CDF first reaches 1 - 1/e.
        above = np.flatnonzero(p >= 1.0 - math.exp(-1.0))
        guess = n[above[0]] if above.size else n[-1] / max(-math.log1p(-p[-1]), 1e-12)
    guess = max(float(guess), 1e-12)

    def loss(log_nc):
        return float(np.sum((p - exponential_cdf(n, math.exp(log_nc))) ** 2))

    centre = math.log(guess)
    res = minimize_scalar(loss, bounds=(centre - 5.0, centre + 5.0),
                          method="bounded", options={"xatol": 1e-10})
    n_c = math.exp(res.x)
    rms = math.sqrt(res.fun / n.size)
    return ExponentialFit(n_c, rms, int(n.size))


def fit_exponential_lengths(lengths, n_trials: int | None = None) -> ExponentialFit:
    """Fit trial lengths directly, starting from their mean (the geometric MLE)."""
    points = np.column_stack(empirical_cdf(lengths, n_trials))
    return fit_exponential_cdf(points, guess=float(np.mean(lengths)))


def fit_power_law(points) -> PowerLawFit:
    """alpha, beta from linear least squares on (log D, log n_c)."""
    pts = np.asarray(points, dtype=np.float64)
    if pts.ndim != 2 or pts.shape[1] != 2 or pts.shape[0] < 2:
        raise ValueError("need at least two (D, n_c) points")
    if np.any(pts <= 0.0):
        raise ValueError("power-law fit needs positive D and n_c")
    x, y = np.log(pts[:, 0]), np.log(pts[:, 1])
    A = np.column_stack([np.ones_like(x), x])
    coef, *_ = np.linalg.lstsq(A, y, rcond=None)
    rms = float(np.sqrt(np.mean((A @ coef - y) ** 2)))
    return PowerLawFit(float(math.exp(coef[0])), float(coef[1]), rms, int(x.size))
