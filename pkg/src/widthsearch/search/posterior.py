"""Stopping-rule probabilities for the slope-guided bisection.

The posterior that a maximum sits at the latest midpoint is
``likelihood * prior``:

* likelihood: fit a line through the earlier (midpoint, slope) pairs of
  one side, predict the slope at the latest midpoint, and take the normal
  CDF of the observed slope under ``Normal(prediction, sigma)``.  On the
  lower side (positive slopes) the complement is used, so on both sides a
  slope flatter than the trend means a larger likelihood.
* prior: ``delta / (upper - lower)``, the chance that a window of width
  delta dropped at random into the bracket covers the maximum.
"""

from __future__ import annotations

import math
from typing import NamedTuple

import numpy as np

LOWER = "lower"
UPPER = "upper"
SIDES = (LOWER, UPPER)

#: dispersion used for two-slope histories and for exact (zero-residual) fits
DEFAULT_SIGMA0 = 0.05

#: likelihood beyond which an observation sits more than 2 sd from the trend
TWO_SIGMA_LEVEL = 0.5 * math.erfc(-2.0 / math.sqrt(2.0))


class SingularFitError(ValueError):
    pass


class LineFit(NamedTuple):
    intercept: float
    slope: float
    sigma: float


def normal_cdf(x: float, mean: float = 0.0, sd: float = 1.0) -> float:
    return 0.5 * math.erfc(-(x - mean) / (sd * math.sqrt(2.0)))


def fit_line(xs, ys, sigma_floor: float = DEFAULT_SIGMA0) -> LineFit:
    """Ordinary least squares ``y = b0 + b1 x``; sigma is the population sd of residuals.

    An exact fit (residual sd numerically zero) gets ``sigma_floor`` instead.
    """
    x = np.asarray(xs, dtype=float)
    y = np.asarray(ys, dtype=float)
    if x.shape != y.shape or x.size < 2:
        raise SingularFitError("need at least two paired points")
    xc = x - x.mean()
    sxx = float(xc @ xc)
    if sxx == 0.0:
        raise SingularFitError("all x values identical")
    b1 = float(xc @ (y - y.mean())) / sxx
    b0 = float(y.mean() - b1 * x.mean())
    sigma = float(np.std(y - (b0 + b1 * x)))
    if sigma <= 1e-12 * max(1.0, float(np.abs(y).max())):
        sigma = sigma_floor
    return LineFit(b0, b1, sigma)


def likelihood(m, mid, side: str, sigma0: float = DEFAULT_SIGMA0) -> float:
    m = [float(v) for v in m]
    mid = [float(v) for v in mid]
    if side not in SIDES:
        raise ValueError(f"side must be one of {SIDES}, got {side!r}")
    if len(m) != len(mid):
        raise ValueError("slope and midpoint histories differ in length")
    if not m:
        raise ValueError("empty slope history")
    if len(m) == 1:
        return 0.5
    if len(m) == 2:
        cdf = normal_cdf(m[1], m[0], sigma0)
    else:
        fit = fit_line(mid[:-1], m[:-1], sigma_floor=sigma0)
        predicted = fit.intercept + fit.slope * mid[-1]
        cdf = normal_cdf(m[-1], predicted, fit.sigma)
    return 1.0 - cdf if side == LOWER else cdf


def prior(delta: float, lower: int, upper: int) -> float:
    if upper <= lower:
        raise ValueError(f"prior needs upper > lower, got [{lower}, {upper}]")
    return min(1.0, delta / (upper - lower))


def posterior_probability(m, mid, side: str, delta: float, lower: int, upper: int,
                          sigma0: float = DEFAULT_SIGMA0) -> tuple[float, float, float]:
    """Return ``(posterior, likelihood, prior)``."""
    lk = likelihood(m, mid, side, sigma0)
    pr = prior(delta, lower, upper)
    return lk * pr, lk, pr
