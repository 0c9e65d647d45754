"""Subsampling confidence intervals for ghat(x) under short-range dependence.

Every length-b window contributes a block estimate ghat_{b,i}(x); the ECDF
of sqrt(b) |ghat_{b,i}(x) - ghat(x)| over all n-b+1 overlapping windows
approximates the law of sqrt(n) |ghat(x) - g(x)|, so its (1-alpha) quantile
d rescales to the interval ghat(x) +- d / sqrt(n).  d is kept in the
sqrt(b)-normalised units; only the interval construction divides by sqrt(n).
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .distributions import KnownDistribution
from .empirical import Sample, block_quantiles, sample_quantile
from .errors import DomainError
from .estimator import estimate

__all__ = ["SubsampleResult", "default_block_length", "subsample_distribution", "subsample_ci"]


@dataclass(frozen=True)
class SubsampleResult:
    x: float
    ghat: float
    d_quantile: float
    ci: tuple[float, float]
    b: int
    n: int
    level: float


def default_block_length(n: int) -> int:
    """ceil(n^(4/5)), the block rule used throughout the experiments."""
    return int(math.ceil(n ** 0.8))


def subsample_distribution(sample_y: Sample, dist: KnownDistribution, x: float, b: int) -> Sample:
    """Sample carrying the n-b+1 scaled block deviations sqrt(b)|ghat_b,i - ghat|.

    Its ECDF (via empirical.ecdf) is the nondecreasing step function
    S_{n,b}(eta, x), and empirical.sample_quantile gives inf-quantiles of it.
    """
    if not (2 <= b < sample_y.n):
        raise DomainError(f"block length must satisfy 2 <= b < n (got b={b}, n={sample_y.n})")
    a, bb = dist.support
    xf = float(x)
    if not (a < xf < bb):
        raise DomainError(f"x={xf} is outside the open support ({a}, {bb})")
    p = float(dist.cdf(xf))
    p = min(max(p, np.finfo(float).tiny), 1.0)
    ghat_full = float(estimate(sample_y, dist, xf))
    ghat_blocks = block_quantiles(sample_y, b, p)
    return Sample(math.sqrt(b) * np.abs(ghat_blocks - ghat_full))


def subsample_ci(
    sample_y: Sample,
    dist: KnownDistribution,
    x: float,
    alpha: float,
    b: int | None = None,
) -> SubsampleResult:
    """Level-(1-alpha) subsampling interval for g(x); b defaults to ceil(n^(4/5))."""
    if not (0.0 < alpha < 1.0):
        raise DomainError("alpha must lie in (0, 1)")
    if b is None:
        b = default_block_length(sample_y.n)
    deviations = subsample_distribution(sample_y, dist, x, b)
    d = float(sample_quantile(deviations, 1.0 - alpha))
    ghat = float(estimate(sample_y, dist, float(x)))
    half = d / math.sqrt(sample_y.n)
    return SubsampleResult(
        x=float(x),
        ghat=ghat,
        d_quantile=d,
        ci=(ghat - half, ghat + half),
        b=int(b),
        n=sample_y.n,
        level=1.0 - alpha,
    )
