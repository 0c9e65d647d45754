"""Quantile plug-in estimator of the transfer function and pointwise CIs.

ghat(x) = xi_n^Y(F_Z(x)): the sample quantile of the outputs at the known
probability level of x.  The same estimator serves i.i.d. and short-range
dependent data; only the interval construction differs (see subsampling).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.special import ndtri

from .distributions import KnownDistribution
from .empirical import Sample, sample_quantile
from .errors import DomainError

__all__ = ["EstimateResult", "PointwiseCI", "estimate", "pointwise_ci", "estimate_with_ci", "default_grid"]


@dataclass(frozen=True)
class PointwiseCI:
    """One Theorem-style pointwise interval [lo, hi] at a single x.

    c1/c2 are the probability levels whose sample quantiles bound g(x);
    ``clamped`` records whether either level had to be pulled back into
    (0, 1] before inverting.
    """

    lo: float
    hi: float
    c1: float
    c2: float
    clamped: bool


@dataclass(frozen=True)
class EstimateResult:
    xs: np.ndarray
    ghat: np.ndarray
    ci_lo: np.ndarray
    ci_hi: np.ndarray
    level: float
    n: int
    clamped: np.ndarray  # per-point flag: CI levels clamped at a probability boundary


def _interior_grid(dist: KnownDistribution, xs) -> np.ndarray:
    arr = np.atleast_1d(np.asarray(xs, dtype=float))
    if not np.all(np.isfinite(arr)):
        raise DomainError("evaluation points must be finite")
    a, b = dist.support
    bad = (arr <= a) | (arr >= b)
    if np.any(bad):
        raise DomainError(f"evaluation point {arr[bad][0]!r} is outside the open support ({a}, {b})")
    return arr


def _plug_in_levels(dist: KnownDistribution, xs: np.ndarray) -> np.ndarray:
    # F_Z can underflow to exactly 0/1 in the far tails even though the
    # point is interior; the inf-quantile answer there is the extreme order
    # statistic, which the tiny clip preserves.
    p = np.asarray(dist.cdf(xs), dtype=float)
    return np.clip(p, np.finfo(float).tiny, 1.0)


def estimate(sample_y: Sample, dist: KnownDistribution, xs):
    """ghat at each grid point; scalar in, scalar out."""
    arr = _interior_grid(dist, xs)
    out = sample_quantile(sample_y, _plug_in_levels(dist, arr))
    if np.ndim(xs) == 0:
        return float(out[0]) if np.ndim(out) else float(out)
    return np.asarray(out, dtype=float)


def _ci_levels(p: np.ndarray, n: int, alpha: float):
    half = ndtri(alpha / 2.0) * np.sqrt(p * (1.0 - p) / n)
    c1 = p + half        # ndtri(alpha/2) < 0
    c2 = p - half
    lo_floor = 1.0 / n
    c1_cl = np.clip(c1, lo_floor, 1.0)
    c2_cl = np.clip(c2, lo_floor, 1.0)
    c2_cl = np.maximum(c2_cl, c1_cl)
    clamped = (c1 != c1_cl) | (c2 != c2_cl)
    return c1_cl, c2_cl, clamped


def pointwise_ci(sample_y: Sample, dist: KnownDistribution, x: float, alpha: float) -> PointwiseCI:
    """Asymptotic level-(1-alpha) interval for g(x) from sample quantiles.

    c1 = F(x) + z_{alpha/2} sqrt(F(1-F)/n) and c2 likewise with z_{1-alpha/2};
    both are clamped into [1/n, 1] before taking quantiles, with the clamp
    recorded, so extreme F(x) degrades gracefully instead of erroring.
    Requires alpha in (0, 1/2).
    """
    if not (0.0 < alpha < 0.5):
        raise DomainError("alpha must lie in (0, 1/2)")
    arr = _interior_grid(dist, x)
    p = _plug_in_levels(dist, arr)
    c1, c2, clamped = _ci_levels(p, sample_y.n, alpha)
    lo = sample_quantile(sample_y, c1)
    hi = sample_quantile(sample_y, c2)
    return PointwiseCI(
        lo=float(lo[0]),
        hi=float(hi[0]),
        c1=float(c1[0]),
        c2=float(c2[0]),
        clamped=bool(clamped[0]),
    )


def estimate_with_ci(sample_y: Sample, dist: KnownDistribution, xs, alpha: float) -> EstimateResult:
    """Vectorised estimate + pointwise CI over a grid."""
    if not (0.0 < alpha < 0.5):
        raise DomainError("alpha must lie in (0, 1/2)")
    arr = _interior_grid(dist, xs)
    p = _plug_in_levels(dist, arr)
    ghat = sample_quantile(sample_y, p)
    c1, c2, clamped = _ci_levels(p, sample_y.n, alpha)
    lo = sample_quantile(sample_y, c1)
    hi = sample_quantile(sample_y, c2)
    return EstimateResult(
        xs=arr,
        ghat=np.asarray(ghat, dtype=float),
        ci_lo=np.asarray(lo, dtype=float),
        ci_hi=np.asarray(hi, dtype=float),
        level=1.0 - alpha,
        n=sample_y.n,
        clamped=clamped,
    )


def default_grid(dist: KnownDistribution, npoints: int = 201, p_lo: float = 0.01, p_hi: float = 0.99) -> np.ndarray:
    """Equispaced quantile-scale grid: xi_Z(p) for p linearly spaced in [p_lo, p_hi]."""
    if npoints < 1:
        raise DomainError("grid needs at least one point")
    if not (0.0 < p_lo <= p_hi < 1.0):
        raise DomainError("grid quantile range must satisfy 0 < p_lo <= p_hi < 1")
    ps = np.linspace(p_lo, p_hi, npoints)
    return np.asarray(dist.quantile(ps), dtype=float)
