"""Known input distributions: normal, gamma, and uniform.

The observed model is Y = g(Z) with the law of Z fully specified, so every
estimator in this package consumes one of these objects for F_Z, f_Z, f_Z'
and the quantile function.  Instances are immutable and all evaluators accept
scalars or numpy arrays.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.special import (
    digamma,
    gammainc,
    gammaincinv,
    gammaln,
    ndtr,
    ndtri,
    polygamma,
)

from .errors import ConvergenceError, DomainError

__all__ = [
    "KnownDistribution",
    "Normal",
    "Gamma",
    "Uniform",
    "fit_gamma_mle",
    "fit_normal",
    "fit_uniform",
    "FAMILIES",
]


def _as_array(x, name: str):
    arr = np.asarray(x, dtype=float)
    if not np.all(np.isfinite(arr)):
        raise DomainError(f"{name} must be finite")
    return arr


def _maybe_scalar(arr, like):
    if np.ndim(like) == 0:
        return float(arr)
    return arr


class KnownDistribution:
    """Fully specified continuous law with open support (a, b).

    F is strictly increasing on (a, b) with F(a+) = 0 and F(b-) = 1; the
    density is positive on the interior for every shipped family.
    """

    @property
    def support(self) -> tuple[float, float]:
        raise NotImplementedError

    def cdf(self, x):
        """F(x); 0 at or below the lower endpoint, 1 at or above the upper."""
        raise NotImplementedError

    def pdf(self, x):
        """f(x); zero outside the open support."""
        raise NotImplementedError

    def pdf_derivative(self, x):
        """f'(x); only defined strictly inside the support."""
        raise NotImplementedError

    def quantile(self, p):
        """inf{x : F(x) >= p} for p in (0, 1)."""
        raise NotImplementedError

    def rvs(self, n: int, rng: np.random.Generator) -> np.ndarray:
        """Draw n independent variates."""
        raise NotImplementedError

    def contains(self, x) -> bool:
        a, b = self.support
        arr = np.asarray(x, dtype=float)
        return bool(np.all((arr > a) & (arr < b)))

    def _require_interior(self, x, op: str):
        a, b = self.support
        arr = _as_array(x, "x")
        if np.any(arr <= a) or np.any(arr >= b):
            raise DomainError(f"{op} requires x strictly inside ({a}, {b})")
        return arr

    @staticmethod
    def _require_prob(p):
        arr = np.asarray(p, dtype=float)
        if not np.all(np.isfinite(arr)) or np.any(arr <= 0.0) or np.any(arr >= 1.0):
            raise DomainError("p must lie in the open interval (0, 1)")
        return arr


@dataclass(frozen=True)
class Normal(KnownDistribution):
    mean: float = 0.0
    sd: float = 1.0

    def __post_init__(self):
        if not (self.sd > 0.0 and math.isfinite(self.sd) and math.isfinite(self.mean)):
            raise DomainError("normal requires finite mean and sd > 0")

    @property
    def support(self):
        return (-math.inf, math.inf)

    def cdf(self, x):
        arr = _as_array(x, "x")
        return _maybe_scalar(ndtr((arr - self.mean) / self.sd), x)

    def pdf(self, x):
        arr = _as_array(x, "x")
        z = (arr - self.mean) / self.sd
        out = np.exp(-0.5 * z * z) / (self.sd * math.sqrt(2.0 * math.pi))
        return _maybe_scalar(out, x)

    def pdf_derivative(self, x):
        arr = self._require_interior(x, "pdf_derivative")
        z = (arr - self.mean) / self.sd
        out = -(z / self.sd) * np.exp(-0.5 * z * z) / (self.sd * math.sqrt(2.0 * math.pi))
        return _maybe_scalar(out, x)

    def quantile(self, p):
        arr = self._require_prob(p)
        return _maybe_scalar(self.mean + self.sd * ndtri(arr), p)

    def rvs(self, n, rng):
        return rng.normal(self.mean, self.sd, size=n)


@dataclass(frozen=True)
class Gamma(KnownDistribution):
    """Gamma with shape/rate convention: density rate^shape x^(shape-1) e^(-rate x) / Gamma(shape)."""

    shape: float
    rate: float

    def __post_init__(self):
        if not (self.shape > 0.0 and self.rate > 0.0):
            raise DomainError("gamma requires shape > 0 and rate > 0")

    @classmethod
    def from_scale(cls, shape: float, scale: float) -> "Gamma":
        if not scale > 0.0:
            raise DomainError("gamma scale must be > 0")
        return cls(shape=shape, rate=1.0 / scale)

    @property
    def scale(self) -> float:
        return 1.0 / self.rate

    @property
    def support(self):
        return (0.0, math.inf)

    def cdf(self, x):
        arr = _as_array(x, "x")
        out = np.where(arr <= 0.0, 0.0, gammainc(self.shape, self.rate * np.maximum(arr, 0.0)))
        return _maybe_scalar(out, x)

    def _log_pdf(self, arr):
        return (
            self.shape * math.log(self.rate)
            + (self.shape - 1.0) * np.log(arr)
            - self.rate * arr
            - gammaln(self.shape)
        )

    def pdf(self, x):
        arr = _as_array(x, "x")
        out = np.zeros_like(arr, dtype=float)
        pos = arr > 0.0
        if np.any(pos):
            out[pos] = np.exp(self._log_pdf(arr[pos]))
        return _maybe_scalar(out, x)

    def pdf_derivative(self, x):
        # f'(x) = f(x) * ((shape-1)/x - rate)
        arr = self._require_interior(x, "pdf_derivative")
        out = np.exp(self._log_pdf(arr)) * ((self.shape - 1.0) / arr - self.rate)
        return _maybe_scalar(out, x)

    def quantile(self, p):
        arr = self._require_prob(p)
        return _maybe_scalar(gammaincinv(self.shape, arr) / self.rate, p)

    def rvs(self, n, rng):
        return rng.gamma(self.shape, 1.0 / self.rate, size=n)


@dataclass(frozen=True)
class Uniform(KnownDistribution):
    lo: float = 0.0
    hi: float = 1.0

    def __post_init__(self):
        if not (math.isfinite(self.lo) and math.isfinite(self.hi) and self.lo < self.hi):
            raise DomainError("uniform requires finite lo < hi")

    @property
    def support(self):
        return (self.lo, self.hi)

    def cdf(self, x):
        arr = _as_array(x, "x")
        out = np.clip((arr - self.lo) / (self.hi - self.lo), 0.0, 1.0)
        return _maybe_scalar(out, x)

    def pdf(self, x):
        arr = _as_array(x, "x")
        inside = (arr > self.lo) & (arr < self.hi)
        out = np.where(inside, 1.0 / (self.hi - self.lo), 0.0)
        return _maybe_scalar(out, x)

    def pdf_derivative(self, x):
        arr = self._require_interior(x, "pdf_derivative")
        return _maybe_scalar(np.zeros_like(arr), x)

    def quantile(self, p):
        arr = self._require_prob(p)
        return _maybe_scalar(self.lo + arr * (self.hi - self.lo), p)

    def rvs(self, n, rng):
        return rng.uniform(self.lo, self.hi, size=n)


def _validate_positive_data(data) -> np.ndarray:
    arr = np.asarray(data, dtype=float)
    if arr.ndim != 1 or arr.size < 2:
        raise DomainError("need at least two observations")
    if not np.all(np.isfinite(arr)) or np.any(arr <= 0.0):
        raise DomainError("gamma fitting requires finite, strictly positive data")
    return arr


def fit_gamma_mle(data, max_iter: int = 200, grad_tol: float = 1e-8) -> Gamma:
    """Maximum-likelihood gamma fit via Newton on the profile shape equation.

    For fixed shape k the rate MLE is k / mean, which reduces the problem to
    log(k) - digamma(k) = log(mean) - mean(log data).  Initialisation is the
    method of moments; at the returned parameters the per-observation
    log-likelihood gradient has norm below ``grad_tol``.

    Raises
    ------
    DomainError
        Nonpositive or too-few observations.
    ConvergenceError
        Near-constant data (the profile equation degenerates) or no
        convergence within ``max_iter`` iterations; ``last`` holds the final
        (shape, rate) iterate.
    """
    arr = _validate_positive_data(data)
    mean = float(np.mean(arr))
    mean_log = float(np.mean(np.log(arr)))
    s = math.log(mean) - mean_log  # >= 0 by Jensen, 0 iff constant
    if not s > 1e-12:
        raise ConvergenceError("data are (numerically) constant; gamma MLE is degenerate", last=None)

    var = float(np.var(arr))
    k = mean * mean / var if var > 0.0 else 1.0 / (2.0 * s)
    k = min(max(k, 1e-8), 1e8)

    for _ in range(max_iter):
        f = math.log(k) - float(digamma(k)) - s
        fprime = 1.0 / k - float(polygamma(1, k))
        step = f / fprime
        k_new = k - step
        if k_new <= 0.0:
            k_new = k / 2.0
        k = min(max(k_new, 1e-10), 1e10)
        rate = k / mean
        grad_shape = math.log(rate) + mean_log - float(digamma(k))
        grad_rate = k / rate - mean
        if math.hypot(grad_shape, grad_rate) < grad_tol:
            return Gamma(shape=k, rate=rate)

    raise ConvergenceError(
        f"gamma MLE did not converge in {max_iter} iterations",
        last=(k, k / mean),
    )


def fit_normal(data) -> Normal:
    arr = np.asarray(data, dtype=float)
    if arr.size < 2 or not np.all(np.isfinite(arr)):
        raise DomainError("need at least two finite observations")
    sd = float(np.std(arr))
    if not sd > 0.0:
        raise ConvergenceError("data are constant; normal MLE is degenerate", last=None)
    return Normal(mean=float(np.mean(arr)), sd=sd)


def fit_uniform(data) -> Uniform:
    arr = np.asarray(data, dtype=float)
    if arr.size < 2 or not np.all(np.isfinite(arr)):
        raise DomainError("need at least two finite observations")
    lo, hi = float(np.min(arr)), float(np.max(arr))
    if not lo < hi:
        raise ConvergenceError("data are constant; uniform MLE is degenerate", last=None)
    return Uniform(lo=lo, hi=hi)


# Family name -> MLE fitter, used by the parametric-bootstrap test and the CLI.
FAMILIES = {
    "gamma": fit_gamma_mle,
    "normal": fit_normal,
    "uniform": fit_uniform,
}
