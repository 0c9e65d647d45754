"""Empirical distribution functions and exact sample quantiles.

The quantile convention throughout is the inf definition
xi_n(p) = inf{x : F_n(x) >= p}, i.e. the order statistic at rank ceil(n p)
with no interpolation.  Exactness matters: the transport identity
xi_n(g(Y), p) = g(xi_n(Y, p)) for strictly increasing g holds bit-for-bit
under this convention and several tests rely on it.
"""

from __future__ import annotations

import numpy as np
from sortedcontainers import SortedList

from .errors import DomainError

__all__ = ["Sample", "ecdf", "sample_quantile", "block_quantiles", "quantile_rank"]


class Sample:
    """Immutable ordered view of observations.

    Keeps the original sequence (block operations slide over it in time
    order) alongside a sorted copy and the sorting permutation.
    """

    __slots__ = ("values", "sorted_values", "order", "n")

    def __init__(self, values):
        arr = np.asarray(values, dtype=float)
        if arr.ndim != 1 or arr.size == 0:
            raise DomainError("a sample needs at least one observation in a flat sequence")
        if not np.all(np.isfinite(arr)):
            raise DomainError("sample values must be finite")
        self.values = arr.copy()
        self.values.flags.writeable = False
        self.order = np.argsort(arr, kind="stable")
        self.sorted_values = self.values[self.order]
        self.sorted_values.flags.writeable = False
        self.n = int(arr.size)

    def __len__(self) -> int:
        return self.n

    def map(self, fn) -> "Sample":
        """Sample of fn applied elementwise (original time order kept)."""
        return Sample(fn(self.values))


def ecdf(sample: Sample, x):
    """F_n(x) = (#{Y_i <= x}) / n, right-continuous, exact counting."""
    pos = np.searchsorted(sample.sorted_values, x, side="right")
    out = np.asarray(pos, dtype=float) / sample.n
    if np.ndim(x) == 0:
        return float(out)
    return out


def quantile_rank(n: int, p) -> np.ndarray:
    """1-based order-statistic rank of the inf-quantile at level p.

    Computes ceil(n p) and then corrects for float fuzz so that the returned
    rank i is exactly min{i : i/n >= p} under float comparison, which makes
    ecdf(sample_quantile(p)) >= p hold without tolerance.
    """
    arr = np.asarray(p, dtype=float)
    if not np.all(np.isfinite(arr)) or np.any(arr <= 0.0) or np.any(arr > 1.0):
        raise DomainError("quantile level must lie in (0, 1]")
    rank = np.ceil(arr * n).astype(np.int64)
    rank = np.clip(rank, 1, n)
    # ceil(n*p) can be off by one ulp in either direction
    down = (rank - 1) / n >= arr
    rank = np.where(down & (rank > 1), rank - 1, rank)
    up = rank / n < arr
    rank = np.where(up & (rank < n), rank + 1, rank)
    return rank


def sample_quantile(sample: Sample, p):
    """xi_n(p) = inf{x : F_n(x) >= p} for p in (0, 1]."""
    rank = quantile_rank(sample.n, p)
    out = sample.sorted_values[rank - 1]
    if np.ndim(p) == 0:
        return float(out)
    return out


def block_quantiles(sample: Sample, b: int, p: float) -> np.ndarray:
    """Inf-quantile of every length-b window of the sample, in start order.

    Maintains the window as an indexable sorted multiset, so the whole sweep
    costs O(n log b) instead of the naive O(n b log b).
    """
    if not (isinstance(b, (int, np.integer)) and 1 <= b <= sample.n):
        raise DomainError(f"block length must satisfy 1 <= b <= n (got {b})")
    rank = int(quantile_rank(b, p))
    values = sample.values
    window = SortedList(values[:b])
    out = np.empty(sample.n - b + 1, dtype=float)
    out[0] = window[rank - 1]
    for start in range(1, sample.n - b + 1):
        window.remove(values[start - 1])
        window.add(values[start + b - 1])
        out[start] = window[rank - 1]
    return out
