"""Shared statistical kernels.

Pure functions over 1-d float arrays. Skewness defaults to the population
(biased) form; ranks are 0-based with average ranks on ties; the KS p-value
uses the asymptotic Kolmogorov distribution.
"""

from __future__ import annotations

import math

import numpy as np

from .errors import ValidationError

PERCENTILE_LEVELS = (1, 5, 25, 50, 75, 95, 99)


def _as_vector(x, name: str) -> np.ndarray:
    arr = np.asarray(x, dtype=np.float64)
    if arr.ndim != 1:
        raise ValidationError(f"{name} must be 1-dimensional")
    return arr


def average_ranks(x) -> np.ndarray:
    """0-based ranks, ties sharing the average of their positions."""
    arr = _as_vector(x, "x")
    n = arr.shape[0]
    order = np.argsort(arr, kind="stable")
    ranks = np.empty(n, dtype=np.float64)
    sorted_vals = arr[order]
    # positions of equal runs in the sorted order
    boundary = np.flatnonzero(np.diff(sorted_vals) != 0) + 1
    starts = np.concatenate(([0], boundary))
    ends = np.concatenate((boundary, [n]))
    for s, e in zip(starts, ends):
        ranks[order[s:e]] = (s + e - 1) / 2.0
    return ranks


def pearson(x, y) -> float:
    x = _as_vector(x, "x")
    y = _as_vector(y, "y")
    if x.shape != y.shape:
        raise ValidationError("inputs must have equal length")
    if x.shape[0] < 2:
        raise ValidationError("need at least 2 observations")
    xc = x - x.mean()
    yc = y - y.mean()
    denom = math.sqrt(float(xc @ xc)) * math.sqrt(float(yc @ yc))
    if denom == 0.0:
        raise ValidationError("constant input has no defined correlation")
    if np.array_equal(x, y):
        return 1.0
    # rounding can push a perfect correlation a few ulp outside [-1, 1]
    return min(1.0, max(-1.0, float(xc @ yc) / denom))


def spearman(x, y) -> float:
    """Pearson correlation of average-ranked vectors."""
    return pearson(average_ranks(x), average_ranks(y))


def fisher_skewness(x, corrected: bool = False) -> float:
    """Third standardized moment g1; corrected=True applies the sample factor."""
    arr = _as_vector(x, "x")
    n = arr.shape[0]
    if n < 3:
        raise ValidationError("skewness needs at least 3 observations")
    centered = arr - arr.mean()
    m2 = float(np.mean(centered**2))
    if m2 == 0.0:
        raise ValidationError("zero variance: skewness undefined")
    m3 = float(np.mean(centered**3))
    g1 = m3 / m2**1.5
    if corrected:
        g1 *= math.sqrt(n * (n - 1)) / (n - 2)
    return g1


def kolmogorov_sf(t: float) -> float:
    """Asymptotic Kolmogorov survival function Q(t) = 2 Σ (−1)^(j−1) exp(−2 j² t²)."""
    if t <= 0.0:
        return 1.0
    total = 0.0
    for j in range(1, 101):
        term = math.exp(-2.0 * j * j * t * t)
        total += -term if j % 2 == 0 else term
        if term < 1e-16:
            break
    return min(1.0, max(0.0, 2.0 * total))


def ks_two_sample(x, y) -> tuple[float, float]:
    """Two-sided two-sample KS: (D, asymptotic p).

    D is the sup distance between the empirical CDFs; p evaluates the
    Kolmogorov distribution at D scaled by the effective sample size
    sqrt(nx*ny/(nx+ny)).
    """
    x = _as_vector(x, "x")
    y = _as_vector(y, "y")
    if x.shape[0] == 0 or y.shape[0] == 0:
        raise ValidationError("KS test needs non-empty samples")
    nx, ny = x.shape[0], y.shape[0]
    xs = np.sort(x)
    ys = np.sort(y)
    grid = np.concatenate((xs, ys))
    cdf_x = np.searchsorted(xs, grid, side="right") / nx
    cdf_y = np.searchsorted(ys, grid, side="right") / ny
    d = float(np.abs(cdf_x - cdf_y).max())
    effective = math.sqrt(nx * ny / (nx + ny))
    p = kolmogorov_sf(effective * d)
    return d, p


def percentiles(x, levels=PERCENTILE_LEVELS) -> dict[int, float]:
    """Linear-interpolation percentiles keyed by integer level."""
    arr = _as_vector(x, "x")
    if arr.shape[0] == 0:
        raise ValidationError("percentiles need at least 1 observation")
    values = np.percentile(arr, levels)
    return {int(level): float(v) for level, v in zip(levels, values)}


def percentile_of(sorted_values: np.ndarray, value: float) -> float:
    """Fraction of values strictly below value, in [0, 1]."""
    n = sorted_values.shape[0]
    if n == 0:
        raise ValidationError("empty reference sample")
    return float(np.searchsorted(sorted_values, value, side="left")) / n
