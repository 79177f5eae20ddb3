"""Empirical-distribution test helpers: KS statistics, DKW bands, TV.

The two-sample statistic is evaluated on the pooled support, so ties
(integer-valued samples) are handled exactly; the asymptotic critical
value is conservative for discrete data.
"""

import math

import numpy as np

from .errors import ArgumentError


def _clean(sample):
    x = np.asarray(sample, dtype=np.float64).ravel()
    if x.size == 0:
        raise ArgumentError("sample must be nonempty")
    if not np.all(np.isfinite(x)):
        raise ArgumentError("sample must be finite")
    return np.sort(x)


def empirical_cdf(sample):
    """Right-continuous empirical CDF as a callable on arrays."""
    x = _clean(sample)
    n = x.size

    def cdf(t):
        t = np.asarray(t, dtype=np.float64)
        return np.searchsorted(x, t, side="right") / n

    return cdf


def ks_one_sample(sample, cdf):
    """sup_t |F_hat(t) - F(t)| against a continuous reference CDF."""
    x = _clean(sample)
    n = x.size
    f = np.asarray(cdf(x), dtype=np.float64)
    grid = np.arange(1, n + 1) / n
    d_plus = float(np.max(grid - f))
    d_minus = float(np.max(f - (grid - 1 / n)))
    return max(d_plus, d_minus, 0.0)


def ks_two_sample(sample1, sample2):
    """sup_t |F1_hat(t) - F2_hat(t)| over the pooled support (ties exact)."""
    x = _clean(sample1)
    y = _clean(sample2)
    pooled = np.concatenate([x, y])
    pooled.sort()
    f1 = np.searchsorted(x, pooled, side="right") / x.size
    f2 = np.searchsorted(y, pooled, side="right") / y.size
    return float(np.max(np.abs(f1 - f2)))


def ks_two_sample_critical(n1, n2, alpha):
    """Asymptotic two-sample KS critical value at level alpha."""
    if not 0 < alpha < 1:
        raise ArgumentError("alpha must lie in (0, 1)")
    c = math.sqrt(-math.log(alpha / 2) / 2)
    return c * math.sqrt((n1 + n2) / (n1 * n2))


def dkw_epsilon(n, delta):
    """Half-width of the DKW confidence band at level 1 - delta."""
    if n < 1:
        raise ArgumentError("sample size must be positive")
    if not 0 < delta < 1:
        raise ArgumentError("delta must lie in (0, 1)")
    return math.sqrt(math.log(2 / delta) / (2 * n))


def total_variation(p, q):
    """TV distance between two pmfs given as dicts or aligned arrays."""
    if isinstance(p, dict) or isinstance(q, dict):
        keys = set(p) | set(q)
        return 0.5 * sum(abs(p.get(k, 0.0) - q.get(k, 0.0)) for k in keys)
    p = np.asarray(p, dtype=np.float64)
    q = np.asarray(q, dtype=np.float64)
    if p.shape != q.shape:
        raise ArgumentError("pmf arrays must have the same shape")
    return 0.5 * float(np.sum(np.abs(p - q)))


def chi_square_statistic(counts, expected):
    """Pearson chi-square statistic for observed counts vs expected counts."""
    counts = np.asarray(counts, dtype=np.float64)
    expected = np.asarray(expected, dtype=np.float64)
    if counts.shape != expected.shape:
        raise ArgumentError("counts and expected must have the same shape")
    if np.any(expected <= 0):
        raise ArgumentError("expected counts must be positive")
    return float(np.sum((counts - expected) ** 2 / expected))
