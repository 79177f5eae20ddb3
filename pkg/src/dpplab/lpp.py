"""Directed last-passage percolation on the positive quadrant.

G(i, j) is the maximal weight of an up-right path from (1,1) to (i,j),
computed by the dynamic-programming recursion G = w + max(G_up, G_left).
Geometric weights use the {0,1,2,...} convention with pmf (1-q)q^k, which
makes G(m,n) equal in law to the largest Meixner particle minus (m-1);
exponential weights have mean one by default and match the largest
Wishart eigenvalue with no shift.
"""

from dataclasses import dataclass

import numpy as np

from .errors import ArgumentError


@dataclass(frozen=True)
class Exponential:
    """Exponential site weights; mean defaults to one."""

    rate: float = 1.0

    def __post_init__(self):
        if not (isinstance(self.rate, float) and self.rate > 0):
            raise ArgumentError("rate must be a positive float")

    def draw(self, shape, rng):
        return rng.standard_exponential(shape) / self.rate


@dataclass(frozen=True)
class Geometric:
    """Geometric site weights with support {0,1,2,...} and pmf (1-q)q^k."""

    q: float

    def __post_init__(self):
        if not (isinstance(self.q, float) and 0.0 < self.q < 1.0):
            raise ArgumentError("q must lie in (0, 1)")

    def draw(self, shape, rng):
        return (rng.geometric(1.0 - self.q, size=shape) - 1).astype(np.float64)


@dataclass(frozen=True)
class Constant:
    """Deterministic site weights, for structural tests."""

    value: float = 1.0

    def __post_init__(self):
        if not isinstance(self.value, float):
            raise ArgumentError("value must be a float")

    def draw(self, shape, rng):
        return np.full(shape, self.value)


def _passage_times(weights):
    """DP table of last-passage times for a stack of weight grids."""
    w = np.asarray(weights, dtype=np.float64)
    g = np.empty_like(w)
    m, n = w.shape[-2], w.shape[-1]
    g[..., 0, :] = np.cumsum(w[..., 0, :], axis=-1)
    for i in range(1, m):
        g[..., i, 0] = g[..., i - 1, 0] + w[..., i, 0]
        for j in range(1, n):
            g[..., i, j] = w[..., i, j] + np.maximum(
                g[..., i - 1, j], g[..., i, j - 1]
            )
    return g


@dataclass(frozen=True)
class PassageGrid:
    """Realized grid of last-passage times G(i, j), 1-based readout."""

    m: int
    n: int
    kind: object
    times: np.ndarray

    def __post_init__(self):
        t = np.asarray(self.times, dtype=np.float64)
        if t.shape != (self.m, self.n):
            raise ArgumentError("times must be an m x n matrix")
        object.__setattr__(self, "times", t)


def sample_grid(m, n, kind, rng):
    """One realization of the full last-passage grid."""
    if m < 1 or n < 1:
        raise ArgumentError("grid extents must be at least 1")
    w = kind.draw((m, n), rng)
    return PassageGrid(m, n, kind, _passage_times(w))


def last_passage_time(grid, i, j):
    """G(i, j) readout, 1-based coordinates."""
    if not (1 <= i <= grid.m and 1 <= j <= grid.n):
        raise ArgumentError(f"({i}, {j}) is outside the {grid.m} x {grid.n} grid")
    return float(grid.times[i - 1, j - 1])


def sample_passage_batch(m, n, kind, num, rng):
    """Vector of `num` independent G(m, n) values."""
    if m < 1 or n < 1:
        raise ArgumentError("grid extents must be at least 1")
    if num < 1:
        raise ArgumentError("num must be positive")
    w = kind.draw((num, m, n), rng)
    return _passage_times(w)[:, m - 1, n - 1]


def bridge_shift(kind, m):
    """Integer shift aligning G(m, n) with the top ensemble particle.

    Exponential: 0 (largest Wishart eigenvalue). Geometric: m - 1 (largest
    Meixner particle minus the shift).
    """
    if m < 1:
        raise ArgumentError("m must be at least 1")
    if isinstance(kind, Exponential):
        return 0
    if isinstance(kind, Geometric):
        return m - 1
    raise ArgumentError(f"no ensemble bridge for weight kind {kind!r}")
