"""Wishart, Jacobi, and Meixner eigenvalue ensembles.

Matrix-model samplers for the two continuous ensembles, a projection-DPP
sampler on a truncated lattice for Meixner, joint densities with closed
normalizers where one exists, and orthonormal-polynomial projection frames
built by the Stieltjes three-term recurrence.
"""

import math
from dataclasses import dataclass

import numpy as np

from . import _kernels
from .dpp import GroundSpace, ProjectionFrame
from .errors import (
    ArgumentError,
    DependenceError,
    DimensionError,
    SizeError,
    SupportError,
)
from .numerics import orthonormalize

TRUNCATE_LIMIT = 10**6
DEFAULT_QUADRATURE = 64
DEFAULT_TRUNCATE_TOL = 1e-10


@dataclass(frozen=True)
class Wishart:
    """Complex Wishart eigenvalues: A A* with A an m x n standard complex
    Gaussian matrix, m <= n. Joint density prop. to
    prod |l_j - l_k|^2 prod l^(n-m) e^(-l) on the positive orthant."""

    m: int
    n: int

    def __post_init__(self):
        if not (isinstance(self.m, int) and isinstance(self.n, int)):
            raise ArgumentError("m and n must be integers")
        if self.m < 1 or self.n < self.m:
            raise ArgumentError("Wishart requires 1 <= m <= n")

    @property
    def size(self):
        return self.m


@dataclass(frozen=True)
class Jacobi:
    """Jacobi ensemble: eigenvalues of AA* (AA* + BB*)^{-1} with A, B
    standard complex Gaussian of shapes n x n1 and n x n2, n <= min(n1, n2)."""

    n1: int
    n2: int
    n: int

    def __post_init__(self):
        if not all(isinstance(v, int) for v in (self.n1, self.n2, self.n)):
            raise ArgumentError("n1, n2, n must be integers")
        if self.n < 1 or self.n1 < self.n or self.n2 < self.n:
            raise ArgumentError("Jacobi requires 1 <= n <= min(n1, n2)")

    @property
    def size(self):
        return self.n


@dataclass(frozen=True)
class Meixner:
    """Meixner ensemble on the nonnegative integer lattice: pmf prop. to
    prod (h_j - h_k)^2 prod C(h+n-m, h) q^h over m distinct particles."""

    m: int
    n: int
    q: float

    def __post_init__(self):
        if not (isinstance(self.m, int) and isinstance(self.n, int)):
            raise ArgumentError("m and n must be integers")
        if self.m < 1 or self.n < self.m:
            raise ArgumentError("Meixner requires 1 <= m <= n")
        if not (isinstance(self.q, float) and 0.0 < self.q < 1.0):
            raise ArgumentError("Meixner requires 0 < q < 1")

    @property
    def size(self):
        return self.m


@dataclass(frozen=True)
class EigenSample:
    """One draw: ascending eigenvalues (or particle positions) of a spec."""

    spec: object
    values: np.ndarray
    seed: object = None

    def __post_init__(self):
        vals = np.asarray(self.values)
        if vals.ndim != 1 or vals.shape[0] != self.spec.size:
            raise DimensionError(f"expected {self.spec.size} values")
        if np.any(np.diff(vals) < 0):
            raise ArgumentError("values must be ascending")
        _validate_support(self.spec, vals, tol=1e-10)
        object.__setattr__(self, "values", vals)


def _validate_support(spec, vals, tol=0.0):
    if isinstance(spec, Wishart):
        if np.any(vals < -tol):
            raise SupportError("Wishart eigenvalues must be nonnegative")
    elif isinstance(spec, Jacobi):
        if np.any(vals < -tol) or np.any(vals > 1 + tol):
            raise SupportError("Jacobi eigenvalues must lie in [0, 1]")
    elif isinstance(spec, Meixner):
        ints = np.rint(np.asarray(vals, dtype=np.float64))
        if np.any(np.abs(vals - ints) > tol) or np.any(ints < 0):
            raise SupportError("Meixner particles must be nonnegative integers")
        if len(set(int(v) for v in ints)) != len(ints):
            raise SupportError("Meixner particles must be distinct")
    else:
        raise ArgumentError(f"unknown ensemble spec {spec!r}")


def _complex_gaussian(rng, shape):
    # independent complex entries, real and imaginary parts variance 1/2
    re = rng.standard_normal(shape)
    im = rng.standard_normal(shape)
    return (re + 1j * im) / math.sqrt(2.0)


def sample_eigs_batch(spec, num, rng, backend=None):
    """num independent draws, one ascending row per draw."""
    if num < 1:
        raise ArgumentError("num must be positive")
    if isinstance(spec, Wishart):
        a = _complex_gaussian(rng, (num, spec.m, spec.n))
        w = a @ a.conj().transpose(0, 2, 1)
        return np.linalg.eigvalsh(w)
    if isinstance(spec, Jacobi):
        a = _complex_gaussian(rng, (num, spec.n, spec.n1))
        b = _complex_gaussian(rng, (num, spec.n, spec.n2))
        s1 = a @ a.conj().transpose(0, 2, 1)
        s = s1 + b @ b.conj().transpose(0, 2, 1)
        chol = np.linalg.cholesky(s)
        t = np.linalg.solve(chol, s1)
        c = np.linalg.solve(chol, t.conj().transpose(0, 2, 1))
        c = (c + c.conj().transpose(0, 2, 1)) / 2
        return np.linalg.eigvalsh(c)
    if isinstance(spec, Meixner):
        frame = projection_frame(spec)
        scaled = frame.scaled_rows()
        pts = np.asarray(frame.space.points)
        out = np.empty((num, spec.m), dtype=np.float64)
        for t_idx in range(num):
            idx = _kernels.project_sample(scaled, rng, force=backend)
            out[t_idx] = pts[idx]
        return out
    raise ArgumentError(f"unknown ensemble spec {spec!r}")


def sample_eigs(spec, rng, backend=None):
    """One draw as an EigenSample."""
    vals = sample_eigs_batch(spec, 1, rng, backend=backend)[0]
    return EigenSample(spec, vals)


def _log_vandermonde_sq(vals):
    total = 0.0
    size = len(vals)
    for i in range(size):
        for j in range(i + 1, size):
            gap = abs(float(vals[j]) - float(vals[i]))
            if gap == 0.0:
                return -math.inf
            total += 2.0 * math.log(gap)
    return total


def log_normalizer(spec):
    """Log of the density normalizer in the exchangeable-vector convention,
    or None when no closed form is provided (Meixner with m >= 2)."""
    if isinstance(spec, Wishart):
        return sum(
            math.lgamma(j + 1) + math.lgamma(j + spec.n - spec.m)
            for j in range(1, spec.m + 1)
        )
    if isinstance(spec, Jacobi):
        alpha = spec.n1 - spec.n + 1
        beta = spec.n2 - spec.n + 1
        total = 0.0
        for j in range(spec.n):
            total += (
                math.lgamma(alpha + j)
                + math.lgamma(beta + j)
                + math.lgamma(2 + j)
                - math.lgamma(alpha + beta + spec.n + j - 1)
                - math.lgamma(2)
            )
        return total
    if isinstance(spec, Meixner):
        if spec.m == 1:
            return -spec.n * math.log(1.0 - spec.q)
        return None
    raise ArgumentError(f"unknown ensemble spec {spec!r}")


def log_density(spec, config):
    """(log unnormalized joint density/pmf, log normalizer or None).

    Symmetric in the configuration entries. Raises SupportError off the
    ensemble's support; coincident continuous values give -inf.
    """
    vals = np.asarray(config, dtype=np.float64).ravel()
    if vals.shape[0] != spec.size:
        raise DimensionError(f"expected {spec.size} values")
    if isinstance(spec, Meixner):
        _validate_support(spec, vals, tol=1e-9)
        h = np.rint(vals).astype(np.int64)
        logp = _log_vandermonde_sq(h)
        for x in h:
            logp += _log_choose(int(x) + spec.n - spec.m, int(x))
            logp += x * math.log(spec.q)
        return logp, log_normalizer(spec)
    _validate_support(spec, vals, tol=0.0)
    logp = _log_vandermonde_sq(vals)
    if isinstance(spec, Wishart):
        power = spec.n - spec.m
        for x in vals:
            if x == 0.0 and power > 0:
                return -math.inf, log_normalizer(spec)
            if power > 0:
                logp += power * math.log(x)
            logp -= x
        return logp, log_normalizer(spec)
    if isinstance(spec, Jacobi):
        p1 = spec.n1 - spec.n
        p2 = spec.n2 - spec.n
        for x in vals:
            if (x == 0.0 and p1 > 0) or (x == 1.0 and p2 > 0):
                return -math.inf, log_normalizer(spec)
            if p1 > 0:
                logp += p1 * math.log(x)
            if p2 > 0:
                logp += p2 * math.log(1.0 - x)
        return logp, log_normalizer(spec)
    raise ArgumentError(f"unknown ensemble spec {spec!r}")


def _log_choose(a, b):
    return math.lgamma(a + 1) - math.lgamma(b + 1) - math.lgamma(a - b + 1)


def meixner_truncate(spec, tol):
    """Smallest lattice cutoff T with single-particle tail below tol * head.

    The tail weight is h(x) = x^(2(m-1)) C(x+n-m, x) q^x, the largest
    polynomial the rank-m frame squares against the lattice weight.
    """
    if not isinstance(spec, Meixner):
        raise ArgumentError("truncation applies to the Meixner ensemble")
    if not 0.0 < tol < 1.0:
        raise ArgumentError("tol must lie in (0, 1)")
    power = 2 * (spec.m - 1)
    shift = spec.n - spec.m

    def weight(x):
        return math.exp(
            (power * math.log(x) if x > 0 else 0.0)
            + _log_choose(x + shift, x)
            + x * math.log(spec.q)
        ) if (x > 0 or power == 0) else 0.0

    # grow until the analytic geometric bound on the remaining tail is
    # negligible next to the head, then binary-search the smallest cutoff
    size = 256
    while True:
        if size > 4 * TRUNCATE_LIMIT:
            raise SizeError(f"truncation exceeds the {TRUNCATE_LIMIT} cap")
        vals = np.array([weight(x) for x in range(size + 1)])
        csum = np.cumsum(vals)
        ratio = vals[size] / vals[size - 1] if vals[size - 1] > 0 else 0.0
        r = (1 + spec.q) / 2
        if ratio < r:
            # weight ratios decrease toward q, so beyond the grid the tail
            # is dominated by a geometric series with ratio r
            bound = vals[size] * r / (1 - r)
            if bound <= tol * csum[size] * 1e-3:
                break
        size *= 2
    total = csum[size] + vals[size] * r / (1 - r)
    lo, hi = 0, size
    while lo < hi:
        mid = (lo + hi) // 2
        tail = total - csum[mid]
        if tail < tol * csum[mid] and csum[mid] > 0:
            hi = mid
        else:
            lo = mid + 1
    if lo > TRUNCATE_LIMIT:
        raise SizeError(f"cutoff {lo} exceeds the {TRUNCATE_LIMIT} cap")
    return int(lo)


def _stieltjes_rows(points, measure, rank):
    """Values of the first `rank` orthonormal polynomials of a discrete
    measure, by the three-term recurrence run on grid values."""
    x = np.asarray(points, dtype=np.float64)
    w = np.asarray(measure, dtype=np.float64)
    rows = np.empty((rank, x.shape[0]))
    norm0 = math.sqrt(float(np.sum(w)))
    if norm0 <= 0:
        raise DependenceError("measure has no mass")
    rows[0] = 1.0 / norm0
    prev = np.zeros_like(x)
    b_prev = 0.0
    for k in range(rank - 1):
        cur = rows[k]
        a = float(np.sum(w * x * cur * cur))
        raw = (x - a) * cur - b_prev * prev
        b = math.sqrt(float(np.sum(w * raw * raw)))
        if not b > 1e-14 * max(1.0, abs(a)):
            raise DependenceError(
                "recurrence broke down; enlarge the grid or lower the rank",
                index=k + 1,
            )
        rows[k + 1] = raw / b
        prev = cur
        b_prev = b
    return rows


def laguerre_space(npoints=DEFAULT_QUADRATURE):
    """Gauss-Laguerre ground space: nodes and weights for e^{-x} dx."""
    nodes, weights = np.polynomial.laguerre.laggauss(npoints)
    return GroundSpace(nodes, weights)


def meixner_space(spec, cutoff=None, tol=DEFAULT_TRUNCATE_TOL):
    """Truncated lattice 0..T with the Meixner single-particle weight."""
    if not isinstance(spec, Meixner):
        raise ArgumentError("lattice spaces apply to the Meixner ensemble")
    if cutoff is None:
        cutoff = meixner_truncate(spec, tol)
    pts = np.arange(cutoff + 1)
    shift = spec.n - spec.m
    logw = np.array(
        [_log_choose(x + shift, x) + x * math.log(spec.q) for x in pts]
    )
    return GroundSpace(pts, np.exp(logw))


def projection_frame(spec, support=None, method="recurrence"):
    """Orthonormal projection frame of the ensemble's determinantal form.

    Wishart(m, n) with n - m even: functions x^l p_k(x), l = (n-m)/2, with
    p_k orthonormal under x^(2l) e^{-x} dx on a Gauss-Laguerre grid (the
    grid is the `support`, defaulting to 64 points). Meixner: polynomials
    of degree < m under the lattice weight on a truncated support. The
    `monomials` method orthonormalizes raw monomials instead and exists as
    a cross-check; it loses accuracy beyond moderate rank.
    """
    if method not in ("recurrence", "monomials"):
        raise ArgumentError(f"unknown method {method!r}")
    if isinstance(spec, Wishart):
        if (spec.n - spec.m) % 2 != 0:
            raise ArgumentError(
                "Wishart frames need n - m even (integer half-gap)"
            )
        ell = (spec.n - spec.m) // 2
        if support is None:
            space = laguerre_space()
        elif isinstance(support, int):
            space = laguerre_space(support)
        else:
            space = support
        x = np.asarray(space.points, dtype=np.float64)
        if method == "recurrence":
            measure = space.weights * x ** (2 * ell)
            rows = _stieltjes_rows(x, measure, spec.m) * x**ell
        else:
            monos = np.array([x ** (ell + k) for k in range(spec.m)])
            rows = orthonormalize(monos, space.inner_product())
        return ProjectionFrame(space, rows)
    if isinstance(spec, Meixner):
        if support is None:
            space = meixner_space(spec)
        elif isinstance(support, int):
            space = meixner_space(spec, cutoff=support)
        else:
            space = support
        x = np.asarray(space.points, dtype=np.float64)
        if method == "recurrence":
            rows = _stieltjes_rows(x, space.weights, spec.m)
        else:
            monos = np.array([x**k for k in range(spec.m)])
            rows = orthonormalize(monos, space.inner_product())
        return ProjectionFrame(space, rows)
    if isinstance(spec, Jacobi):
        raise ArgumentError("no projection frame is offered for Jacobi")
    raise ArgumentError(f"unknown ensemble spec {spec!r}")
