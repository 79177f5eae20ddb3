"""Determinantal point processes on finite weighted ground sets.

A ground set is a list of labelled points with positive measure weights.
Kernels act on the weighted L^2 space, so admissibility and projection
checks all go through the symmetrized matrix D^{1/2} K D^{1/2} with
D = diag(weights). Exact laws are dictionaries keyed by label subsets;
samplers run the sequential chain rule on projection frames.
"""

import itertools
import math
from dataclasses import dataclass

import numpy as np

from . import _kernels
from .errors import (
    ArgumentError,
    DegeneracyError,
    DimensionError,
    DomainError,
    SizeError,
    SymmetryError,
)
from .numerics import (
    WeightedInnerProduct,
    det,
    hermitian_eigenvalues,
    orthonormalize,
)

SUBSET_CAP = 10**6


def _freeze(arr):
    arr.setflags(write=False)
    return arr


@dataclass(frozen=True, eq=False)
class GroundSpace:
    """Finite ordered set of labelled points with positive weights."""

    points: np.ndarray
    weights: np.ndarray

    def __init__(self, points, weights):
        points = np.asarray(points)
        if points.ndim != 1 or points.size == 0:
            raise DimensionError("points must be a nonempty 1-D array")
        if np.iscomplexobj(points):
            raise ArgumentError("point labels must be real numbers")
        points = points.astype(np.float64) if points.dtype.kind == "f" else points
        if np.any(np.diff(points.astype(np.float64)) <= 0):
            raise ArgumentError("point labels must be strictly increasing")
        weights = np.asarray(weights, dtype=np.float64)
        if weights.shape != points.shape:
            raise DimensionError("weights must match points in length")
        if np.any(weights <= 0) or not np.all(np.isfinite(weights)):
            raise ArgumentError("weights must be positive and finite")
        object.__setattr__(self, "points", _freeze(points.copy()))
        object.__setattr__(self, "weights", _freeze(weights.copy()))

    @staticmethod
    def counting(points):
        """Ground space with unit weight at every point."""
        points = np.asarray(points)
        return GroundSpace(points, np.ones(points.shape[0]))

    @property
    def size(self):
        return int(self.points.shape[0])

    def index_of(self, label):
        pts = self.points.astype(np.float64)
        i = int(np.searchsorted(pts, float(label)))
        if i < self.size and pts[i] == float(label):
            return i
        raise ArgumentError(f"label {label!r} is not a point of the ground set")

    def labels(self, indices):
        return tuple(self.points[list(indices)].tolist())

    def inner_product(self):
        return WeightedInnerProduct(self.weights)


@dataclass(frozen=True, eq=False)
class KernelMatrix:
    """Hermitian kernel on a ground space, stored as a plain matrix."""

    space: GroundSpace
    matrix: np.ndarray

    def __init__(self, space, matrix, tol=1e-12):
        matrix = np.array(matrix)
        if matrix.ndim != 2 or matrix.shape[0] != matrix.shape[1]:
            raise DimensionError("kernel matrix must be square")
        if matrix.shape[0] != space.size:
            raise DimensionError("kernel size must match the ground set")
        scale = max(1.0, float(np.max(np.abs(matrix))) if matrix.size else 0.0)
        defect = float(np.max(np.abs(matrix - matrix.conj().T)))
        if defect > tol * scale:
            raise SymmetryError(f"kernel is not Hermitian (defect {defect:.3e})")
        object.__setattr__(self, "space", space)
        object.__setattr__(self, "matrix", _freeze(matrix))

    def symmetrized(self):
        """D^{1/2} K D^{1/2}, the matrix whose spectrum decides admissibility."""
        root = np.sqrt(self.space.weights)
        return self.matrix * np.outer(root, root)


@dataclass(frozen=True)
class AdmissibilityReport:
    admissible: bool
    eigenvalues: np.ndarray
    violations: tuple


def check_admissible(kernel, tol=1e-10):
    """Decide 0 <= K <= I as an operator on the weighted space.

    Returns the spectrum of the symmetrized matrix together with the list of
    eigenvalues falling outside [0, 1] by more than tol.
    """
    eig = hermitian_eigenvalues(kernel.symmetrized())
    bad = tuple(float(v) for v in eig if v < -tol or v > 1.0 + tol)
    return AdmissibilityReport(len(bad) == 0, _freeze(eig), bad)


@dataclass(frozen=True, eq=False)
class ProjectionFrame:
    """Rows orthonormal under the weighted inner product; spans a projection."""

    space: GroundSpace
    rows: np.ndarray

    def __init__(self, space, rows, tol=1e-10):
        rows = np.array(rows)
        if rows.ndim != 2:
            raise DimensionError("frame rows must form a 2-D array")
        if rows.shape[1] != space.size:
            raise DimensionError("frame row length must match the ground set")
        if rows.shape[0] > space.size:
            raise DimensionError("frame rank cannot exceed the ground set size")
        gram = (rows * space.weights) @ rows.conj().T
        defect = float(np.max(np.abs(gram - np.eye(rows.shape[0]))))
        if defect > tol:
            raise ArgumentError(
                f"rows are not orthonormal under the weights (defect {defect:.3e})"
            )
        object.__setattr__(self, "space", space)
        object.__setattr__(self, "rows", _freeze(rows))

    @property
    def rank(self):
        return int(self.rows.shape[0])

    def scaled_rows(self):
        """Rows with sqrt(weight) folded in; Euclidean-orthonormal."""
        return self.rows * np.sqrt(self.space.weights)

    def kernel(self):
        """K(x, y) = sum_i phi_i(x) conj(phi_i(y))."""
        mat = self.rows.T @ self.rows.conj()
        mat = (mat + mat.conj().T) / 2
        return KernelMatrix(self.space, mat)

    @staticmethod
    def from_vectors(space, vectors):
        """Orthonormalize the given spanning vectors in their listed order."""
        rows = orthonormalize(np.asarray(vectors), space.inner_product())
        return ProjectionFrame(space, rows)


@dataclass(frozen=True, eq=False)
class Configuration:
    """A realized point configuration: sorted indices into a ground space."""

    space: GroundSpace
    indices: tuple

    def __init__(self, space, indices):
        idx = tuple(int(i) for i in indices)
        if any(i < 0 or i >= space.size for i in idx):
            raise ArgumentError("configuration index out of range")
        if any(b <= a for a, b in zip(idx, idx[1:])):
            raise ArgumentError("configuration indices must be strictly increasing")
        object.__setattr__(self, "space", space)
        object.__setattr__(self, "indices", idx)

    @property
    def labels(self):
        return self.space.labels(self.indices)

    def __len__(self):
        return len(self.indices)


class ExactLaw:
    """Probability law over fixed-size subsets of a ground space.

    Stored as a dict from sorted label tuples to probabilities. Construction
    validates nonnegativity (to roundoff) and total mass one within 1e-10.
    """

    def __init__(self, space, size, probs, tol=1e-10):
        self.space = space
        self.size = int(size)
        clean = {}
        total = 0.0
        for key, val in probs.items():
            key = tuple(key)
            if len(key) != self.size:
                raise ArgumentError("law keys must all have the declared size")
            val = float(val)
            if val < -1e-12:
                raise ArgumentError(f"negative probability {val!r} for {key!r}")
            val = max(val, 0.0)
            clean[key] = val
            total += val
        if abs(total - 1.0) > tol:
            raise ArgumentError(f"law mass {total!r} is not 1 within {tol}")
        self.probs = clean

    def probability(self, labels):
        return self.probs.get(tuple(sorted(labels)), 0.0)

    def items(self):
        return sorted(self.probs.items())

    def support(self):
        return [k for k, v in self.items() if v > 0]

    def total_variation(self, other):
        keys = set(self.probs) | set(other.probs)
        return 0.5 * sum(
            abs(self.probs.get(k, 0.0) - other.probs.get(k, 0.0)) for k in keys
        )


def mixed_probability(kernel, inside, outside, tol=1e-10):
    """P(all of `inside` present and all of `outside` absent).

    Block determinant on the symmetrized kernel: rows for required points
    come from K-tilde, rows for excluded points from I - K-tilde.
    """
    report = check_admissible(kernel, tol=tol)
    if not report.admissible:
        raise DomainError(
            f"kernel is not admissible; offending eigenvalues {report.violations}"
        )
    space = kernel.space
    idx_in = [space.index_of(x) for x in inside]
    idx_out = [space.index_of(x) for x in outside]
    sel = idx_in + idx_out
    if len(set(sel)) != len(sel):
        raise ArgumentError("inside and outside points must be distinct")
    ktil = kernel.symmetrized()
    k = len(idx_in)
    sub = ktil[np.ix_(sel, sel)].astype(complex)
    block = np.empty_like(sub)
    block[:k] = sub[:k]
    block[k:] = np.eye(len(sel))[k:] - sub[k:]
    val = det(block)
    val = complex(val)
    if abs(val.imag) > 1e-10:
        raise DegeneracyError(f"probability came out non-real: {val!r}")
    return float(np.clip(val.real, 0.0, 1.0))


def projection_exact_law(frame, cap=SUBSET_CAP):
    """Exhaustive law of the rank-r projection process: |det Q_A|^2 * w(A)."""
    n = frame.space.size
    r = frame.rank
    if math.comb(n, r) > cap:
        raise SizeError(
            f"{math.comb(n, r)} subsets exceed the enumeration cap {cap}"
        )
    scaled = frame.scaled_rows()
    labels = frame.space.points
    probs = {}
    for combo in itertools.combinations(range(n), r):
        sub = scaled[:, combo]
        d = det(sub)
        p = abs(complex(d)) ** 2
        key = tuple(np.asarray(labels)[list(combo)].tolist())
        probs[key] = p
    return ExactLaw(frame.space, r, probs)


def biorthogonal_exact_law(space, phis, psis, cap=SUBSET_CAP):
    """Exhaustive law of a biorthogonal ensemble, plus its normalizer.

    P(A) proportional to det[phi_i(x_j)] det[psi_i(x_j)] w(A); the constant
    is det G with G_ij = sum_x w(x) phi_i(x) psi_j(x), no conjugation.
    Returns (law, normalizer).
    """
    phis = np.asarray(phis)
    psis = np.asarray(psis)
    if phis.ndim != 2 or psis.ndim != 2:
        raise DimensionError("phis and psis must be 2-D arrays")
    if phis.shape != psis.shape:
        raise DimensionError("phis and psis must have the same shape")
    if phis.shape[1] != space.size:
        raise DimensionError("family length must match the ground set")
    n = phis.shape[0]
    if math.comb(space.size, n) > cap:
        raise SizeError(
            f"{math.comb(space.size, n)} subsets exceed the enumeration cap {cap}"
        )
    w = space.weights
    gram = (phis * w) @ psis.T
    dg = det(gram)
    dgc = complex(dg)
    scale = max(1.0, float(np.max(np.abs(gram)))) ** n
    if abs(dgc) <= 1e-12 * scale:
        raise DegeneracyError("biorthogonal family has a singular Gram matrix")
    labels = np.asarray(space.points)
    probs = {}
    for combo in itertools.combinations(range(space.size), n):
        cols = list(combo)
        mass = complex(det(phis[:, cols])) * complex(det(psis[:, cols]))
        mass *= float(np.prod(w[cols]))
        p = mass / dgc
        if abs(p.imag) > 1e-10:
            raise DegeneracyError(f"subset mass came out non-real: {p!r}")
        key = tuple(labels[cols].tolist())
        probs[key] = p.real
    norm = dgc.real if abs(dgc.imag) <= 1e-12 * abs(dgc) else dgc
    return ExactLaw(space, n, probs), norm


def correlation_from_top(law, k):
    """k-point correlations of an exact law, unordered convention.

    rho_k(A) = sum over support subsets B containing A of P(B); returns a
    dict keyed by sorted k-tuples of labels.
    """
    if k < 1 or k > law.size:
        raise ArgumentError(f"k must lie in 1..{law.size}")
    out = {}
    for subset, p in law.probs.items():
        if p == 0.0:
            continue
        for combo in itertools.combinations(subset, k):
            out[combo] = out.get(combo, 0.0) + p
    return out


def sample_projection(frame, rng, force_backend=None):
    """One chain-rule draw from the projection process; returns a Configuration."""
    idx = _kernels.project_sample(frame.scaled_rows(), rng, force=force_backend)
    return Configuration(frame.space, idx.tolist())


def reweight(frame, gains):
    """Transport a projection frame along a positive gauge function.

    New rows are phi_i * g, new weights w / g^2; the subset law and all
    correlations are unchanged. `gains` is an array over the points or a
    callable on labels.
    """
    if callable(gains):
        g = np.array([float(gains(x)) for x in frame.space.points])
    else:
        g = np.asarray(gains, dtype=np.float64)
    if g.shape != (frame.space.size,):
        raise DimensionError("gauge must assign one value per point")
    if np.any(g <= 0) or not np.all(np.isfinite(g)):
        raise ArgumentError("gauge values must be positive and finite")
    new_space = GroundSpace(frame.space.points, frame.space.weights / g**2)
    return ProjectionFrame(new_space, frame.rows * g)


def biorthogonal_counterexample():
    """Fixed two-ensemble pair showing k-point functions do not order laws.

    Both ensembles live on the counting space {1, 2, 3}. The first charges
    {a}; the second charges {b, c}; every one- and two-point correlation of
    the second dominates, yet no monotone coupling exists (the witness cut
    isolates {a}).
    """
    space = GroundSpace.counting([1, 2, 3])
    first = {
        "phis": np.array([[1.0, 1.0, 0.0]]),
        "psis": np.array([[1.0, 0.0, -1.0]]),
    }
    second = {
        "phis": np.array([[1.0, 1.0, 0.0], [1.0, 1.0, 1.0]]),
        "psis": np.array([[1.0, 0.0, -1.0], [-1.0, 1.0, 1.0]]),
    }
    return space, first, second
