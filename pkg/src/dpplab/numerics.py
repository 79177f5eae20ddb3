"""Dense linear algebra helpers: determinants, Hermitian spectra, and
Gram-Schmidt against weighted discrete or quadrature inner products.

Matrices are plain numpy arrays (real or complex). All functions are pure.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DependenceError, DimensionError, SymmetryError

__all__ = [
    "WeightedInnerProduct",
    "det",
    "hermitian_eigenvalues",
    "hermiticity_defect",
    "orthonormalize",
    "require_square",
]

# Relative pivot threshold below which a vector counts as dependent.
RANK_TOL = 1e-12


def require_square(m):
    a = np.asarray(m)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise DimensionError(f"square matrix required, got shape {a.shape}")
    return a


def det(m):
    """Determinant by Gaussian elimination with partial pivoting.

    The 0x0 matrix has determinant 1. Returns a float for real input and
    a complex number otherwise.
    """
    a = require_square(m)
    n = a.shape[0]
    if n == 0:
        return 1.0
    complex_input = np.iscomplexobj(a)
    a = a.astype(np.complex128 if complex_input else np.float64, copy=True)
    sign = 1.0
    for col in range(n - 1):
        pivot = col + int(np.argmax(np.abs(a[col:, col])))
        if a[pivot, col] == 0:
            return 0j if complex_input else 0.0
        if pivot != col:
            a[[col, pivot]] = a[[pivot, col]]
            sign = -sign
        factors = a[col + 1 :, col] / a[col, col]
        a[col + 1 :, col:] -= np.outer(factors, a[col, col:])
    value = sign * np.prod(np.diagonal(a))
    return complex(value) if complex_input else float(value.real)


def hermiticity_defect(m):
    """Largest entrywise deviation of m from its conjugate transpose."""
    a = require_square(m)
    if a.shape[0] == 0:
        return 0.0
    return float(np.max(np.abs(a - a.conj().T)))


def hermitian_eigenvalues(m, tol=1e-10):
    """Ascending real eigenvalues of a Hermitian matrix.

    Raises SymmetryError when the input deviates from Hermitian by more
    than tol relative to its largest entry.
    """
    a = require_square(m)
    if a.shape[0] == 0:
        return np.empty(0)
    scale = max(1.0, float(np.max(np.abs(a))))
    defect = hermiticity_defect(a)
    if defect > tol * scale:
        raise SymmetryError(f"matrix not Hermitian: defect {defect:.3e} exceeds {tol:.1e} x scale")
    sym = (a + a.conj().T) / 2.0
    return np.linalg.eigvalsh(sym)


@dataclass(frozen=True)
class WeightedInnerProduct:
    """<f, g> = sum_i w_i f_i conj(g_i) over a finite index set.

    Weights must be nonnegative with at least one strictly positive entry;
    they may be discrete masses or quadrature weights.
    """

    weights: np.ndarray

    def __post_init__(self):
        w = np.asarray(self.weights, dtype=float)
        if w.ndim != 1:
            raise DimensionError("weights must be a 1-D vector")
        if w.size == 0 or np.any(w < 0) or not np.any(w > 0):
            raise DimensionError("weights must be nonnegative with at least one positive entry")
        w = w.copy()
        w.setflags(write=False)
        object.__setattr__(self, "weights", w)

    @property
    def size(self):
        return self.weights.size

    def dot(self, f, g):
        return complex(np.sum(self.weights * np.asarray(f) * np.conj(np.asarray(g))))

    def norm(self, f):
        v = np.asarray(f)
        return float(np.sqrt(np.sum(self.weights * (v * np.conj(v)).real)))


def orthonormalize(vectors, ip: WeightedInnerProduct):
    """Modified Gram-Schmidt with one re-orthogonalization pass.

    Processing order is preserved: the i-th output spans the same flag as
    the first i inputs. Returns the orthonormal vectors stacked as rows.
    Raises DependenceError (with the offending index) when a pivot falls
    below RANK_TOL times the leading pivot.

    The re-orthogonalization pass matters: single-pass Gram-Schmidt on
    Hankel-moment systems loses orthogonality by polynomial degree ~8.
    """
    vecs = [np.asarray(v) for v in vectors]
    if not vecs:
        return np.empty((0, ip.size))
    n = ip.size
    for i, v in enumerate(vecs):
        if v.ndim != 1 or v.size != n:
            raise DimensionError(f"vector {i} has shape {v.shape}, expected ({n},)")
    complex_input = any(np.iscomplexobj(v) for v in vecs)
    dtype = np.complex128 if complex_input else np.float64

    basis = []
    leading_pivot = None
    for idx, v in enumerate(vecs):
        u = v.astype(dtype, copy=True)
        for _ in range(2):
            for b in basis:
                c = ip.dot(u, b)
                u -= (c if complex_input else c.real) * b
        norm = ip.norm(u)
        if leading_pivot is None:
            leading_pivot = ip.norm(v)
            if leading_pivot == 0.0:
                raise DependenceError("first vector has zero norm", index=0)
        if norm < RANK_TOL * leading_pivot:
            raise DependenceError(
                f"vector {idx} is numerically dependent on its predecessors "
                f"(pivot {norm:.3e} < {RANK_TOL:.0e} x leading {leading_pivot:.3e})",
                index=idx,
            )
        basis.append(u / norm)
    return np.array(basis)
