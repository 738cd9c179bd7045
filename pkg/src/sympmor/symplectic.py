"""Canonical symplectic linear algebra on phase spaces R^(2n).

The canonical structure matrix

    J = [[ 0,  I],
         [-I,  0]]

is never materialized; every operation works on the (q, p) block
structure directly, so applying J costs O(n) and the symplectic
inverse of a 2n x 2k matrix costs O(nk).
"""

import numpy as np
from dataclasses import dataclass

__all__ = [
    "DimensionMismatch",
    "SymplecticityError",
    "KIND_ORTHOSYMPLECTIC",
    "KIND_SYMPLECTIC",
    "KIND_ORTHONORMAL",
    "ReducedBasis",
    "apply_poisson",
    "apply_poisson_transpose",
    "symplectic_inverse",
    "symplecticity_measure",
    "orthonormality_measure",
    "symplectic_projection",
    "classify_basis",
]

# Classification tolerances, relative to sqrt(2k).
TOL_SYMPLECTIC = 1e-8
TOL_ORTHONORMAL = 1e-8


class DimensionMismatch(ValueError):
    """Raised for inputs whose shape is incompatible with the (q, p) split."""


class SymplecticityError(ValueError):
    """Raised when an operation requires a symplectic matrix but got none."""


KIND_ORTHOSYMPLECTIC = "orthonormal-symplectic"
KIND_SYMPLECTIC = "symplectic-nonorthonormal"
KIND_ORTHONORMAL = "orthonormal-nonsymplectic"

_KINDS = (KIND_ORTHOSYMPLECTIC, KIND_SYMPLECTIC, KIND_ORTHONORMAL)


def _check_even(dim, what="dimension"):
    if dim % 2 != 0:
        raise DimensionMismatch(f"{what} must be even, got {dim}")
    return dim // 2


def apply_poisson(v):
    """Apply the structure matrix J to a vector or to the columns of a matrix.

    For v = (q, p) the result is (p, -q).  O(n) per column, no matrix
    is formed.
    """
    v = np.asarray(v)
    n = _check_even(v.shape[0], "phase-space dimension")
    return np.concatenate((v[n:], -v[:n]), axis=0)


def apply_poisson_transpose(v):
    """Apply J^T; for v = (q, p) the result is (-p, q)."""
    v = np.asarray(v)
    n = _check_even(v.shape[0], "phase-space dimension")
    return np.concatenate((-v[n:], v[:n]), axis=0)


def symplectic_inverse(A):
    """Return A^+ = J_2m^T A^T J_2n for a 2n x 2m matrix A.

    A need not be symplectic; if it is, A^+ A = I_2m up to round-off.
    Computed by block reordering and sign flips of A^T: with
    A = [[A11, A12], [A21, A22]] one has A^+ = [[A22^T, -A12^T],
    [-A21^T, A11^T]].
    """
    A = np.asarray(A)
    if A.ndim != 2:
        raise DimensionMismatch("expected a matrix")
    n = _check_even(A.shape[0], "row count")
    m = _check_even(A.shape[1], "column count")
    A11, A12 = A[:n, :m], A[:n, m:]
    A21, A22 = A[n:, :m], A[n:, m:]
    out = np.empty((2 * m, 2 * n), dtype=A.dtype)
    out[:m, :n] = A22.T
    out[:m, n:] = -A12.T
    out[m:, :n] = -A21.T
    out[m:, n:] = A11.T
    return out


def symplecticity_measure(V):
    """Frobenius-norm defect || J_2k^T V^T J_2n V - I ||_F.

    Zero (numerically zero) exactly when V is symplectic.
    """
    V = np.asarray(V)
    two_k = V.shape[1]
    _check_even(V.shape[0], "row count")
    _check_even(two_k, "column count")
    G = apply_poisson_transpose(V.T @ apply_poisson(V))
    G[np.diag_indices(two_k)] -= 1.0
    return float(np.linalg.norm(G))


def orthonormality_measure(V):
    """Frobenius-norm defect || V^T V - I ||_F."""
    V = np.asarray(V)
    G = V.T @ V
    G[np.diag_indices(V.shape[1])] -= 1.0
    return float(np.linalg.norm(G))


def classify_basis(V, tol_sympl=TOL_SYMPLECTIC, tol_orth=TOL_ORTHONORMAL):
    """Classify the columns of V as one of the three basis kinds.

    Raises SymplecticityError if V is neither symplectic nor orthonormal
    within the tolerances (scaled by sqrt(2k)).
    """
    V = np.asarray(V)
    scale = np.sqrt(V.shape[1])
    is_sympl = symplecticity_measure(V) < tol_sympl * scale
    is_orth = orthonormality_measure(V) < tol_orth * scale
    if is_sympl and is_orth:
        return KIND_ORTHOSYMPLECTIC
    if is_sympl:
        return KIND_SYMPLECTIC
    if is_orth:
        return KIND_ORTHONORMAL
    raise SymplecticityError(
        "matrix is neither symplectic nor orthonormal within tolerance"
    )


@dataclass(frozen=True)
class ReducedBasis:
    """A reduced-order basis V in R^(2n x 2k) with its projection rule.

    kind is one of the three module-level constants; symplectic kinds
    project with W^T = V^+ (the symplectic inverse), the orthonormal
    non-symplectic kind with W^T = V^T.
    """

    columns: np.ndarray
    kind: str

    def __post_init__(self):
        V = np.ascontiguousarray(np.asarray(self.columns, dtype=float))
        object.__setattr__(self, "columns", V)
        if V.ndim != 2:
            raise DimensionMismatch("basis must be a matrix")
        _check_even(V.shape[0], "row count")
        _check_even(V.shape[1], "column count")
        if self.kind not in _KINDS:
            raise ValueError(f"unknown basis kind {self.kind!r}")

    @property
    def half_rank(self):
        return self.columns.shape[1] // 2

    @property
    def is_symplectic(self):
        return self.kind in (KIND_ORTHOSYMPLECTIC, KIND_SYMPLECTIC)

    @property
    def is_orthonormal(self):
        return self.kind in (KIND_ORTHOSYMPLECTIC, KIND_ORTHONORMAL)

    def projection_transpose(self):
        """The row matrix W^T used for projecting onto the basis."""
        if self.is_symplectic:
            return symplectic_inverse(self.columns)
        return self.columns.T

    def measures(self):
        """(orthonormality defect, symplecticity defect) of the columns."""
        return (
            orthonormality_measure(self.columns),
            symplecticity_measure(self.columns),
        )

    def validate(self, tol_sympl=TOL_SYMPLECTIC, tol_orth=TOL_ORTHONORMAL):
        """Check that the stored kind matches the measured defects."""
        o, s = self.measures()
        scale = np.sqrt(self.columns.shape[1])
        if self.is_symplectic and s >= tol_sympl * scale:
            raise SymplecticityError(
                f"kind {self.kind}: symplecticity defect {s:.3e} too large"
            )
        if self.is_orthonormal and o >= tol_orth * scale:
            raise SymplecticityError(
                f"kind {self.kind}: orthonormality defect {o:.3e} too large"
            )
        return self


def symplectic_projection(V, X, tol=TOL_SYMPLECTIC):
    """Project the columns of X onto span(V) with P = V V^+.

    V must be symplectic (defect below tol * sqrt(2k)); the projection
    is idempotent but oblique unless V is also orthonormal.
    """
    if isinstance(V, ReducedBasis):
        if not V.is_symplectic:
            raise SymplecticityError("basis kind is not symplectic")
        V = V.columns
    V = np.asarray(V)
    s = symplecticity_measure(V)
    if s >= tol * np.sqrt(V.shape[1]):
        raise SymplecticityError(
            f"symplecticity defect {s:.3e} exceeds tolerance; "
            "cannot form the symplectic projection"
        )
    X = np.asarray(X)
    if X.shape[0] != V.shape[0]:
        raise DimensionMismatch("projection target has wrong row count")
    return V @ (symplectic_inverse(V) @ X)
