"""Snapshot-based reduced-basis construction.

Seven generators are provided.  Four produce orthonormal bases that are
also symplectic (the cotangent lift, the augmented-snapshot method, its
complex formulation, and the greedy procedure), one produces a
symplectic but non-orthonormal basis by selecting column pairs of the
S factor of the decomposition in :mod:`sympmor.spectral`, and two are
plain orthogonal baselines without symplectic structure.

Two projection-error functionals measure basis quality on a snapshot
set: the orthogonal one ||(I - V V^T) X||_F^2 and the symplectic one
||(I - V V^+) X||_F^2.
"""

import warnings

import numpy as np
import scipy.linalg

from .integrate import SnapshotMatrix
from .spectral import (
    EmptyExtensionError,
    RANK_TOL,
    _orthosymplectic_extend,
    select_indices_by_weight,
    svd_like_decompose,
    truncated_svd,
    weighted_spectrum,
)
from .symplectic import (
    DimensionMismatch,
    KIND_ORTHONORMAL,
    KIND_ORTHOSYMPLECTIC,
    KIND_SYMPLECTIC,
    ReducedBasis,
    SymplecticityError,
    apply_poisson,
    apply_poisson_transpose,
    symplectic_inverse,
    symplecticity_measure,
)

__all__ = [
    "SpectralGapError",
    "BasisSizeError",
    "pod_loss",
    "psd_loss",
    "pod_full",
    "pod_separate",
    "psd_cotangent_lift",
    "pod_of_ys",
    "psd_complex_svd",
    "psd_greedy",
    "psd_svd_like",
    "METHODS",
    "build_basis",
]

# Relative gap below which two singular values are considered tied.
GAP_TOL = 1e-10


class SpectralGapError(RuntimeError):
    """No usable singular-value gap at the requested basis size."""


class BasisSizeError(ValueError):
    """The requested basis size cannot be served by the data."""


def _matrix(X):
    if isinstance(X, SnapshotMatrix):
        return X.data
    X = np.asarray(X, dtype=float)
    if X.ndim != 2:
        raise DimensionMismatch("snapshot set must be a matrix")
    return X


def _columns(V):
    return V.columns if isinstance(V, ReducedBasis) else np.asarray(V)


def _check_two_k(two_k, dim):
    if two_k <= 0 or two_k % 2 != 0:
        raise BasisSizeError(f"basis size must be positive and even, "
                             f"got {two_k}")
    if two_k > dim:
        raise BasisSizeError(f"basis size {two_k} exceeds dimension {dim}")
    return two_k // 2


# ---------------------------------------------------------------------------
# Projection-error functionals
# ---------------------------------------------------------------------------

def pod_loss(V, X):
    """Squared Frobenius residual of the orthogonal projection onto V."""
    V, X = _columns(V), _matrix(X)
    if V.shape[1] == 0:
        return float(np.linalg.norm(X) ** 2)
    R = X - V @ (V.T @ X)
    return float(np.linalg.norm(R) ** 2)


def psd_loss(V, X, tol=None):
    """Squared Frobenius residual of the symplectic projection onto V.

    V must be symplectic; the functional equals the column-wise sum of
    squared residual 2-norms.
    """
    if isinstance(V, ReducedBasis):
        if not V.is_symplectic:
            raise SymplecticityError(
                f"symplectic projection needs a symplectic basis, "
                f"got kind {V.kind!r}"
            )
        V = V.columns
    V, X = np.asarray(V), _matrix(X)
    if V.shape[1] == 0:
        return float(np.linalg.norm(X) ** 2)
    s = symplecticity_measure(V)
    limit = (tol if tol is not None else 1e-6) * np.sqrt(V.shape[1])
    if s >= limit:
        raise SymplecticityError(
            f"symplecticity defect {s:.3e} exceeds {limit:.1e}"
        )
    R = X - V @ (symplectic_inverse(V) @ X)
    return float(np.linalg.norm(R) ** 2)


# ---------------------------------------------------------------------------
# Orthogonal baselines
# ---------------------------------------------------------------------------

def pod_full(X, two_k):
    """Principal left singular vectors of the full snapshot set."""
    X = _matrix(X)
    _check_two_k(two_k, X.shape[0])
    U, _, _ = truncated_svd(X, two_k)
    return ReducedBasis(columns=U, kind=KIND_ORTHONORMAL)


def pod_separate(X, two_k):
    """Separate position/momentum principal directions, block diagonal."""
    X = _matrix(X)
    k = _check_two_k(two_k, X.shape[0])
    n = X.shape[0] // 2
    Uq, _, _ = truncated_svd(X[:n], k)
    Up, _, _ = truncated_svd(X[n:], k)
    V = np.zeros((2 * n, 2 * k))
    V[:n, :k] = Uq
    V[n:, k:] = Up
    return ReducedBasis(columns=V, kind=KIND_ORTHONORMAL)


# ---------------------------------------------------------------------------
# Orthonormal symplectic methods
# ---------------------------------------------------------------------------

def psd_cotangent_lift(X, two_k):
    """Shared position/momentum block, lifted to phase space.

    The left singular vectors of the n x 2ns matrix [X_q, X_p] give a
    single orthonormal block used for both positions and momenta.
    """
    X = _matrix(X)
    k = _check_two_k(two_k, X.shape[0])
    n = X.shape[0] // 2
    lifted = np.hstack((X[:n], X[n:]))
    Phi, _, _ = truncated_svd(lifted, k)
    E = np.vstack((Phi, np.zeros((n, k))))
    V = np.hstack((E, apply_poisson_transpose(E)))
    return ReducedBasis(columns=V, kind=KIND_ORTHOSYMPLECTIC)


def _require_gap(sigma, cut, what):
    """Spectral gap sigma[cut-1] > sigma[cut], relative to sigma[0]."""
    if cut > len(sigma):
        raise SpectralGapError(
            f"{what}: requested size exceeds the available spectrum"
        )
    lead = sigma[0] if len(sigma) else 0.0
    s_in = sigma[cut - 1]
    s_out = sigma[cut] if cut < len(sigma) else 0.0
    if s_in <= RANK_TOL * lead or (s_in - s_out) <= GAP_TOL * lead:
        raise SpectralGapError(
            f"{what}: no singular-value gap at index {cut} "
            f"(sigma_in={s_in:.6e}, sigma_out={s_out:.6e})"
        )


def pod_of_ys(X, two_k):
    """Orthogonal principal directions of the augmented set [X, J X].

    The augmented snapshot matrix has left singular vectors in pairs
    (u, J^T u) with equal singular values; keeping k such pairs yields
    an orthonormal basis of the form [E, J^T E] that is optimal for the
    symplectic projection error among orthonormal symplectic bases.
    Requires a singular-value gap at 2k.
    """
    X = _matrix(X)
    k = _check_two_k(two_k, X.shape[0])
    Y = np.hstack((X, apply_poisson(X)))
    U, sigma, _ = scipy.linalg.svd(Y, full_matrices=False)
    _require_gap(sigma, two_k, "augmented-snapshot basis")

    E_cols = []
    for j in range(U.shape[1]):
        if len(E_cols) == k:
            break
        e = _orthosymplectic_extend(E_cols, U[:, j])
        if e is not None:
            E_cols.append(e)
    if len(E_cols) < k:
        raise SpectralGapError(
            "augmented-snapshot basis: ran out of independent singular "
            f"vectors after {len(E_cols)} of {k} pairs"
        )
    E = np.column_stack(E_cols)
    V = np.hstack((E, apply_poisson_transpose(E)))
    return ReducedBasis(columns=V, kind=KIND_ORTHOSYMPLECTIC)


def psd_complex_svd(X, two_k):
    """Complex formulation of the optimal orthonormal symplectic basis.

    Positions and momenta are combined into the complex snapshot matrix
    X_q + i X_p whose k principal complex left singular vectors supply
    the block E = [Re; Im].  Produces the same projector as pod_of_ys,
    through complex arithmetic instead of the doubled real problem.
    """
    X = _matrix(X)
    k = _check_two_k(two_k, X.shape[0])
    n = X.shape[0] // 2
    C = X[:n] + 1j * X[n:]
    U, sigma, _ = scipy.linalg.svd(C, full_matrices=False)
    _require_gap(sigma, k, "complex-formulation basis")
    Uk = U[:, :k]
    E = np.vstack((np.real(Uk), np.imag(Uk)))
    V = np.hstack((E, apply_poisson_transpose(E)))
    return ReducedBasis(columns=V, kind=KIND_ORTHOSYMPLECTIC)


def psd_greedy(X, two_k, stop_tol=1e-13):
    """Greedy selection of snapshot columns, J-orthonormalized.

    Each iteration picks the snapshot with the largest residual 2-norm
    under the current symplectic projection and extends the E block
    with it (modified symplectic Gram-Schmidt with re-orthogonalization).
    Stops early with a warning when every remaining snapshot is within
    stop_tol (times the largest column norm) of the span.
    """
    X = _matrix(X)
    k = _check_two_k(two_k, X.shape[0])
    R = X.copy()
    scale = np.max(np.linalg.norm(X, axis=0)) if X.size else 0.0
    E_cols = []
    for _ in range(k):
        norms = np.linalg.norm(R, axis=0)
        pick = int(np.argmax(norms))
        if norms[pick] <= stop_tol * scale:
            warnings.warn(
                f"greedy stopped early at {len(E_cols)} of {k} pairs: "
                "remaining snapshots lie in the span", stacklevel=2,
            )
            break
        e = _orthosymplectic_extend(E_cols, X[:, pick])
        if e is None:
            # selection said otherwise; trust the exact projection
            R[:, pick] = 0.0
            continue
        E_cols.append(e)
        je = apply_poisson_transpose(e)
        R -= np.outer(e, e @ R)
        R -= np.outer(je, je @ R)
    if not E_cols:
        raise EmptyExtensionError("greedy could not select any snapshot")
    E = np.column_stack(E_cols)
    V = np.hstack((E, apply_poisson_transpose(E)))
    return ReducedBasis(columns=V, kind=KIND_ORTHOSYMPLECTIC)


# ---------------------------------------------------------------------------
# Non-orthonormal symplectic method
# ---------------------------------------------------------------------------

def psd_svd_like(X, two_k, factors=None):
    """Symplectic basis from column pairs of the S factor of X = S D Q.

    The k pairs are chosen to maximize the retained sum of squared
    weighted symplectic singular values; the symplectic projection
    error then equals the neglected sum exactly.  The resulting basis
    is symplectic but in general not orthonormal.
    """
    X = _matrix(X)
    k = _check_two_k(two_k, X.shape[0])
    if factors is None:
        factors = svd_like_decompose(X)
    spectrum = weighted_spectrum(factors)
    if k > factors.p + factors.q:
        raise BasisSizeError(
            f"requested {k} column pairs but only p+q = "
            f"{factors.p + factors.q} carry weight"
        )
    selected, _ = select_indices_by_weight(spectrum.weights, k)
    n = factors.n
    V = np.hstack((factors.S[:, selected], factors.S[:, n + selected]))
    return ReducedBasis(columns=V, kind=KIND_SYMPLECTIC)


METHODS = {
    "pod_full": pod_full,
    "pod_separate": pod_separate,
    "psd_cotangent_lift": psd_cotangent_lift,
    "pod_of_ys": pod_of_ys,
    "psd_complex_svd": psd_complex_svd,
    "psd_greedy": psd_greedy,
    "psd_svd_like": psd_svd_like,
}


def build_basis(method, X, two_k, **kwargs):
    """Dispatch a basis build by method name."""
    try:
        fn = METHODS[method]
    except KeyError:
        raise KeyError(
            f"unknown method {method!r}; choose from {sorted(METHODS)}"
        ) from None
    return fn(X, two_k, **kwargs)
