"""Matrix factorizations used by the basis generators.

Besides a thin truncated-SVD wrapper this module provides the
decomposition B = S D Q of an arbitrary real 2n x m matrix into a
symplectic S (2n x 2n), a sparse D (2n x m) carrying the symplectic
singular values, and an orthogonal Q (m x m), together with the
weighted spectrum attached to the columns of S, and a modified
symplectic Gram-Schmidt procedure with re-orthogonalization.

The factorization route forms the skew-symmetric pairing matrix
M = B^T J B explicitly and eigendecomposes it.  At the matrix sizes
this package targets (m up to a few thousand columns) the cancellation
this can incur stays far below the reconstruction gate, which is
checked after every factorization.
"""

import warnings

import numpy as np
import scipy.linalg

from dataclasses import dataclass, field

from .symplectic import (
    DimensionMismatch,
    KIND_ORTHOSYMPLECTIC,
    ReducedBasis,
    SymplecticityError,
    apply_poisson,
    apply_poisson_transpose,
    symplectic_inverse,
)

__all__ = [
    "DecompositionError",
    "EmptyExtensionError",
    "SvdLikeFactors",
    "WeightedSpectrum",
    "truncated_svd",
    "svd_like_decompose",
    "symplectic_singular_values",
    "weighted_spectrum",
    "select_indices_by_weight",
    "symplectic_gram_schmidt",
    "paired_singular_values",
]

# Eigen/singular values below RANK_TOL times the largest are treated as
# zero when the block sizes p and q are determined.
RANK_TOL = 1e-10

# A Gram-Schmidt candidate is dropped when its norm after projection
# falls below DROP_TOL times its original norm.
DROP_TOL = 1e-10

# Reconstruction gate for the factorization, relative to max(1, ||B||_F).
RECONSTRUCTION_TOL = 1e-8

# Number of re-orthogonalization sweeps over the completion columns the
# factorization may spend before giving up.
MAX_COMPLETION_SWEEPS = 3


class DecompositionError(RuntimeError):
    """Factorization failed its reconstruction gate.

    Carries the achieved relative residual in the ``residual`` attribute.
    """

    def __init__(self, message, residual=None):
        super().__init__(message)
        self.residual = residual


class EmptyExtensionError(RuntimeError):
    """Every Gram-Schmidt candidate was dropped; nothing to extend with."""


def truncated_svd(B, r):
    """Rank-r truncated singular value decomposition.

    Returns (U, sigma, Vt) with U (a x r), sigma (r,) descending and
    Vt (r x b); the discarded energy is the tail sum of squared
    singular values.
    """
    B = np.asarray(B, dtype=float)
    if B.ndim != 2:
        raise DimensionMismatch("expected a matrix")
    if r > min(B.shape):
        raise DimensionMismatch(
            f"rank {r} exceeds min(shape) = {min(B.shape)}"
        )
    U, s, Vt = scipy.linalg.svd(B, full_matrices=False)
    return U[:, :r], s[:r], Vt[:r, :]


# ---------------------------------------------------------------------------
# SVD-like decomposition
# ---------------------------------------------------------------------------

@dataclass
class SvdLikeFactors:
    """Factors of B = S D Q.

    S : (2n, 2n) symplectic.
    D : (2n, m) sparse pattern; entries (i, i) = sigma_s[i] for i < p,
        (p+j, p+j) = 1 for j < q, (n+i, p+q+i) = sigma_s[i] for i < p,
        everything else exactly zero.
    Q : (m, m) orthogonal.
    p : number of symplectic singular values (column pairs of S pinned
        with a positive weight).
    q : number of unit-block columns.
    sigma_s : (p,) symplectic singular values, positive, descending.
    residual : achieved relative reconstruction residual.
    """

    S: np.ndarray
    D: np.ndarray
    Q: np.ndarray
    p: int
    q: int
    sigma_s: np.ndarray
    residual: float = field(default=np.nan)

    @property
    def n(self):
        return self.S.shape[0] // 2

    @property
    def m(self):
        return self.Q.shape[0]

    def reconstruct(self):
        return self.S @ (self.D @ self.Q)


@dataclass
class WeightedSpectrum:
    """Weighted symplectic singular values of an SvdLikeFactors object.

    weights[i] for i < p is sigma_s[i] * sqrt(|s_i|^2 + |s_(n+i)|^2);
    weights[p+j] is |s_(p+j)| for the q unit-block columns.  The squares
    sum to ||B||_F^2.
    """

    weights: np.ndarray
    column_norm_pairs: np.ndarray  # (p+q, 2); second entry 0 for unit block

    @property
    def total_energy(self):
        return float(np.sum(self.weights**2))


def _pairing_matrix(B):
    """Skew-symmetric M = B^T J B, symmetrized exactly."""
    M = B.T @ apply_poisson(B)
    return 0.5 * (M - M.T)


# Eigenvalues of the pairing matrix below NOISE_FACTOR * eps * |theta|_max
# are indistinguishable from round-off of the eigensolver.
NOISE_FACTOR = 100.0


def _skew_spectrum(M, noise_scale=None):
    """Decompose the real skew-symmetric M.

    Returns (theta, A, Bv) where theta (p,) holds the positive numbers
    with spectrum(M) = {+/- i theta} above the noise floor, descending,
    and A, Bv (m x p) are real orthonormal with M a_i = -theta_i b_i
    and M b_i = theta_i a_i.  noise_scale, when given, is the absolute
    scale of the formation error of M (for a pairing matrix B^T J B
    that is the squared largest singular value of B): eigenvalues that
    small are indistinguishable from round-off even when they dominate
    the spectrum of M itself.
    """
    m = M.shape[0]
    if m == 0:
        return np.zeros(0), np.zeros((0, 0)), np.zeros((0, 0))
    lam, U = np.linalg.eigh(1j * M)
    scale = np.max(np.abs(lam)) if lam.size else 0.0
    if noise_scale is not None:
        scale = max(scale, noise_scale)
    cut = NOISE_FACTOR * np.finfo(float).eps * scale
    neg = np.where(lam < -cut)[0]
    # M u = i*theta*u for eigenvectors of 1j*M with eigenvalue -theta.
    theta = -lam[neg]
    order = np.argsort(-theta, kind="stable")
    theta = theta[order]
    Uneg = U[:, neg[order]]
    A = np.sqrt(2.0) * np.real(Uneg)
    Bv = np.sqrt(2.0) * np.imag(Uneg)
    return theta, A, Bv


def _orthonormal_complement(W, dim):
    """Real orthonormal basis of the orthogonal complement of span(W)."""
    if W.shape[1] == 0:
        return np.eye(dim)
    Uf = scipy.linalg.svd(W, full_matrices=True)[0]
    return Uf[:, W.shape[1]:]


class _SymplecticFrame:
    """Growing collection of column pairs kept mutually J-orthogonal.

    Used to complete a partially pinned symplectic matrix: ``project``
    removes from a candidate every component seen by the current frame
    with two sweeps (classical re-orthogonalization).  The frame matrix
    keeps the [E | F] block convention the symplectic inverse expects.
    """

    def __init__(self, dim):
        self.dim = dim
        self.es = []
        self.fs = []

    def matrix(self):
        if not self.es:
            return np.zeros((self.dim, 0))
        return np.column_stack(self.es + self.fs)

    def add_pair(self, e, f):
        self.es.append(e)
        self.fs.append(f)

    def project(self, v, sweeps=2):
        if not self.es:
            return v
        V = self.matrix()
        Wt = symplectic_inverse(V)
        for _ in range(sweeps):
            v = v - V @ (Wt @ v)
        return v


def svd_like_decompose(B):
    """Factor B (2n x m) as S D Q with S symplectic and Q orthogonal.

    The symplectic singular values are recovered from the eigenvalues
    of the pairing matrix B^T J B; the column pairs of S that carry
    them are read off B Q^T, the kernel image supplies the unit block,
    and the remaining columns of S are completed through the canonical
    basis with symplectic Gram-Schmidt sweeps.  The reconstruction is
    verified and a DecompositionError raised if the gate fails.
    """
    B = np.asarray(B, dtype=float)
    if B.ndim != 2:
        raise DimensionMismatch("expected a matrix")
    n = B.shape[0] // 2
    if B.shape[0] != 2 * n or n == 0:
        raise DimensionMismatch("row count must be even and positive")
    m = B.shape[1]
    if m < 1:
        raise DimensionMismatch("need at least one column")

    norm_B = np.linalg.norm(B)
    if norm_B == 0.0:
        factors = SvdLikeFactors(
            S=np.eye(2 * n), D=np.zeros((2 * n, m)), Q=np.eye(m),
            p=0, q=0, sigma_s=np.zeros(0), residual=0.0,
        )
        return factors

    sigma_ref = np.linalg.svd(B, compute_uv=False)[0]

    M = _pairing_matrix(B)
    theta, A, Bv = _skew_spectrum(M, noise_scale=sigma_ref**2)
    # Keep a pair only when its value and both image columns sit above
    # the rank cut of B itself; everything else is recovered through the
    # kernel image instead (as unit-block columns or the zero block).
    sigma_s = np.sqrt(theta)
    keep = sigma_s > RANK_TOL * sigma_ref
    if np.any(keep):
        img_a = np.linalg.norm(B @ A[:, keep], axis=0)
        img_b = np.linalg.norm(B @ Bv[:, keep], axis=0)
        keep[np.where(keep)[0]] &= (img_a > RANK_TOL * sigma_ref) \
            & (img_b > RANK_TOL * sigma_ref)
    sigma_s, A, Bv = sigma_s[keep], A[:, keep], Bv[:, keep]
    p = sigma_s.size

    if p:
        # Eigenvectors of near-noise values lose mutual orthogonality;
        # replace the pair block by its closest orthonormal set so the
        # orthogonal factor stays clean and nothing leaks into the
        # kernel complement.
        W = np.hstack((A, Bv))
        Uw, _, Vtw = scipy.linalg.svd(W, full_matrices=False)
        W = Uw @ Vtw
        A, Bv = W[:, :p], W[:, p:]

    # Kernel of M = orthogonal complement of the paired eigenvectors.
    kernel = _orthonormal_complement(np.hstack((A, Bv)), m)

    # Rotate the kernel so that B maps its leading directions onto an
    # orthogonal set (the unit-block columns) and annihilates the rest.
    C_null = B @ kernel
    if kernel.shape[1] > 0:
        # Full SVD: the rotation must keep every kernel direction, also
        # the ones B annihilates (they form the zero block of D).
        Un, sn, Wn = scipy.linalg.svd(C_null, full_matrices=True)
        q = int(np.sum(sn > RANK_TOL * sigma_ref))
        kernel = kernel @ Wn.T
        unit_cols = Un[:, :q] * sn[:q]
    else:
        q = 0
        unit_cols = np.zeros((2 * n, 0))

    if 2 * p + q > 2 * n:
        raise DecompositionError(
            f"inconsistent block sizes p={p}, q={q} for half-dimension {n}"
        )

    # Q rows: [a_1..a_p | kernel_1..kernel_q | b_1..b_p | kernel rest].
    G = np.empty((m, m))
    G[:, :p] = A
    G[:, p:p + q] = kernel[:, :q]
    G[:, p + q:2 * p + q] = Bv
    G[:, 2 * p + q:] = kernel[:, q:]
    Q = G.T

    # Pinned columns of S from C = B Q^T = S D.
    C = B @ G
    S = np.zeros((2 * n, 2 * n))
    if p:
        S[:, :p] = C[:, :p] / sigma_s
        S[:, n:n + p] = C[:, p + q:2 * p + q] / sigma_s
    S[:, p:p + q] = unit_cols

    _complete_symplectic(S, n, p, q)

    D = np.zeros((2 * n, m))
    D[np.arange(p), np.arange(p)] = sigma_s
    D[np.arange(p, p + q), np.arange(p, p + q)] = 1.0
    D[n + np.arange(p), p + q + np.arange(p)] = sigma_s

    residual = np.linalg.norm(S @ (D @ Q) - B) / max(1.0, norm_B)
    factors = SvdLikeFactors(
        S=S, D=D, Q=Q, p=p, q=int(q), sigma_s=sigma_s, residual=residual,
    )
    if residual > RECONSTRUCTION_TOL:
        raise DecompositionError(
            f"reconstruction residual {residual:.3e} exceeds "
            f"{RECONSTRUCTION_TOL:.1e}", residual=residual,
        )
    return factors


def _complete_symplectic(S, n, p, q):
    """Fill the unpinned columns of S so that S^T J S = J exactly enough.

    Pinned on entry: columns 0..p-1 and n..n+p-1 (value pairs) and
    p..p+q-1 (unit block, mutually orthogonal).  Their partners at
    n+p..n+p+q-1 and the free pairs are constructed here.
    """
    frame = _SymplecticFrame(2 * n)
    for i in range(p):
        frame.add_pair(S[:, i].copy(), S[:, n + i].copy())

    # Partners for the unit-block columns.  J^T e / |e|^2 pairs to one;
    # the projection sweeps remove every component the frame and the
    # remaining (mutually orthogonal) unit columns can see.
    for j in range(p, p + q):
        e = S[:, j]
        f = frame.project(apply_poisson_transpose(e) / (e @ e))
        S[:, n + j] = f
        frame.add_pair(e.copy(), f.copy())

    # Free pairs from canonical candidates.
    slot = p + q
    candidate = 0
    dim = 2 * n
    for _ in range(MAX_COMPLETION_SWEEPS):
        while slot < n and candidate < dim:
            w = np.zeros(dim)
            w[candidate] = 1.0
            candidate += 1
            w = frame.project(w)
            nw = np.linalg.norm(w)
            if nw < 1e-8:
                continue
            w /= nw
            z = frame.project(apply_poisson_transpose(w))
            omega = w @ apply_poisson(z)
            if abs(omega) < 1e-8:
                continue
            z /= omega
            S[:, slot] = w
            S[:, n + slot] = z
            frame.add_pair(w, z)
            slot += 1
        if slot == n:
            break
        candidate = 0  # retry dropped candidates after the frame grew
    if slot != n:
        raise DecompositionError(
            "failed to complete the symplectic factor within the sweep budget"
        )


def symplectic_singular_values(B):
    """Symplectic singular values of B, descending.

    These are the square roots of the magnitudes of the purely
    imaginary eigenvalue pairs of B^T J B.
    """
    B = np.asarray(B, dtype=float)
    if B.ndim != 2 or B.shape[0] % 2 != 0:
        raise DimensionMismatch("row count must be even")
    theta, _, _ = _skew_spectrum(_pairing_matrix(B))
    return np.sqrt(theta)


def weighted_spectrum(factors):
    """Weighted symplectic singular values attached to SvdLikeFactors.

    The sum of squared weights reproduces the squared Frobenius norm of
    the factored matrix.
    """
    S, n, p, q = factors.S, factors.n, factors.p, factors.q
    weights = np.zeros(p + q)
    pairs = np.zeros((p + q, 2))
    if p:
        top = np.linalg.norm(S[:, :p], axis=0)
        bottom = np.linalg.norm(S[:, n:n + p], axis=0)
        weights[:p] = factors.sigma_s * np.sqrt(top**2 + bottom**2)
        pairs[:p, 0] = top
        pairs[:p, 1] = bottom
    if q:
        unit = np.linalg.norm(S[:, p:p + q], axis=0)
        weights[p:] = unit
        pairs[p:, 0] = unit
    return WeightedSpectrum(weights=weights, column_norm_pairs=pairs)


def select_indices_by_weight(weights, k):
    """Indices of the k largest weights, ties broken by lower index.

    Returns (selected, neglected_energy) where selected is ascending
    and neglected_energy is the sum of squared weights left out.
    """
    weights = np.asarray(weights, dtype=float)
    if k > weights.size:
        raise DimensionMismatch(
            f"cannot select {k} of {weights.size} weights"
        )
    order = np.argsort(-(weights**2), kind="stable")
    selected = np.sort(order[:k])
    neglected = float(np.sum(weights[order[k:]] ** 2))
    return selected, neglected


# ---------------------------------------------------------------------------
# Symplectic Gram-Schmidt
# ---------------------------------------------------------------------------

def _orthosymplectic_extend(E_cols, v, drop_tol=DROP_TOL):
    """Try to extend the E-block by one J-orthonormalized vector.

    Projects v against span([E, J^T E]) twice (modified Gram-Schmidt
    with one mandatory re-orthogonalization pass) and normalizes.
    Returns the new unit column or None if v was dropped.
    """
    v = np.asarray(v, dtype=float)
    norm_in = np.linalg.norm(v)
    if norm_in == 0.0:
        return None
    for _ in range(2):
        for e in E_cols:
            v = v - e * (e @ v)
            je = apply_poisson_transpose(e)
            v = v - je * (je @ v)
    norm_out = np.linalg.norm(v)
    if norm_out < drop_tol * norm_in:
        return None
    return v / norm_out


def symplectic_gram_schmidt(vectors, seed_basis=None, drop_tol=DROP_TOL):
    """J-orthonormalize vectors into an orthonormal symplectic basis.

    Extends the E-block of an optional orthonormal-symplectic seed basis
    and returns V = [E, J^T E].  Candidates that fall into the span of
    the current basis (norm after projection below drop_tol times the
    input norm) are skipped with a warning; if every candidate is
    skipped an EmptyExtensionError is raised.
    """
    E_cols = []
    if seed_basis is not None:
        if isinstance(seed_basis, ReducedBasis):
            if seed_basis.kind != KIND_ORTHOSYMPLECTIC:
                raise SymplecticityError(
                    "seed basis must be orthonormal-symplectic, "
                    f"got kind {seed_basis.kind!r}"
                )
            seed = seed_basis.columns
        else:
            seed = np.asarray(seed_basis, dtype=float)
        k_seed = seed.shape[1] // 2
        E_cols = [seed[:, i].copy() for i in range(k_seed)]

    accepted = 0
    for idx, v in enumerate(vectors):
        e = _orthosymplectic_extend(E_cols, v, drop_tol)
        if e is None:
            warnings.warn(
                f"candidate {idx} lies in the span of the current basis; "
                "skipped", stacklevel=2,
            )
            continue
        E_cols.append(e)
        accepted += 1
    if accepted == 0:
        raise EmptyExtensionError(
            "all candidates were dropped; basis not extended"
        )
    E = np.column_stack(E_cols)
    V = np.hstack((E, apply_poisson_transpose(E)))
    return ReducedBasis(columns=V, kind=KIND_ORTHOSYMPLECTIC)


def paired_singular_values(X):
    """Singular values of [X, J X]; they come in equal pairs.

    Utility used by the augmented-snapshot basis generator and its
    validation; returned descending.
    """
    X = np.asarray(X, dtype=float)
    Y = np.hstack((X, apply_poisson(X)))
    return scipy.linalg.svd(Y, compute_uv=False)
