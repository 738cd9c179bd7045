"""Offline reduction, online reduced solves, and evaluation metrics.

A reduced basis V with projection rows W^T turns the linear
Hamiltonian system dx/dt = A x + b(t) into

    d/dt xhat = Ahat xhat + bhat(t),      xhat(t0) = W^T x0 .

For a symplectic V with W^T = V^+ the reduced system is again
Hamiltonian with Hhat = V^T H V, hhat = V^T h and Ahat = J Hhat; an
orthonormal but non-symplectic V is handled as a plain Galerkin
baseline with W = V.  The generalization experiment trains bases on a
parameter grid and scores them on disjoint test parameters.
"""

import time
import warnings

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from .basis import (
    BasisSizeError,
    METHODS,
    SpectralGapError,
    pod_loss,
    psd_loss,
)
from .integrate import (
    SnapshotMatrix,
    TimeGrid,
    implicit_midpoint_linear,
    snapshot_collect,
)
from .spectral import (
    DecompositionError,
    svd_like_decompose,
    weighted_spectrum,
)
from .symplectic import (
    DimensionMismatch,
    ReducedBasis,
    apply_poisson,
    symplectic_inverse,
)

__all__ = [
    "ReductionModeError",
    "ReducedLinearSystem",
    "reduce_system",
    "solve_reduced",
    "reduced_hamiltonian_series",
    "relative_error",
    "hamiltonian_drift",
    "CellResult",
    "EvaluationReport",
    "run_generalization_experiment",
    "DRIFT_TOL",
]

# A reduced simulation preserves the Hamiltonian when the relative
# deviation from its initial value stays below this for all times.
DRIFT_TOL = 1e-10


class ReductionModeError(ValueError):
    """Requested projection mode conflicts with the basis kind."""


@dataclass
class ReducedLinearSystem:
    """Reduced operators of one (system, basis) pair.

    Carries both the reduced quadratic form (Hhat, hhat pieces) used to
    track the reduced Hamiltonian and the evolution operator Ahat with
    inhomogeneity bhat(t) used by the integrator.
    """

    Hhat: np.ndarray
    Ahat: np.ndarray
    hhat_static: np.ndarray
    hhat_tip: np.ndarray
    bhat_static: np.ndarray
    bhat_tip: np.ndarray
    profile: object
    x0hat: np.ndarray
    basis: ReducedBasis
    mode: str
    mu: tuple = (np.nan, np.nan)

    @property
    def two_k(self):
        return self.Hhat.shape[0]

    def hhat(self, t):
        return self.hhat_static + self.profile(t) * self.hhat_tip

    def system_matrices(self):
        def b(t):
            return self.bhat_static + self.profile(t) * self.bhat_tip
        return self.Ahat, b, self.x0hat

    def hamiltonian(self, xhat, t=0.0):
        xhat = np.asarray(xhat)
        return float(
            0.5 * xhat @ (self.Hhat @ xhat) + xhat @ self.hhat(t)
        )


def _resolve_mode(basis, mode):
    if mode is None:
        mode = "symplectic" if basis.is_symplectic else "galerkin"
    if mode == "symplectic" and not basis.is_symplectic:
        raise ReductionModeError(
            f"symplectic reduction needs a symplectic basis, "
            f"got kind {basis.kind!r}"
        )
    if mode == "galerkin" and not basis.is_orthonormal:
        raise ReductionModeError(
            f"galerkin reduction needs an orthonormal basis, "
            f"got kind {basis.kind!r}"
        )
    if mode not in ("symplectic", "galerkin"):
        raise ReductionModeError(f"unknown reduction mode {mode!r}")
    return mode


def reduce_system(system, basis, mode=None):
    """Assemble the reduced operators for one parameter instance."""
    mode = _resolve_mode(basis, mode)
    V = basis.columns
    n = system.n
    if V.shape[0] != 2 * n:
        raise DimensionMismatch("basis does not match the system dimension")
    Vq, Vp = V[:n], V[n:]

    Hhat = Vq.T @ (system.K @ Vq) + Vp.T @ (system.minv[:, None] * Vp)
    static = system.static_load
    hhat_static = -Vq.T @ static if static is not None else \
        np.zeros(V.shape[1])
    hhat_tip = -Vq.T @ system.tip_pattern

    if mode == "symplectic":
        Wt = symplectic_inverse(V)
        Ahat = apply_poisson(Hhat)
        bhat_static = apply_poisson(hhat_static)
        bhat_tip = apply_poisson(hhat_tip)
    else:
        Wt = V.T
        # Ahat = V^T A V with A = [[0, Minv], [-K, 0]]
        Ahat = Vq.T @ (system.minv[:, None] * Vp) - Vp.T @ (system.K @ Vq)
        bhat_static = Vp.T @ static if static is not None else \
            np.zeros(V.shape[1])
        bhat_tip = Vp.T @ system.tip_pattern

    return ReducedLinearSystem(
        Hhat=Hhat, Ahat=Ahat,
        hhat_static=hhat_static, hhat_tip=hhat_tip,
        bhat_static=bhat_static, bhat_tip=bhat_tip,
        profile=system.profile, x0hat=Wt @ system.x0,
        basis=basis, mode=mode, mu=system.mu,
    )


class OfflineReduction:
    """Parameter-independent reduced pieces for one basis.

    The stiffness decomposition K(mu) = theta_1 K1 + theta_2 K2 of the
    model family reduces once; assembling the reduced system for a new
    parameter then only recombines the small matrices (the reduced
    initial state still requires the full x0(mu)).
    """

    def __init__(self, family, basis, mode=None):
        self.mode = _resolve_mode(basis, mode)
        self.basis = basis
        V = basis.columns
        n = family.K1.shape[0]
        if V.shape[0] != 2 * n:
            raise DimensionMismatch("basis does not match the family")
        Vq, Vp = V[:n], V[n:]
        self.G1 = Vq.T @ (family.K1 @ Vq)
        self.G2 = Vq.T @ (family.K2 @ Vq)
        self.Gm = Vp.T @ (family.minv[:, None] * Vp)
        if self.mode == "galerkin":
            self.A1 = -Vp.T @ (family.K1 @ Vq)
            self.A2 = -Vp.T @ (family.K2 @ Vq)
            self.Am = Vq.T @ (family.minv[:, None] * Vp)
        self.family = family

    def assemble(self, system):
        """Recombine for one assembled full system (same family)."""
        basis = self.basis
        V = basis.columns
        n = system.n
        Vq, Vp = V[:n], V[n:]
        t1, t2 = system.family.theta(system.mu)
        Hhat = t1 * self.G1 + t2 * self.G2 + self.Gm
        static = system.static_load
        hhat_static = -Vq.T @ static if static is not None else \
            np.zeros(V.shape[1])
        hhat_tip = -Vq.T @ system.tip_pattern
        if self.mode == "symplectic":
            Wt = symplectic_inverse(V)
            Ahat = apply_poisson(Hhat)
            bhat_static = apply_poisson(hhat_static)
            bhat_tip = apply_poisson(hhat_tip)
        else:
            Wt = V.T
            Ahat = t1 * self.A1 + t2 * self.A2 + self.Am
            bhat_static = Vp.T @ static if static is not None else \
                np.zeros(V.shape[1])
            bhat_tip = Vp.T @ system.tip_pattern
        return ReducedLinearSystem(
            Hhat=Hhat, Ahat=Ahat,
            hhat_static=hhat_static, hhat_tip=hhat_tip,
            bhat_static=bhat_static, bhat_tip=bhat_tip,
            profile=system.profile, x0hat=Wt @ system.x0,
            basis=basis, mode=self.mode, mu=system.mu,
        )


def solve_reduced(reduced, grid):
    """Implicit midpoint on the reduced system."""
    return implicit_midpoint_linear(reduced, grid, mu=reduced.mu)


def reduced_hamiltonian_series(reduced, trajectory):
    """Reduced Hamiltonian evaluated along a reduced trajectory."""
    xhat, times = trajectory.states, trajectory.times
    quad = 0.5 * np.einsum("it,it->t", xhat, reduced.Hhat @ xhat)
    lin_static = xhat.T @ reduced.hhat_static
    lin_tip = (xhat.T @ reduced.hhat_tip) * reduced.profile(times)
    return quad + lin_static + lin_tip


def relative_error(full, reduced_traj, basis):
    """Relative max-norm error of the reconstruction in time and space."""
    V = basis.columns if isinstance(basis, ReducedBasis) else basis
    diff = full.states - V @ reduced_traj.states
    num = np.max(np.abs(diff))
    den = np.max(np.abs(full.states))
    return float(num / den)


def hamiltonian_drift(ham_series, h_rel, tol=DRIFT_TOL):
    """(preserved flag, drift profile) of a Hamiltonian time series.

    The profile is the deviation from the initial value normalized by
    h_rel; preserved means every profile entry stays below tol.
    """
    ham_series = np.asarray(ham_series, dtype=float)
    profile = np.abs(ham_series - ham_series[0]) / h_rel
    return bool(np.max(profile) < tol), profile


def reference_energy(system, trajectory):
    """Normalization max_i |H(x_i, t_i)|, floored at machine epsilon."""
    values = [
        system.hamiltonian(trajectory.states[:, i], trajectory.times[i])
        for i in range(trajectory.nt)
    ]
    return max(float(np.max(np.abs(values))), np.finfo(float).eps)


# ---------------------------------------------------------------------------
# Generalization experiment
# ---------------------------------------------------------------------------

@dataclass
class CellResult:
    """Metrics of one (method, basis size, test parameter) cell."""

    method: str
    two_k: int
    mu_index: int
    mu: tuple
    status: str = "ok"            # ok | failed
    reason: str = ""
    rel_err: float = np.nan
    e_l2: float = np.nan
    o_v: float = np.nan
    s_v: float = np.nan
    drift_max: float = np.nan
    preserved: bool | None = None
    wall_seconds: float = np.nan
    ham_profile: np.ndarray | None = field(default=None, repr=False)


@dataclass
class EvaluationReport:
    """All cells of a generalization experiment plus shared spectra."""

    rows: list
    sweep: tuple
    methods: tuple
    test_params: np.ndarray
    e_l2: dict                    # (method, two_k) -> projection error
    singular_values: np.ndarray
    symplectic_singular_values: np.ndarray
    weighted_values: np.ndarray
    autonomous: bool
    basis_failures: dict          # (method, two_k) -> reason

    def cells(self, method=None):
        for row in self.rows:
            if method is None or row.method == method:
                yield row

    def preservation_counts(self):
        """(method, two_k) -> (#preserved, #total) over the test set."""
        counts = {}
        for row in self.rows:
            key = (row.method, row.two_k)
            ok, total = counts.get(key, (0, 0))
            if row.status == "ok" and row.preserved is not None:
                counts[key] = (ok + int(row.preserved), total + 1)
        return counts


def _sweep_basis_builder(method, snapshots, sweep):
    """Build the basis for every sweep size, sharing factorizations.

    Returns {two_k: ReducedBasis or exception}.  The decomposition-based
    method factors the snapshot matrix once; the greedy method runs at
    the largest size and slices prefixes; the SVD-based methods simply
    call the public constructors (scipy caches nothing, but each call
    is one dense SVD at desk scale).
    """
    X = snapshots.data if isinstance(snapshots, SnapshotMatrix) \
        else np.asarray(snapshots)
    out = {}
    if method == "psd_svd_like":
        try:
            factors = svd_like_decompose(X)
        except (DecompositionError, DimensionMismatch) as exc:
            return {two_k: exc for two_k in sweep}
        for two_k in sweep:
            try:
                out[two_k] = METHODS[method](X, two_k, factors=factors)
            except (BasisSizeError, SpectralGapError) as exc:
                out[two_k] = exc
        return out

    if method == "psd_greedy":
        top = max(sweep)
        try:
            with warnings.catch_warnings():
                warnings.simplefilter("ignore")
                big = METHODS[method](X, top)
        except Exception as exc:   # keep the sweep alive per cell
            return {two_k: exc for two_k in sweep}
        E = big.columns[:, :big.half_rank]
        for two_k in sweep:
            k = two_k // 2
            if k > big.half_rank:
                out[two_k] = BasisSizeError(
                    f"greedy stopped at {big.half_rank} pairs"
                )
                continue
            Ek = E[:, :k]
            JE = np.concatenate((-Ek[X.shape[0] // 2:], Ek[:X.shape[0] // 2]))
            out[two_k] = ReducedBasis(
                columns=np.hstack((Ek, JE)), kind=big.kind
            )
        return out

    for two_k in sweep:
        try:
            out[two_k] = METHODS[method](X, two_k)
        except (SpectralGapError, BasisSizeError, DecompositionError,
                DimensionMismatch) as exc:
            out[two_k] = exc
    return out


def run_generalization_experiment(family, design, methods, jobs=1,
                                  drift_tol=DRIFT_TOL,
                                  keep_profiles_for=("pod_separate",)):
    """Train on the design grid, evaluate on the disjoint test set.

    For each method and sweep size a basis is built from the training
    snapshots only; every test parameter is then solved in reduced
    coordinates and compared against its full trajectory.  Per-cell
    failures are recorded and the run continues.  Hamiltonian
    preservation is only judged for autonomous families.
    """
    sweep = tuple(design.sweep)
    snapshots = snapshot_collect(design, family.assemble)
    dim = snapshots.dim
    if any(two_k > dim for two_k in sweep):
        raise BasisSizeError("sweep contains sizes above the dimension")

    grid = TimeGrid(design.t0, design.t_end, design.nt)
    autonomous = family.profile.constant

    # Shared spectra for the report.
    singular = np.linalg.svd(snapshots.data, compute_uv=False)
    try:
        factors = svd_like_decompose(snapshots.data)
        spectrum = weighted_spectrum(factors)
        sympl_singular = factors.sigma_s.copy()
        weighted = spectrum.weights.copy()
    except DecompositionError:
        sympl_singular = np.zeros(0)
        weighted = np.zeros(0)

    # Full test trajectories, one per parameter.
    test_params = np.asarray(design.test_params)
    full_systems, full_trajs, h_rels = [], [], []
    for mu in test_params:
        system = family.assemble(mu)
        traj = implicit_midpoint_linear(system, grid, mu=tuple(mu))
        full_systems.append(system)
        full_trajs.append(traj)
        h_rels.append(reference_energy(system, traj))

    rows, e_l2, basis_failures = [], {}, {}
    for method in methods:
        bases = _sweep_basis_builder(method, snapshots, sweep)
        for two_k in sweep:
            basis = bases[two_k]
            if isinstance(basis, Exception):
                basis_failures[(method, two_k)] = (
                    f"{type(basis).__name__}: {basis}"
                )
                for j, mu in enumerate(test_params):
                    rows.append(CellResult(
                        method=method, two_k=two_k, mu_index=j,
                        mu=tuple(mu), status="failed",
                        reason=f"{type(basis).__name__}: {basis}",
                    ))
                continue

            o_v, s_v = basis.measures()
            loss = psd_loss if basis.is_symplectic else pod_loss
            e_l2[(method, two_k)] = loss(basis, snapshots.data)

            offline = OfflineReduction(family, basis)

            def cell(j, method=method, two_k=two_k, basis=basis,
                     offline=offline, o_v=o_v, s_v=s_v):
                mu = test_params[j]
                row = CellResult(
                    method=method, two_k=two_k, mu_index=j, mu=tuple(mu),
                    o_v=o_v, s_v=s_v, e_l2=e_l2[(method, two_k)],
                )
                tic = time.perf_counter()
                try:
                    reduced = offline.assemble(full_systems[j])
                    red_traj = solve_reduced(reduced, grid)
                    row.rel_err = relative_error(
                        full_trajs[j], red_traj, basis
                    )
                    if autonomous:
                        ham = reduced_hamiltonian_series(reduced, red_traj)
                        preserved, profile = hamiltonian_drift(
                            ham, h_rels[j], tol=drift_tol
                        )
                        row.preserved = preserved
                        row.drift_max = float(np.max(profile))
                        if method in keep_profiles_for:
                            row.ham_profile = ham
                except Exception as exc:
                    row.status = "failed"
                    row.reason = f"{type(exc).__name__}: {exc}"
                row.wall_seconds = time.perf_counter() - tic
                return row

            indices = range(len(test_params))
            if jobs > 1:
                with ThreadPoolExecutor(max_workers=jobs) as pool:
                    rows.extend(pool.map(cell, indices))
            else:
                rows.extend(cell(j) for j in indices)

    rows.sort(key=lambda r: (r.method, r.two_k, r.mu_index))
    return EvaluationReport(
        rows=rows, sweep=sweep, methods=tuple(methods),
        test_params=test_params, e_l2=e_l2,
        singular_values=singular,
        symplectic_singular_values=sympl_singular,
        weighted_values=weighted,
        autonomous=autonomous,
        basis_failures=basis_failures,
    )
