"""Symplectic time integration of linear Hamiltonian systems.

The implicit midpoint rule for dx/dt = A x + b(t),

    (I - dt/2 A) x_(i+1) = (I + dt/2 A) x_i + dt b(t_(i+1/2)),

is a symplectic Runge-Kutta scheme: for A = J H the one-step propagator
(I - dt/2 A)^-1 (I + dt/2 A) is symplectic and quadratic invariants,
in particular the Hamiltonian of a linear system, are preserved up to
round-off.  The left-hand factorization is computed once per (system,
dt) and reused over all steps.
"""

import warnings

import numpy as np
import scipy.linalg

from dataclasses import dataclass

from .symplectic import DimensionMismatch

__all__ = [
    "IntegrationError",
    "TimeGrid",
    "Trajectory",
    "implicit_midpoint_linear",
    "midpoint_propagator",
    "SnapshotMatrix",
    "snapshot_collect",
]


class IntegrationError(RuntimeError):
    """Time stepping failed (singular or unusable midpoint system)."""


@dataclass(frozen=True)
class TimeGrid:
    """Uniform grid of nt points on [t0, t_end]."""

    t0: float
    t_end: float
    nt: int

    def __post_init__(self):
        if self.nt < 2:
            raise ValueError("a time grid needs at least two points")
        if not self.t_end > self.t0:
            raise ValueError("t_end must exceed t0")

    @property
    def dt(self):
        return (self.t_end - self.t0) / (self.nt - 1)

    @property
    def times(self):
        return np.linspace(self.t0, self.t_end, self.nt)


@dataclass
class Trajectory:
    """States column-stacked over a uniform time grid."""

    states: np.ndarray  # (dim, nt)
    times: np.ndarray   # (nt,)
    mu: tuple = (np.nan, np.nan)

    @property
    def dim(self):
        return self.states.shape[0]

    @property
    def nt(self):
        return self.states.shape[1]


def _resolve_operator(system):
    if hasattr(system, "system_matrices"):
        return system.system_matrices()
    raise TypeError(
        "expected an object exposing system_matrices() -> (A, b, x0)"
    )


def implicit_midpoint_linear(system, grid, mu=None):
    """Integrate a (full or reduced) linear Hamiltonian system.

    system must expose system_matrices() returning the dense operator
    A, the inhomogeneity b(t) (or None) and the initial state.  Raises
    IntegrationError when the midpoint matrix I - dt/2 A cannot be
    factorized or is numerically singular.
    """
    if not isinstance(grid, TimeGrid):
        grid = TimeGrid(*grid)
    A, b, x0 = _resolve_operator(system)
    dim = A.shape[0]
    if x0.shape[0] != dim:
        raise DimensionMismatch("initial state does not match the operator")

    dt = grid.dt
    lhs = np.eye(dim) - 0.5 * dt * A
    rhs_mat = np.eye(dim) + 0.5 * dt * A
    try:
        with warnings.catch_warnings():
            # singularity is diagnosed from the pivots below
            warnings.simplefilter("ignore", scipy.linalg.LinAlgWarning)
            lu, piv = scipy.linalg.lu_factor(lhs)
    except scipy.linalg.LinAlgError as exc:
        raise IntegrationError(
            f"midpoint matrix factorization failed for dt={dt:g}: {exc}"
        ) from exc
    diag = np.abs(np.diag(lu))
    if diag.min() <= np.finfo(float).eps * max(1.0, diag.max()):
        raise IntegrationError(
            f"midpoint matrix is numerically singular for dt={dt:g} "
            f"(pivot ratio {diag.min() / max(diag.max(), 1.0):.2e})"
        )

    times = grid.times
    states = np.empty((dim, grid.nt))
    states[:, 0] = x0
    x = x0
    for i in range(grid.nt - 1):
        rhs = rhs_mat @ x
        if b is not None:
            rhs = rhs + dt * b(0.5 * (times[i] + times[i + 1]))
        x = scipy.linalg.lu_solve((lu, piv), rhs)
        states[:, i + 1] = x

    tag = mu if mu is not None else getattr(system, "mu", (np.nan, np.nan))
    return Trajectory(states=states, times=times, mu=tuple(tag))


def midpoint_propagator(A, dt):
    """One-step propagator (I - dt/2 A)^-1 (I + dt/2 A)."""
    dim = A.shape[0]
    return scipy.linalg.solve(
        np.eye(dim) - 0.5 * dt * A, np.eye(dim) + 0.5 * dt * A
    )


# ---------------------------------------------------------------------------
# Snapshot collection
# ---------------------------------------------------------------------------

@dataclass
class SnapshotMatrix:
    """Column stack of training states with provenance.

    data[:, j] is the state at time index col_time[j] of the trajectory
    for params[col_param[j]].
    """

    data: np.ndarray        # (dim, ns)
    params: np.ndarray      # (n_params, p_dim)
    col_param: np.ndarray   # (ns,) int
    col_time: np.ndarray    # (ns,) int
    times: np.ndarray       # (nt,)

    @property
    def dim(self):
        return self.data.shape[0]

    @property
    def ns(self):
        return self.data.shape[1]


def snapshot_collect(design, model_builder):
    """Integrate every training parameter and stack the states.

    model_builder maps a parameter pair to an assembled system; column
    count is len(training) * nt.  Integrator failures are re-raised
    with the offending parameter attached.
    """
    grid = TimeGrid(design.t0, design.t_end, design.nt)
    blocks, col_param, col_time = [], [], []
    for j, mu in enumerate(np.asarray(design.training_params)):
        system = model_builder(mu)
        try:
            traj = implicit_midpoint_linear(system, grid, mu=tuple(mu))
        except IntegrationError as exc:
            raise IntegrationError(
                f"training parameter {tuple(mu)}: {exc}"
            ) from exc
        blocks.append(traj.states)
        col_param.append(np.full(design.nt, j, dtype=np.uint32))
        col_time.append(np.arange(design.nt, dtype=np.uint32))
    return SnapshotMatrix(
        data=np.hstack(blocks),
        params=np.asarray(design.training_params, dtype=float),
        col_param=np.concatenate(col_param),
        col_time=np.concatenate(col_time),
        times=grid.times,
    )
