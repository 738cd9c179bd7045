"""Parameterized linear Hamiltonian test systems.

The reference problem is a planar cantilever built as a structured
mass-spring lattice: a rigid truss of axial and diagonal springs on a
rectangular cell grid, clamped along its left edge and loaded at the
free right edge.  The axial spring constants scale with the sum of the
two Lame parameters, the diagonal ones with the second parameter
alone, which makes the stiffness matrix affine in the parameter
functions

    K(mu) = theta_1(mu) K_1 + theta_2(mu) K_2 .

The mass matrix is lumped (diagonal), so the quadratic Hamiltonian has
the canonical block form H = [[K, 0], [0, M^-1]] on the phase vector
x = (q, p) of displacement and linear-momentum DOFs, and the dynamics
read dx/dt = J (H x + h(t)) with h(t) = (-f(t), 0).

All assembled quantities are non-dimensional; the reference scales sit
at the top of the module.
"""

import numpy as np
from dataclasses import dataclass, field

from .symplectic import DimensionMismatch

__all__ = [
    "ParameterError",
    "LatticeConfigError",
    "TimeProfile",
    "forcing_profile",
    "CantileverLattice",
    "LinearHamiltonianSystem",
    "build_cantilever_lattice",
    "hamiltonian_value",
    "extended_momentum",
    "ExperimentDesign",
    "standard_design",
]

# --- Physical reference data -------------------------------------------------
# Material: cast iron .. high-chromium steel.
DENSITY = 7856.0                       # kg / m^3
LAME_LAMBDA_RANGE = (35.0e9, 125.0e9)  # N / m^2
LAME_MU_RANGE = (35.0e9, 83.0e9)       # N / m^2

# Non-dimensionalization references.
REF_LAME = 81.0e9                      # N / m^2 (both parameters)
REF_LENGTH = 1.0                       # m
REF_ACCEL = 9.81                       # m / s^2
REF_TIME = np.sqrt(REF_LENGTH / REF_ACCEL)        # s
REF_MASS = DENSITY * REF_LENGTH**3                # kg
REF_FORCE = REF_MASS * REF_ACCEL                  # N
REF_STIFFNESS = REF_FORCE / REF_LENGTH            # N / m

# Default time window (physical seconds) and step count.
T0_SECONDS = 0.0
T_END_SECONDS = 7.2e-2
NT_DEFAULT = 151

# Geometric prefactor turning a Lame-type modulus times thickness into
# a spring constant.
SPRING_PREFACTOR = 0.5
THICKNESS = REF_LENGTH


class ParameterError(ValueError):
    """A parameter vector lies outside the admissible box."""


class LatticeConfigError(ValueError):
    """The lattice description is degenerate or unknown."""


# ---------------------------------------------------------------------------
# Forcing
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class TimeProfile:
    """Scalar load profile g(t) multiplying the tip load pattern."""

    kind: str
    amplitude: float
    frequency: float = 0.0

    def __call__(self, t):
        if self.kind == "constant_tip":
            return self.amplitude * np.ones_like(np.asarray(t, dtype=float))
        return self.amplitude * np.sin(2.0 * np.pi * self.frequency * t)

    def derivative(self, t):
        if self.kind == "constant_tip":
            return np.zeros_like(np.asarray(t, dtype=float))
        w = 2.0 * np.pi * self.frequency
        return self.amplitude * w * np.cos(w * t)

    @property
    def constant(self):
        return self.kind == "constant_tip"


def forcing_profile(kind, amplitude, frequency=None):
    """Build the scalar load profile for the tip force.

    kind 'constant_tip' yields an autonomous system; 'sinusoidal_tip'
    yields g(t) = amplitude * sin(2 pi frequency t).  The frequency is
    in non-dimensional time.
    """
    if not np.isfinite(amplitude):
        raise LatticeConfigError("amplitude must be finite")
    if kind == "constant_tip":
        return TimeProfile(kind=kind, amplitude=float(amplitude))
    if kind == "sinusoidal_tip":
        if frequency is None or frequency <= 0.0:
            raise LatticeConfigError(
                "sinusoidal_tip requires a positive frequency"
            )
        return TimeProfile(
            kind=kind, amplitude=float(amplitude), frequency=float(frequency)
        )
    raise LatticeConfigError(f"unknown forcing kind {kind!r}")


# ---------------------------------------------------------------------------
# Lattice family
# ---------------------------------------------------------------------------

def _truss_assemble(node_xy, springs, ndof, dof_of_node):
    """Stiffness matrix of unit-stiffness truss springs.

    Each spring contributes k [[dd^T, -dd^T], [-dd^T, dd^T]] on the DOF
    blocks of its two endpoints, d being the unit direction; clamped
    nodes carry no DOFs and their rows/columns are simply not assembled.
    """
    K = np.zeros((ndof, ndof))
    for a, b in springs:
        d = node_xy[b] - node_xy[a]
        d = d / np.linalg.norm(d)
        block = np.outer(d, d)
        da, db = dof_of_node[a], dof_of_node[b]
        for (i, bi) in ((da, 1.0), (db, -1.0)):
            if i < 0:
                continue
            for (j, bj) in ((da, 1.0), (db, -1.0)):
                if j < 0:
                    continue
                K[i:i + 2, j:j + 2] += bi * bj * block
    return K


class CantileverLattice:
    """Parametric family of cantilever lattice systems.

    nx x ny square cells of side length/nx, nodes on the left edge
    clamped.  Every horizontal/vertical edge carries an axial spring,
    every cell both diagonals.  Exposes the affine decomposition
    K(mu) = theta_1 K1 + theta_2 K2 for the offline/online split.
    """

    def __init__(self, nx, ny, length=REF_LENGTH, density=DENSITY,
                 tip_amplitude=1.0, forcing_kind="constant_tip",
                 forcing_frequency=None, include_gravity=True,
                 tip_preload=0.0,
                 lambda_range=LAME_LAMBDA_RANGE, mu_range=LAME_MU_RANGE):
        if nx < 2 or ny < 1:
            raise LatticeConfigError(
                f"lattice needs nx >= 2 and ny >= 1, got nx={nx}, ny={ny}"
            )
        self.nx, self.ny = int(nx), int(ny)
        self.lambda_range = tuple(lambda_range)
        self.mu_range = tuple(mu_range)
        self.include_gravity = bool(include_gravity)
        # Static tip component of the preload that shapes x0; a point
        # load in the rest state excites a broad band of modes once the
        # dynamics start, which keeps the snapshot spectrum rich.
        self.tip_preload = float(tip_preload)

        d = (length / REF_LENGTH) / nx  # non-dimensional cell side
        cols, rows = nx + 1, ny + 1

        # Free-node bookkeeping: the ix = 0 column is clamped.
        def node(ix, iy):
            return ix * rows + iy

        node_xy = np.array(
            [[ix * d, iy * d] for ix in range(cols) for iy in range(rows)]
        )
        dof_of_node = np.full(cols * rows, -1, dtype=int)
        free = [node(ix, iy) for ix in range(1, cols) for iy in range(rows)]
        for k, nd in enumerate(free):
            dof_of_node[nd] = 2 * k
        self.n = 2 * len(free)

        axial, diagonal = [], []
        for ix in range(cols):
            for iy in range(rows):
                if ix + 1 < cols:
                    axial.append((node(ix, iy), node(ix + 1, iy)))
                if iy + 1 < rows:
                    axial.append((node(ix, iy), node(ix, iy + 1)))
                if ix + 1 < cols and iy + 1 < rows:
                    diagonal.append((node(ix, iy), node(ix + 1, iy + 1)))
                    diagonal.append((node(ix, iy + 1), node(ix + 1, iy)))
        K1s = _truss_assemble(node_xy, axial, self.n, dof_of_node)
        K2s = _truss_assemble(node_xy, diagonal, self.n, dof_of_node)

        # Reference spring constants, non-dimensionalized.
        lam_ref = REF_LAME + REF_LAME
        k_ax = SPRING_PREFACTOR * lam_ref * THICKNESS / REF_STIFFNESS
        k_dg = SPRING_PREFACTOR * REF_LAME * THICKNESS / REF_STIFFNESS
        self.K1 = k_ax * K1s
        self.K2 = k_dg * K2s

        # Lumped masses: a quarter cell per adjacent cell and node.
        cell_mass = density / DENSITY * d * d * (THICKNESS / REF_LENGTH)
        mass = np.zeros(self.n // 2)
        for ix in range(cols):
            for iy in range(rows):
                nd = dof_of_node[node(ix, iy)]
                if nd < 0:
                    continue
                cells = sum(
                    1
                    for cx in (ix - 1, ix)
                    for cy in (iy - 1, iy)
                    if 0 <= cx < nx and 0 <= cy < ny
                )
                mass[nd // 2] = cell_mass * cells / 4.0
        self.node_mass = mass
        self.minv = np.repeat(1.0 / mass, 2)

        # Load patterns (vertical DOFs, pointing down).
        weight = float(np.sum(mass))
        grav = np.zeros(self.n)
        grav[1::2] = -mass
        self.gravity_load = grav
        tip = np.zeros(self.n)
        tip_nodes = [node(nx, iy) for iy in range(rows)]
        for nd in tip_nodes:
            tip[dof_of_node[nd] + 1] = -weight / len(tip_nodes)
        self.tip_pattern = tip

        if forcing_frequency is None:
            forcing_frequency = REF_TIME / (T_END_SECONDS - T0_SECONDS)
        self.profile = forcing_profile(
            forcing_kind, tip_amplitude, frequency=forcing_frequency,
        )

    # -- parameter handling --------------------------------------------------

    def check_parameter(self, mu):
        lam, mul = float(mu[0]), float(mu[1])
        lo, hi = self.lambda_range
        if not (lo <= lam <= hi):
            raise ParameterError(f"lambda {lam:g} outside [{lo:g}, {hi:g}]")
        lo, hi = self.mu_range
        if not (lo <= mul <= hi):
            raise ParameterError(f"mu {mul:g} outside [{lo:g}, {hi:g}]")
        return lam, mul

    def theta(self, mu):
        """Affine parameter functions of the stiffness decomposition."""
        lam, mul = self.check_parameter(mu)
        return np.array([(lam + mul) / (2.0 * REF_LAME), mul / REF_LAME])

    def stiffness(self, mu):
        t1, t2 = self.theta(mu)
        return t1 * self.K1 + t2 * self.K2

    def assemble(self, mu):
        """Assemble the linear Hamiltonian system for one parameter."""
        K = self.stiffness(mu)
        preload = self.gravity_load + self.tip_preload * self.tip_pattern
        q0 = np.linalg.solve(K, preload)
        x0 = np.concatenate((q0, np.zeros_like(q0)))
        return LinearHamiltonianSystem(
            K=K, minv=self.minv.copy(), profile=self.profile,
            tip_pattern=self.tip_pattern,
            static_load=self.gravity_load if self.include_gravity else None,
            x0=x0, mu=(float(mu[0]), float(mu[1])), family=self,
        )


def build_cantilever_lattice(nx, ny, mu, **kwargs):
    """Assemble a cantilever lattice system for the parameter pair mu."""
    return CantileverLattice(nx, ny, **kwargs).assemble(mu)


# ---------------------------------------------------------------------------
# Assembled system
# ---------------------------------------------------------------------------

@dataclass
class LinearHamiltonianSystem:
    """dx/dt = J (H x + h(t)) with H = [[K, 0], [0, diag(minv)]].

    The forcing f(t) = static_load + profile(t) * tip_pattern enters as
    h(t) = (-f(t), 0).  x0 is the rest state sagged under the static
    load, which keeps the conserved energy away from zero so relative
    drift is well defined.
    """

    K: np.ndarray
    minv: np.ndarray
    profile: TimeProfile
    tip_pattern: np.ndarray
    static_load: np.ndarray | None
    x0: np.ndarray
    mu: tuple = (np.nan, np.nan)
    family: object = field(default=None, repr=False)

    def __post_init__(self):
        n = self.K.shape[0]
        if self.K.shape != (n, n):
            raise DimensionMismatch("stiffness matrix must be square")
        sym_defect = np.linalg.norm(self.K - self.K.T)
        if sym_defect > 1e-12 * max(1.0, np.linalg.norm(self.K)):
            raise ValueError("stiffness matrix is not symmetric")
        if self.minv.shape != (n,) or np.any(self.minv <= 0):
            raise ValueError("inverse mass must be a positive diagonal")
        if self.x0.shape != (2 * n,):
            raise DimensionMismatch("initial state has wrong length")

    @property
    def n(self):
        return self.K.shape[0]

    @property
    def dim(self):
        return 2 * self.K.shape[0]

    @property
    def autonomous(self):
        return self.profile.constant

    def forcing(self, t):
        f = self.profile(t) * self.tip_pattern
        if self.static_load is not None:
            f = f + self.static_load
        return f

    def forcing_rate(self, t):
        return self.profile.derivative(t) * self.tip_pattern

    def hamiltonian_matrix(self):
        n = self.n
        H = np.zeros((2 * n, 2 * n))
        H[:n, :n] = self.K
        H[n:, n:] = np.diag(self.minv)
        return H

    def system_matrices(self):
        """(A, b(t), x0) with A = J H; b(t) = (0, f(t)) feeds momenta."""
        n = self.n
        A = np.zeros((2 * n, 2 * n))
        A[:n, n:] = np.diag(self.minv)
        A[n:, :n] = -self.K
        if self.profile.constant and self.profile.amplitude == 0.0 \
                and self.static_load is None:
            b = None
        else:
            def b(t, n=n):
                out = np.zeros(2 * n)
                out[n:] = self.forcing(t)
                return out
        return A, b, self.x0

    def hamiltonian(self, x, t=0.0):
        n = self.n
        x = np.asarray(x)
        if x.shape[0] != 2 * n:
            raise DimensionMismatch("phase vector has wrong length")
        q, p = x[:n], x[n:]
        quad = 0.5 * (q @ (self.K @ q) + p @ (self.minv * p))
        return float(quad - q @ self.forcing(t))


def hamiltonian_value(system, x, t=0.0):
    """Quadratic Hamiltonian 1/2 x^T H x + x^T h(t) of a system state."""
    return system.hamiltonian(x, t)


def extended_momentum(system, trajectory):
    """Conjugate momentum of the time variable along a trajectory.

    Starting from p0 = -H(t0, x0) the momentum evolves with the
    midpoint quadrature of -dH/dt, so that H(t, x(t)) + p(t) plays the
    role of a conserved quantity for the time-extended system.  Returns
    the array of momenta on the trajectory grid.
    """
    times, states = trajectory.times, trajectory.states
    phat = np.empty(len(times))
    phat[0] = -system.hamiltonian(states[:, 0], times[0])
    n = system.n
    for i in range(len(times) - 1):
        tm = 0.5 * (times[i] + times[i + 1])
        xm = 0.5 * (states[:, i] + states[:, i + 1])
        # dH/dt = x^T dh/dt = -q^T f'(t)
        dhdt = -(xm[:n] @ system.forcing_rate(tm))
        phat[i + 1] = phat[i] - (times[i + 1] - times[i]) * dhdt
    return phat


def extended_hamiltonian(system, x, t, phat):
    """Time-extended energy H(t, x) + phat."""
    return system.hamiltonian(x, t) + phat


# ---------------------------------------------------------------------------
# Experiment design
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class ExperimentDesign:
    """Training grid, random test parameters, time grid and basis sweep."""

    training_params: np.ndarray   # (n_train, 2)
    test_params: np.ndarray       # (n_test, 2)
    t0: float
    t_end: float
    nt: int
    sweep: tuple
    seed: int

    def __post_init__(self):
        if self.nt < 2:
            raise ValueError("need at least two time steps")
        if any(two_k % 2 != 0 or two_k <= 0 for two_k in self.sweep):
            raise ValueError("sweep sizes must be positive and even")
        train = {tuple(row) for row in np.asarray(self.training_params)}
        test = {tuple(row) for row in np.asarray(self.test_params)}
        if train & test:
            raise ValueError("test parameters overlap the training grid")

    @property
    def times(self):
        return np.linspace(self.t0, self.t_end, self.nt)


DEFAULT_SEED = 190331


def standard_design(n_train_side=3, n_test=16, seed=DEFAULT_SEED,
                    t0_seconds=T0_SECONDS, t_end_seconds=T_END_SECONDS,
                    nt=NT_DEFAULT, sweep=tuple(range(10, 81, 10)),
                    lambda_range=LAME_LAMBDA_RANGE, mu_range=LAME_MU_RANGE):
    """Regular training grid plus seeded random test parameters.

    Times are converted from physical seconds to the non-dimensional
    unit used by the assembled systems.  Test parameters are drawn
    uniformly over the parameter box and redrawn in the (measure-zero)
    event of colliding with a training point.
    """
    lams = np.linspace(*lambda_range, n_train_side)
    muls = np.linspace(*mu_range, n_train_side)
    training = np.array([(a, b) for a in lams for b in muls])

    rng = np.random.default_rng(seed)
    train_set = {tuple(row) for row in training}
    test = []
    while len(test) < n_test:
        cand = (
            rng.uniform(*lambda_range),
            rng.uniform(*mu_range),
        )
        if cand not in train_set:
            test.append(cand)
    return ExperimentDesign(
        training_params=training,
        test_params=np.array(test),
        t0=t0_seconds / REF_TIME,
        t_end=t_end_seconds / REF_TIME,
        nt=int(nt),
        sweep=tuple(int(s) for s in sweep),
        seed=int(seed),
    )
