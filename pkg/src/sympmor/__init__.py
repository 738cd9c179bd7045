"""Structure-preserving model order reduction for linear Hamiltonian systems.

Snapshot data from a symplectic integrator feeds a family of reduced
basis generators, orthonormal and not, symplectic and not; reduced
models assembled with the matching projection preserve the Hamiltonian
structure, and the evaluation layer reproduces the standard error and
energy-preservation experiments on a cantilever lattice at desk scale.
"""

from .symplectic import (
    DimensionMismatch,
    SymplecticityError,
    KIND_ORTHONORMAL,
    KIND_ORTHOSYMPLECTIC,
    KIND_SYMPLECTIC,
    ReducedBasis,
    apply_poisson,
    apply_poisson_transpose,
    classify_basis,
    orthonormality_measure,
    symplectic_inverse,
    symplectic_projection,
    symplecticity_measure,
)
from .spectral import (
    DecompositionError,
    EmptyExtensionError,
    SvdLikeFactors,
    WeightedSpectrum,
    paired_singular_values,
    select_indices_by_weight,
    svd_like_decompose,
    symplectic_gram_schmidt,
    symplectic_singular_values,
    truncated_svd,
    weighted_spectrum,
)
from .models import (
    CantileverLattice,
    ExperimentDesign,
    LatticeConfigError,
    LinearHamiltonianSystem,
    ParameterError,
    TimeProfile,
    build_cantilever_lattice,
    extended_hamiltonian,
    extended_momentum,
    forcing_profile,
    hamiltonian_value,
    standard_design,
)
from .integrate import (
    IntegrationError,
    SnapshotMatrix,
    TimeGrid,
    Trajectory,
    implicit_midpoint_linear,
    midpoint_propagator,
    snapshot_collect,
)
from .basis import (
    BasisSizeError,
    METHODS,
    SpectralGapError,
    build_basis,
    pod_full,
    pod_loss,
    pod_of_ys,
    pod_separate,
    psd_complex_svd,
    psd_cotangent_lift,
    psd_greedy,
    psd_loss,
    psd_svd_like,
)
from .reduction import (
    CellResult,
    EvaluationReport,
    OfflineReduction,
    ReducedLinearSystem,
    ReductionModeError,
    hamiltonian_drift,
    reduce_system,
    reduced_hamiltonian_series,
    reference_energy,
    relative_error,
    run_generalization_experiment,
    solve_reduced,
)
from .storage import (
    StorageError,
    read_basis,
    read_snapshots,
    write_basis,
    write_snapshots,
    write_trajectory_csv,
)

__version__ = "0.1.0"
