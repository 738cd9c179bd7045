import numpy as np
import pytest


def dense_poisson(n):
    """Dense J for oracle computations in tests."""
    J = np.zeros((2 * n, 2 * n))
    J[:n, n:] = np.eye(n)
    J[n:, :n] = -np.eye(n)
    return J


def random_orthosymplectic(n, k, rng):
    """Independent construction of V = [E, J^T E] via complex QR.

    The unitary factor U = Phi + i Psi of a complex Gaussian gives
    E = [Phi; Psi] with E^T E = I and E^T J E = 0.
    """
    Z = rng.standard_normal((n, k)) + 1j * rng.standard_normal((n, k))
    U, _ = np.linalg.qr(Z)
    E = np.vstack((np.real(U), np.imag(U)))
    JtE = np.concatenate((-E[n:], E[:n]))
    return np.hstack((E, JtE))


@pytest.fixture
def rng():
    return np.random.default_rng(20240817)


@pytest.fixture(scope="session")
def small_lattice():
    from sympmor import CantileverLattice
    return CantileverLattice(4, 2, forcing_kind="constant_tip")
