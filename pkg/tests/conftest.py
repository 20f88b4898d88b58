import numpy as np
import pytest

from steersim.qmath import XHAT, ZHAT

XZ = (XHAT, ZHAT)


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


def random_density_matrix(rng, dim=4, rank=None):
    """Random mixed state: convex mixture of Haar-ish random pure states."""
    rank = rank or dim
    rho = np.zeros((dim, dim), dtype=complex)
    weights = rng.dirichlet(np.ones(rank))
    for w in weights:
        psi = rng.normal(size=dim) + 1j * rng.normal(size=dim)
        psi /= np.linalg.norm(psi)
        rho += w * np.outer(psi, psi.conj())
    return (rho + rho.conj().T) / 2


def random_unit_vector(rng):
    v = rng.normal(size=3)
    return v / np.linalg.norm(v)
