"""Fixed-shape complex linear algebra for one- and two-qubit operators.

Basis convention: two-qubit indices are ordered |HH>, |HV>, |VH>, |VV> and
the sigma_z eigenbasis is {|H>, |V>} with sigma_z |H> = +|H>.
"""

import numpy as np

from .errors import InvalidBloch, NonHermitian

# Absolute tolerance used by every Hermiticity / trace / positivity check.
HERM_TOL = 1e-10

I2 = np.eye(2, dtype=complex)
SIGMA_X = np.array([[0, 1], [1, 0]], dtype=complex)
SIGMA_Y = np.array([[0, -1j], [1j, 0]], dtype=complex)
SIGMA_Z = np.array([[1, 0], [0, -1]], dtype=complex)
PAULIS = (SIGMA_X, SIGMA_Y, SIGMA_Z)

XHAT = np.array([1.0, 0.0, 0.0])
ZHAT = np.array([0.0, 0.0, 1.0])


def _as_square(m, dim):
    m = np.asarray(m, dtype=complex)
    if m.shape != (dim, dim):
        raise ValueError(f"expected a {dim}x{dim} matrix, got shape {m.shape}")
    if not np.all(np.isfinite(m.view(float))):
        raise ValueError("matrix contains non-finite entries")
    return m


def dag(m):
    """Conjugate transpose."""
    return np.asarray(m).conj().T


def is_hermitian(m, tol=HERM_TOL):
    m = np.asarray(m)
    return np.abs(m - m.conj().T).max() <= tol


def tensor(a, b):
    """Kronecker product of two 2x2 matrices, row-major block layout.

    The top-left 2x2 block of the result is a[0, 0] * b.
    """
    return np.kron(_as_square(a, 2), _as_square(b, 2))


def partial_trace(rho, keep):
    """Trace out one qubit of a two-qubit operator.

    Parameters
    ----------
    rho : (4, 4) array_like
    keep : {"first", "second"}
        Which subsystem the returned 2x2 operator describes.

    Returns
    -------
    (2, 2) ndarray with the same trace as ``rho``.
    """
    rho = _as_square(rho, 4)
    r = rho.reshape(2, 2, 2, 2)
    if keep == "first":
        return np.trace(r, axis1=1, axis2=3)
    if keep == "second":
        return np.trace(r, axis1=0, axis2=2)
    raise ValueError(f"keep must be 'first' or 'second', got {keep!r}")


def bloch_of(rho):
    """Bloch vector (Tr[rho sigma_k] for k = x, y, z) of a qubit state.

    Raises NonHermitian if ``rho`` is not Hermitian within HERM_TOL.
    """
    rho = _as_square(rho, 2)
    if not is_hermitian(rho):
        raise NonHermitian("state is not Hermitian within tolerance")
    if abs(np.trace(rho).real - 1.0) > HERM_TOL:
        raise NonHermitian(f"trace deviates from 1 by {abs(np.trace(rho).real - 1.0):.3e}")
    return np.array([np.trace(rho @ p).real for p in PAULIS])


def qubit_of(v):
    """Qubit density matrix (I + v . sigma) / 2 for a Bloch vector v.

    Raises InvalidBloch if |v| > 1 + 1e-9.
    """
    v = np.asarray(v, dtype=float)
    if v.shape != (3,):
        raise InvalidBloch(f"Bloch vector must have 3 components, got shape {v.shape}")
    n = np.linalg.norm(v)
    if n > 1.0 + 1e-9:
        raise InvalidBloch(f"Bloch vector length {n:.12f} exceeds 1")
    rho = I2.copy()
    for comp, pauli in zip(v, PAULIS):
        rho += comp * pauli
    return rho / 2


def unit_direction(v):
    """Validate and normalize a measurement direction (must be unit length)."""
    from .errors import InvalidDirection

    v = np.asarray(v, dtype=float)
    if v.shape != (3,) or not np.all(np.isfinite(v)):
        raise InvalidDirection(f"direction must be a finite 3-vector, got {v!r}")
    n = np.linalg.norm(v)
    if abs(n - 1.0) > 1e-12:
        raise InvalidDirection(f"direction length {n:.15f} is not 1 within 1e-12")
    return v / n
