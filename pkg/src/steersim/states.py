"""The two-parameter family of shared states, validation, and comparison."""

from dataclasses import dataclass

import numpy as np

from .errors import InvalidParams, NumericalFailure
from .qmath import HERM_TOL, I2, partial_trace, tensor

# Experimental / reconstructed inputs may dip slightly below zero.
EIG_TOL = -1e-9


@dataclass(frozen=True)
class StateParams:
    """Mixing weight W in [0, 1] and half-angle theta in [0, pi/2] (radians)."""

    W: float
    theta: float

    def __post_init__(self):
        if not (0.0 <= self.W <= 1.0) or not np.isfinite(self.W):
            raise InvalidParams(f"W must lie in [0, 1], got {self.W}")
        if not (0.0 <= self.theta <= np.pi / 2 + 1e-12) or not np.isfinite(self.theta):
            raise InvalidParams(f"theta must lie in [0, pi/2], got {self.theta}")


def state_family(params):
    """Two-qubit state W |psi><psi| + (1-W)/2 I (x) rho_B.

    |psi> = cos(theta) |HH> + sin(theta) |VV> and rho_B is the reduced state
    of |psi> on the second qubit, diag(cos^2 theta, sin^2 theta).
    """
    W, th = params.W, params.theta
    psi = np.array([np.cos(th), 0.0, 0.0, np.sin(th)], dtype=complex)
    pure = np.outer(psi, psi.conj())
    rho_b = np.diag([np.cos(th) ** 2, np.sin(th) ** 2]).astype(complex)
    return W * pure + (1.0 - W) / 2.0 * tensor(I2, rho_b)


@dataclass(frozen=True)
class StateReport:
    """Diagnostics from validate_state; passed is True iff all within tolerance."""

    herm_residual: float
    trace_deviation: float
    min_eigenvalue: float
    passed: bool


def validate_state(rho):
    """Check Hermiticity, unit trace, and positivity of a 4x4 density matrix."""
    rho = np.asarray(rho, dtype=complex)
    herm = float(np.abs(rho - rho.conj().T).max())
    trace_dev = float(abs(np.trace(rho).real - 1.0))
    sym = (rho + rho.conj().T) / 2
    min_eig = float(np.linalg.eigvalsh(sym).min())
    passed = herm <= HERM_TOL and trace_dev <= HERM_TOL and min_eig >= EIG_TOL
    return StateReport(herm, trace_dev, min_eig, passed)


def marginal_blochs(rho):
    """(Alice, Bob) reduced Bloch vectors of a two-qubit state."""
    from .qmath import bloch_of

    return bloch_of(partial_trace(rho, "first")), bloch_of(partial_trace(rho, "second"))


def _psd_sqrt(m):
    vals, vecs = np.linalg.eigh(m)
    vals = np.clip(vals, 0.0, None)
    return (vecs * np.sqrt(vals)) @ vecs.conj().T


def fidelity(a, b):
    """Uhlmann fidelity (Tr sqrt(sqrt(a) b sqrt(a)))^2, clipped to [0, 1]."""
    a = np.asarray(a, dtype=complex)
    b = np.asarray(b, dtype=complex)
    try:
        ra = _psd_sqrt((a + a.conj().T) / 2)
        inner = _psd_sqrt(ra @ ((b + b.conj().T) / 2) @ ra)
    except np.linalg.LinAlgError as exc:
        raise NumericalFailure(f"matrix square root failed: {exc}") from exc
    f = float(np.trace(inner).real) ** 2
    return min(max(f, 0.0), 1.0)
