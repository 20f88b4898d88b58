"""Projective effects, deterministic strategies, mixtures, and the sequential update channel.

Strategy convention: a deterministic strategy fixes, for each of the two
measurement settings, either a basis projection along a unit direction or
the identity instrument.  An identity setting leaves the qubit untouched
and announces a uniformly random outcome; both outcome branches carry
Kraus operator I with probability 1/2.  Basis settings use the projectors
themselves as Kraus operators (Lueders update).  The sequential channel
averages uniformly over the two settings.
"""

from dataclasses import dataclass, field

import numpy as np

from .errors import InvalidMixtureWeights, UnknownCase
from .qmath import I2, PAULIS, XHAT, ZHAT, unit_direction

PROB_TOL = 1e-12


@dataclass(frozen=True)
class Effect:
    """One outcome of a projective setting: (I + (-1)^outcome n . sigma)/2, or I."""

    direction: np.ndarray | None  # None marks the identity instrument
    outcome: int
    matrix: np.ndarray = field(repr=False, default=None)

    @property
    def is_identity(self):
        return self.direction is None


def effect(direction, outcome):
    """Build a projective effect; pass direction=None for the identity."""
    outcome = int(outcome)
    if outcome not in (0, 1):
        raise ValueError(f"outcome must be 0 or 1, got {outcome}")
    if direction is None:
        return Effect(None, outcome, I2.copy())
    n = unit_direction(direction)
    m = I2.copy()
    for comp, pauli in zip(n, PAULIS):
        m += ((-1) ** outcome) * comp * pauli
    return Effect(n, outcome, m / 2)


@dataclass(frozen=True)
class DeterministicStrategy:
    """Two measurement settings, each a basis direction or None (identity)."""

    settings: tuple
    label: int | None = None

    def __post_init__(self):
        if len(self.settings) != 2:
            raise ValueError("a strategy has exactly two settings")
        norm = tuple(None if s is None else unit_direction(s) for s in self.settings)
        object.__setattr__(self, "settings", norm)


def case_strategy(case_id):
    """The three shipped strategies: 1 = (x, z), 2 = (I, I), 3 = (I, z)."""
    if case_id == 1:
        return DeterministicStrategy((XHAT, ZHAT), label=1)
    if case_id == 2:
        return DeterministicStrategy((None, None), label=2)
    if case_id == 3:
        return DeterministicStrategy((None, ZHAT), label=3)
    raise UnknownCase(f"case must be 1, 2, or 3, got {case_id!r}")


@dataclass(frozen=True)
class StrategyMixture:
    """Probability distribution over deterministic strategies."""

    branches: tuple  # of (prob, DeterministicStrategy)

    def __post_init__(self):
        br = tuple((float(p), s) for p, s in self.branches)
        if not br:
            raise InvalidMixtureWeights("mixture needs at least one branch")
        probs = np.array([p for p, _ in br])
        if (probs < -PROB_TOL).any():
            raise InvalidMixtureWeights(f"negative branch probability in {probs}")
        if abs(probs.sum() - 1.0) > 1e-12:
            raise InvalidMixtureWeights(f"branch probabilities sum to {probs.sum():.15f}, not 1")
        object.__setattr__(self, "branches", br)

    @classmethod
    def deterministic(cls, case_id):
        return cls(((1.0, case_strategy(case_id)),))

    @classmethod
    def from_case_weights(cls, p, q):
        """Weights (p, q, 1-p-q) on cases (1, 2, 3)."""
        r = 1.0 - p - q
        if p < -PROB_TOL or q < -PROB_TOL or r < -PROB_TOL:
            raise InvalidMixtureWeights(f"weights (p={p}, q={q}, 1-p-q={r}) out of range")
        branches = []
        for w, case in ((p, 1), (q, 2), (r, 3)):
            if w > PROB_TOL:
                branches.append((w, case_strategy(case)))
        if not branches:  # all three weights ~0 is impossible, but keep a sane fallback
            branches = [(1.0, case_strategy(3))]
        total = sum(w for w, _ in branches)
        return cls(tuple((w / total, s) for w, s in branches))

    def case_weights(self):
        """(p, q) weights of cases (1, 2) if every branch is a labeled case."""
        p = q = 0.0
        for w, s in self.branches:
            if s.label == 1:
                p += w
            elif s.label == 2:
                q += w
            elif s.label != 3:
                return None
        return p, q


def _setting_channel(rho, setting):
    """Sum over outcomes of (I (x) K) rho (I (x) K^dagger) for one setting."""
    if setting is None:
        return rho
    out = np.zeros_like(rho)
    for a in (0, 1):
        k = np.kron(I2, effect(setting, a).matrix)
        out += k @ rho @ k.conj().T
    return out


def luders_update(rho, mixture):
    """Post-measurement shared state after one party applies a strategy mixture.

    Averages uniformly over the two settings within each branch, sums the
    Lueders updates over outcomes, and mixes branches with their weights.
    The result is re-symmetrized to damp rounding over long chains.
    """
    rho = np.asarray(rho, dtype=complex)
    out = np.zeros_like(rho)
    for w, strat in mixture.branches:
        branch = np.zeros_like(rho)
        for setting in strat.settings:
            branch += _setting_channel(rho, setting)
        out += (w / len(strat.settings)) * branch
    return (out + out.conj().T) / 2
