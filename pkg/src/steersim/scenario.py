"""End-to-end sequential chains and the multi-party closed forms."""

from dataclasses import dataclass, field

import numpy as np

from .errors import InvalidMixtureWeights, SolverStall
from .measurements import StrategyMixture, luders_update
from .qmath import XHAT, ZHAT
from .states import StateParams, state_family
from .steering import (
    DEFAULT_OPTIONS,
    SteeringClass,
    _after_mixture,
    _backward_radius,
    _family_bloch,
    _forward_radius,
    assemblage_from_directions,
    assemblage_from_mixture,
    classify,
    steering_radius,
)

XZ = (XHAT, ZHAT)


@dataclass(frozen=True)
class ChainConfig:
    """Alice, an ordered list of Bobs (strategy mixtures), then Charlie."""

    initial: StateParams
    bobs: tuple  # of StrategyMixture
    alice_directions: tuple = XZ
    charlie_directions: tuple = XZ
    disclosure: bool = False


@dataclass(frozen=True)
class LinkRecord:
    """Radii around one party; state is the shared state it measures."""

    party: str
    r_forward: float
    r_backward: float
    steering_class: SteeringClass
    state: np.ndarray = field(repr=False)


@dataclass(frozen=True)
class ChainReport:
    links: tuple  # one LinkRecord per Bob, then one for Charlie

    def radii(self):
        out = []
        for rec in self.links:
            out.extend((rec.r_forward, rec.r_backward))
        return tuple(out)


def run_chain(config, options=DEFAULT_OPTIONS):
    """Numerically evaluate every pairwise radius along the chain.

    Forward radii use Alice's directions on the state each Bob receives.
    Backward radii use the Bob's own mixture; with disclosure enabled the
    backward radius is the branch-weighted combination of per-strategy
    radii instead of the radius of the aggregated assemblage.
    """
    rho = state_family(config.initial)
    records = []

    def _radius(asm, label):
        try:
            return steering_radius(asm, options).radius
        except SolverStall as exc:
            raise SolverStall(f"{label}: {exc}") from exc

    for i, mixture in enumerate(config.bobs, start=1):
        fwd = _radius(assemblage_from_directions(rho, "A", config.alice_directions),
                      f"A->B{i}")
        if config.disclosure:
            bwd = 0.0
            for w, strat in mixture.branches:
                branch = StrategyMixture(((1.0, strat),))
                bwd += w * _radius(assemblage_from_mixture(rho, branch), f"B{i}->A")
        else:
            bwd = _radius(assemblage_from_mixture(rho, mixture), f"B{i}->A")
        records.append(LinkRecord(f"B{i}", fwd, bwd, classify(fwd, bwd), rho))
        rho = luders_update(rho, mixture)
    fwd = _radius(assemblage_from_directions(rho, "A", config.alice_directions), "A->C")
    bwd = _radius(assemblage_from_directions(rho, "B", config.charlie_directions), "C->A")
    records.append(LinkRecord("C", fwd, bwd, classify(fwd, bwd), rho))
    return ChainReport(tuple(records))


def _check_pair_weights(p, q, name):
    if p < -1e-12 or q < -1e-12 or p + q > 1.0 + 1e-12:
        raise InvalidMixtureWeights(f"{name}: need p, q >= 0 and p + q <= 1 (got p={p}, q={q})")


def four_party_radii(p1, q1, p2, q2, disclosure):
    """Closed-form radii (R_AB1, R_B1A, R_AB2, R_B2A, R_AC, R_CA).

    Specialization to a maximally entangled initial state with both Bobs
    mixing cases (1, 2, 3) with weights (p_i, q_i, 1 - p_i - q_i).  With
    disclosure, each backward radius is the branch-weighted combination of
    the per-strategy radii.
    """
    _check_pair_weights(p1, q1, "Bob1 weights")
    _check_pair_weights(p2, q2, "Bob2 weights")
    s2 = np.sqrt(2.0)
    r_ab1 = s2
    r_ab2 = 0.5 * np.hypot(2.0 - p1, 1.0 + q1)
    r_ac = 0.25 * np.hypot((2.0 - p1) * (2.0 - p2), (1.0 + q1) * (1.0 + q2))
    if disclosure:
        r_b1a = p1 * s2 + (1.0 - p1 - q1)
        r_b2a = p2 * r_ab2 + (1.0 - p2 - q2) * (1.0 - p1 / 2.0)
    else:
        r_b1a = np.hypot(p1, 1.0 - q1)
        r_b2a = 0.5 * np.hypot((2.0 - p1) * (1.0 - q2), p2 * (1.0 + q1))
    return (float(r_ab1), float(r_b1a), float(r_ab2), float(r_b2a),
            float(r_ac), float(r_ac))


def case3_chain_radii(params, i):
    """(R_AB_i, R_B_iA) for a chain in which every Bob uses strategy case 3.

    Closed form via the x-correlation halving per link; at W = 1 the
    forward radius reduces to sqrt(1 + sin^2(2 theta) / 4**(i - 1)) while
    the backward radius stays at W.
    """
    if i < 1:
        raise ValueError(f"link index must be >= 1, got {i}")
    bl = _family_bloch(params)
    for _ in range(i - 1):
        bl = _after_mixture(bl, 0.0, 0.0)
    return _forward_radius(bl), _backward_radius(bl, 0.0, 0.0)
