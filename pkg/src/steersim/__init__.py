"""Sequential sharing of EPR steering under projective measurement strategies.

The package simulates a chain Alice -- Bob_1 ... Bob_n -- Charlie in which
the Bobs apply classically randomized projective instruments to one half of
a two-qubit state, and quantifies every pairwise steerability by the
two-setting steering radius.  Radii are available through two independent
routes: exact closed-form minimax reduction and a numeric local-hidden-state
feasibility solver (bisection over second-order-cone feasibility problems).
"""

__version__ = "0.1.0"

from .errors import (
    InvalidBloch,
    InvalidDirection,
    InvalidMixtureWeights,
    InvalidParams,
    NoCrossing,
    NonHermitian,
    NumericalFailure,
    SolverStall,
    UnknownCase,
    UnknownCaseLink,
)
from .qmath import bloch_of, partial_trace, qubit_of, tensor
from .states import StateParams, fidelity, state_family, validate_state
from .measurements import (
    DeterministicStrategy,
    Effect,
    StrategyMixture,
    case_strategy,
    effect,
    luders_update,
)
from .steering import (
    Assemblage,
    LhsEnsemble,
    SteeringClass,
    SteeringRadiusResult,
    analytic_radius,
    assemblage_from_directions,
    assemblage_from_mixture,
    classify,
    lhs_feasible,
    mixture_radius,
    steering_radius,
)
from .scenario import ChainConfig, ChainReport, case3_chain_radii, four_party_radii, run_chain
from .search import (
    RegionResult,
    SweepSpec,
    four_party_region,
    sweep,
    threshold_scan,
    two_way_sharing_window,
)

__all__ = [
    "Assemblage",
    "ChainConfig",
    "ChainReport",
    "DeterministicStrategy",
    "Effect",
    "InvalidBloch",
    "InvalidDirection",
    "InvalidMixtureWeights",
    "InvalidParams",
    "LhsEnsemble",
    "NoCrossing",
    "NonHermitian",
    "NumericalFailure",
    "RegionResult",
    "SolverStall",
    "StateParams",
    "SteeringClass",
    "SteeringRadiusResult",
    "StrategyMixture",
    "SweepSpec",
    "UnknownCase",
    "UnknownCaseLink",
    "analytic_radius",
    "assemblage_from_directions",
    "assemblage_from_mixture",
    "bloch_of",
    "case3_chain_radii",
    "case_strategy",
    "classify",
    "effect",
    "fidelity",
    "four_party_radii",
    "four_party_region",
    "lhs_feasible",
    "luders_update",
    "mixture_radius",
    "partial_trace",
    "qubit_of",
    "run_chain",
    "state_family",
    "steering_radius",
    "sweep",
    "tensor",
    "threshold_scan",
    "two_way_sharing_window",
    "validate_state",
]
