"""Exception types shared across the package."""


class NonHermitian(ValueError):
    """Matrix fails the Hermiticity tolerance where a Hermitian one is required."""


class InvalidBloch(ValueError):
    """Bloch vector longer than 1 (beyond tolerance) where a state is required."""


class InvalidParams(ValueError):
    """State-family parameters outside W in [0,1], theta in [0, pi/2]."""


class InvalidDirection(ValueError):
    """Measurement direction is not a unit vector."""


class UnknownCase(ValueError):
    """Strategy case identifier outside {1, 2, 3}."""


class UnknownCaseLink(ValueError):
    """Unsupported (case, link) combination for a closed-form radius."""


class InvalidMixtureWeights(ValueError):
    """Strategy-mixture weights are negative or do not sum to one."""


class NumericalFailure(RuntimeError):
    """A numeric routine (eigensolver, matrix square root) failed to converge."""


class SolverStall(RuntimeError):
    """The feasibility solver hit its iteration cap without certifying either way."""


class NoCrossing(ValueError):
    """A threshold scan found no sign change of R - 1 on the given range."""
