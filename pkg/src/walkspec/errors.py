"""Exception types shared across the package."""


class WalkspecError(Exception):
    """Base class for all errors raised by this package."""


class InvalidModel(WalkspecError):
    """Graph model violates a structural constraint."""


class InvalidVertex(WalkspecError):
    """Vertex address is not a valid word for the given model."""


class InvalidState(WalkspecError):
    """State is not part of a quotient chain's state space."""


class BallTooLarge(WalkspecError):
    """Requested ball exceeds the configured vertex cap."""


class NegativeBias(WalkspecError):
    """Bias parameter must be >= 0."""


class NonpositiveBias(WalkspecError):
    """Bias parameter must be > 0 for conductances and stationary weights."""


class UnsupportedModel(WalkspecError):
    """Operation is not defined for this model family."""


class HypothesisViolated(WalkspecError):
    """Inputs fall outside the hypotheses under which a formula is valid."""


class DomainError(WalkspecError):
    """Argument outside the stated domain of a closed formula."""


class OutsideRadius(WalkspecError):
    """Evaluation point lies outside a series' convergence radius."""


class NoRoot(WalkspecError):
    """Root finding target has no sign change on any admissible bracket."""


class NoConvergence(WalkspecError):
    """Iteration failed to converge within the configured budget."""


class MultipleRoots(WalkspecError):
    """Bracket pre-scan found more than one sign change."""


class InsufficientData(WalkspecError):
    """Not enough table entries to run an estimator."""


class Inconclusive(WalkspecError):
    """Statistical test did not reach the required significance."""
