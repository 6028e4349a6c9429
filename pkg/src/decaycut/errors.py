"""Exception types raised by the numerical engine."""


class DecayCutError(Exception):
    """Base class for all package errors."""


class NoConvergence(DecayCutError):
    """An iterative method or adaptive quadrature missed its tolerance."""


class NonFinite(DecayCutError):
    """A quantity is infinite or undefined at the requested point."""


class NoSignChange(DecayCutError):
    """A bracketing root finder was given an interval without a sign change."""


class DegenerateInput(DecayCutError):
    """Input data cannot support the requested fit or construction."""


class OnCut(DecayCutError):
    """A complex energy lies on a branch cut of the continued self-energy."""


class UnsupportedModel(DecayCutError):
    """The band model does not provide the requested analytic structure."""


class DecoupledLevel(DecayCutError):
    """The level has zero coupling density at its own energy."""


class DegenerateNodes(DecayCutError):
    """Two discretization nodes coincide, so the secular brackets collapse."""


class ValidationFailure(DecayCutError):
    """A cross-validation check exceeded its tolerance."""
