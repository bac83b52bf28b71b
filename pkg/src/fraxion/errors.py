"""Exception and warning types shared across the package."""


class FraxionError(Exception):
    """Base class for all package errors."""


class DomainError(FraxionError, ValueError):
    """Argument outside the documented domain of an operation."""


class PoleError(DomainError):
    """Evaluation requested at a pole (e.g. gamma at a nonpositive integer)."""


class ConvergenceError(FraxionError, ArithmeticError):
    """A series or iterative scheme failed to reach the requested tolerance."""


class NonConvergence(FraxionError, ArithmeticError):
    """Quadrature exhausted its refinement budget.

    Carries the partial value and the last error estimate so callers can
    decide whether the partial result is still usable.
    """

    def __init__(self, message, value=None, error_estimate=None):
        super().__init__(message)
        self.value = value
        self.error_estimate = error_estimate


class ShapeError(FraxionError, ValueError):
    """Grid/shape mismatch between fields, or an unsupported grid layout."""


class TailError(FraxionError, ValueError):
    """Field does not decay enough at the box boundary for the operation."""


class LadderError(FraxionError, ValueError):
    """A radius or y-ladder is too short or does not fit the grid."""


class ExtrapolationError(FraxionError, ArithmeticError):
    """A Richardson ladder failed to Cauchy-converge."""


class StencilError(FraxionError, ValueError):
    """A finite-difference probe sits too close to a domain boundary."""


class ConfigError(FraxionError, ValueError):
    """Invalid run configuration (unknown key, unresolvable name, bad value)."""


class AliasWarning(UserWarning):
    """A field or kernel is not negligible at the box boundary."""


class ConditioningWarning(UserWarning):
    """A fractional order sits close to an integer; constants degrade."""
