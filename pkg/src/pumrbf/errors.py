"""Exception types raised by the interpolation pipeline."""


class PumError(Exception):
    """Base class for all errors raised by this package."""


class InputDomainError(PumError, ValueError):
    """An argument lies outside the domain an operation accepts."""


class DuplicatePointsError(InputDomainError):
    pass


class InsufficientDataError(PumError, ValueError):
    pass


class ConditioningError(PumError, ArithmeticError):
    """A local Gram matrix could not be factored even with diagonal jitter."""

    def __init__(self, message, jitters=(), patch=None):
        super().__init__(message)
        self.jitters = tuple(jitters)
        self.patch = patch


class CoveringError(PumError):
    """A data point does not lie in any patch of the covering."""

    def __init__(self, message, point_index=None):
        super().__init__(message)
        self.point_index = point_index


class UncoveredPointError(PumError):
    """An evaluation point has no active patch with positive weight."""

    def __init__(self, message, points=None):
        super().__init__(message)
        self.points = points
