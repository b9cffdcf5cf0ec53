"""
Error hierarchy.

Input problems derive from ``DataError`` and numerical problems from
``EstimationError``; the CLI and the HTTP layer map the two branches to
their own exit codes and status codes.
"""

from __future__ import annotations

from typing import TYPE_CHECKING, Any

if TYPE_CHECKING:
    from ramplab.estimators import FitResult


class RampLabError(Exception):
    """Base class for every error raised by ramplab."""


class DataError(RampLabError):
    """The data or the model specification is unusable."""


class EstimationError(RampLabError):
    """A numerical procedure failed on otherwise valid input."""


# -- data -------------------------------------------------------------------


class MissingColumn(DataError):
    pass


class UnknownColumn(DataError):
    pass


class NonBinaryOutcome(DataError):
    pass


class MalformedValue(DataError):
    pass


class EmptyAfterCompleteCase(DataError):
    pass


class RankDeficient(DataError):
    def __init__(self, message: str, column: str | None = None):
        super().__init__(message)
        self.column = column


class NotContinuous(DataError):
    pass


class NotBinary(DataError):
    pass


class VariableInInteraction(DataError):
    pass


class DimensionMismatch(DataError):
    pass


class NonPositiveA(DataError, ValueError):
    pass


class UnknownTable(DataError):
    pass


# -- estimation -------------------------------------------------------------


class EmptyTrimSet(EstimationError):
    pass


class RankDeficientTrimSet(EstimationError):
    pass


class PerfectSeparation(EstimationError):
    pass


class SingularA(EstimationError):
    pass


class DidNotConverge(EstimationError):
    """Both solver paths were exhausted; ``result`` holds the best point found."""

    def __init__(self, message: str, result: FitResult | None = None):
        super().__init__(message)
        self.result = result


class TooManyFailures(EstimationError):
    """Too many replications failed; ``report`` holds what was aggregated."""

    def __init__(self, message: str, report: Any = None):
        super().__init__(message)
        self.report = report


# -- warnings ---------------------------------------------------------------


class ConvergenceWarning(UserWarning):
    pass


class ProbabilityClampWarning(UserWarning):
    pass
