"""
Exception hierarchy shared by the algebra modules and the CLI.

Every error carries the process exit code the CLI reports for it.
"""

from typing import Any, Dict, Optional


class SubtensorRankError(Exception):
    """Base class for every error raised by the toolkit."""

    exit_code = 1

    def __init__(self, message: str, details: Optional[Dict[str, Any]] = None):
        super().__init__(message)
        self.message = message
        self.details = details or {}


class ParseError(SubtensorRankError):
    exit_code = 2


class IndexOutOfRange(SubtensorRankError):
    exit_code = 2


class BudgetExceeded(SubtensorRankError):
    """A search hit its node or enumeration cap; the answer is unknown."""

    exit_code = 3


class SizeCapExceeded(SubtensorRankError):
    exit_code = 3


class HypothesisViolated(SubtensorRankError):
    exit_code = 4


class SingularMatrix(SubtensorRankError):
    pass


class SingularBlock(SingularMatrix):
    pass


class NotWeightHomogeneous(SubtensorRankError):
    pass


class WeightTooLow(SubtensorRankError):
    pass


class ChainEvaluationZero(SubtensorRankError):
    pass


class BadCharacteristic(SubtensorRankError):
    pass


class ZeroTensor(SubtensorRankError):
    pass


class DimensionSumTooLarge(SubtensorRankError):
    pass


class NonSliceTerm(SubtensorRankError):
    pass


class NoWitnessFound(SubtensorRankError):
    """Informative outcome of complement scans, not a failure."""

    exit_code = 0
