"""Exception and warning types raised across the package."""


class ShrinkRegError(Exception):
    """Base class for every error raised by shrinkreg."""


class DataError(ShrinkRegError):
    """Input data cannot be used as given (maps to CLI exit code 2)."""


class DimensionMismatch(DataError):
    pass


class RankDeficient(DataError):
    pass


class SingularRestriction(DataError):
    pass


class ZeroVariance(DataError):
    """A statistic or transform would divide by a zero variance.

    ``value`` carries the overflow value the statistic would take
    (``inf`` for a positive numerator over a zero residual variance).
    """

    def __init__(self, message, value=None):
        super().__init__(message)
        self.value = value


class TooFewRestrictions(ShrinkRegError):
    pass


class InvalidLevel(ShrinkRegError, ValueError):
    pass


class DivergentMoment(ShrinkRegError, ValueError):
    pass


class UnknownKind(ShrinkRegError, ValueError):
    pass


class MissingAlpha(ShrinkRegError, ValueError):
    pass


class FoldTooSmall(DataError):
    pass


class ReplicationFailure(ShrinkRegError):
    """Too many simulated designs had to be rejected and redrawn."""


class MissingColumn(DataError):
    pass


class NonNumericCell(DataError):
    def __init__(self, row, column, value):
        super().__init__(f"non-numeric value {value!r} at row {row}, column {column!r}")
        self.row = row
        self.column = column
        self.value = value


class EmptyFile(DataError):
    pass


class ChecksumMismatch(DataError):
    pass


class DegenerateStatistic(UserWarning):
    """The test statistic is zero, so the Stein factor is unbounded."""
