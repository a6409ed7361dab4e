"""Exception hierarchy shared by every module of the package."""


class BundleCurvError(Exception):
    """Base class for all package errors."""


class NonFiniteValue(BundleCurvError, ArithmeticError):
    pass


class CrossCheckMismatch(BundleCurvError):
    """Two independent evaluation routes disagree.

    Both values are attached so the caller can inspect the discrepancy.
    """

    def __init__(self, message, first=None, second=None):
        super().__init__(message)
        self.first = first
        self.second = second


class ShapeMismatch(BundleCurvError, ValueError):
    pass


class NotHermitian(BundleCurvError, ValueError):
    pass


class MetricNotPositive(BundleCurvError, ValueError):
    pass


class SingularMetric(BundleCurvError, ArithmeticError):
    pass


class ExprSyntaxError(BundleCurvError, ValueError):
    """Unparseable expression text.

    Attributes
    ----------
    position : int
        Zero-based offset of the offending character.
    expected : tuple of str
        Tokens that would have been accepted at ``position``.
    """

    def __init__(self, message, position, expected=()):
        super().__init__(f"{message} at position {position}"
                         + (f" (expected one of {', '.join(sorted(expected))})" if expected else ""))
        self.position = position
        self.expected = tuple(sorted(expected))


class UnknownVariable(BundleCurvError, ValueError):
    pass


class DomainError(BundleCurvError, ArithmeticError):
    pass


class CriticalPoint(BundleCurvError, ArithmeticError):
    pass


class BadGenus(BundleCurvError, ValueError):
    pass


class NotGriffithsNegative(BundleCurvError, ValueError):
    pass


class BadTruncation(BundleCurvError, ValueError):
    pass


class ProjectionResidualTooLarge(BundleCurvError):
    pass


class QuadratureNotConverged(BundleCurvError):
    pass


class SpectrumValidationFailed(BundleCurvError):
    pass


class EmptySubspace(BundleCurvError, ValueError):
    pass


class ConfigError(BundleCurvError, ValueError):
    """Invalid run configuration; ``path`` names the offending field."""

    def __init__(self, message, path=""):
        super().__init__(f"{path}: {message}" if path else message)
        self.path = path
