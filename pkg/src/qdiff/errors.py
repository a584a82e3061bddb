"""Exception hierarchy.

Each family maps to a CLI exit code (see :data:`EXIT_CODES`).
"""


class QDiffError(Exception):
    """Base class for all errors raised by the package."""

    exit_code = 1


class ParseError(QDiffError):
    exit_code = 2


class ValidationError(QDiffError):
    exit_code = 3


class DimensionMismatch(ValidationError):
    pass


class NonSymmetricCovariance(ValidationError):
    pass


class UnphysicalCovariance(ValidationError):
    pass


class NotInvertible(ValidationError):
    pass


class SingularCovariance(ValidationError):
    pass


class NegativeTime(ValidationError):
    pass


class NonpositiveTime(ValidationError):
    pass


class IndexOutOfRange(ValidationError):
    pass


class BadWeights(ValidationError):
    pass


class EmptyCorpus(ValidationError):
    pass


class TailMassTooLarge(ValidationError):
    pass


class SupportViolation(ValidationError):
    pass


class GridTooSmall(ValidationError):
    pass


class VerificationFailure(QDiffError):
    exit_code = 4


class NumericalError(QDiffError):
    exit_code = 5


class NumericalFailure(NumericalError):
    pass


class QuadratureUnconverged(NumericalError):
    pass


class StepTooSmall(NumericalError):
    pass


EXIT_CODES = {
    "parse": ParseError.exit_code,
    "validation": ValidationError.exit_code,
    "verification": VerificationFailure.exit_code,
    "numerical": NumericalError.exit_code,
}
