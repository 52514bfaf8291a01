"""Exception hierarchy shared by every module of the package."""


class RangeProjError(Exception):
    """Base class for all errors raised by rangeproj."""


class NonSquare(RangeProjError, ValueError):
    pass


class NonHermitianInput(RangeProjError, ValueError):
    pass


class DimensionMismatch(RangeProjError, ValueError):
    pass


class ConvergenceFailure(RangeProjError, ArithmeticError):
    pass


class DomainViolation(RangeProjError, ValueError):
    """An eigenvalue falls outside the domain of the spectral function."""


class NotPSD(DomainViolation):
    """Input to a checker is not positive semidefinite within slack.

    ``min_eigenvalue`` carries the offending smallest eigenvalue.
    """

    def __init__(self, message, min_eigenvalue=None):
        super().__init__(message)
        self.min_eigenvalue = min_eigenvalue


class ZeroOperator(RangeProjError, ValueError):
    pass


class IndexOutOfRange(RangeProjError, IndexError):
    pass


class PowerOutOfRange(RangeProjError, ValueError):
    pass


class EmptyComplement(RangeProjError, ValueError):
    pass


class NotAProjection(RangeProjError, ValueError):
    pass


class QuadratureNonConvergence(RangeProjError, ArithmeticError):
    pass


class GenerationFailure(RangeProjError, RuntimeError):
    pass


class InvalidK(RangeProjError, ValueError):
    pass


class RankTooLarge(RangeProjError, ValueError):
    pass


class ParseError(RangeProjError, ValueError):
    pass
