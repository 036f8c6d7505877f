"""Exception hierarchy.  CLI exit codes hang off these classes."""


class FredresError(Exception):
    exit_code = 3


class ParseError(FredresError, ValueError):
    exit_code = 2


class NumericError(FredresError):
    """Generic numerical failure (singular matrix where none is allowed, ...)."""

    exit_code = 3


class SeriesMismatchError(FredresError, ValueError):
    """Two series with different centers or dimensions were combined."""

    exit_code = 3


class SingularLeadingCoefficientError(NumericError):
    """The constant coefficient is not invertible, so ``A(z)`` has a pole at the center."""


class SingularSampleError(NumericError):
    """``A(z)`` is (numerically) singular at a contour sample point."""


class PoleOrderExceededError(NumericError):
    pass


class BudgetError(FredresError):
    """Not enough Taylor coefficients to deliver the requested orders."""

    exit_code = 4


class UnitRootConfigError(FredresError):
    """The AR characteristic polynomial has roots where none are allowed."""

    exit_code = 6

    def __init__(self, message, diagnosis=None):
        super().__init__(message)
        self.diagnosis = diagnosis
