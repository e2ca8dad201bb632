"""Exception types shared across the package."""


class PeanoLabError(Exception):
    """Base class for every error raised by peano_lab."""


class UnsupportedDimension(PeanoLabError, ValueError):
    pass


class DepthOverflow(PeanoLabError, ValueError):
    pass


class InvalidCell(PeanoLabError, ValueError):
    pass


class NegativeParameter(PeanoLabError, ValueError):
    pass


class TargetOutOfRange(PeanoLabError, ValueError):
    pass


class ResolutionTooCoarse(PeanoLabError, ValueError):
    pass


class BudgetExhausted(PeanoLabError, RuntimeError):
    pass


class InvalidAlpha(PeanoLabError, ValueError):
    pass


class TruncationUnreliable(PeanoLabError, ArithmeticError):
    pass


class ConstantPolynomial(PeanoLabError, ValueError):
    pass


class PrecisionExhausted(PeanoLabError, ArithmeticError):
    pass


class DegenerateSamplePlan(PeanoLabError, ValueError):
    pass


class SaturationError(PeanoLabError, OverflowError):
    """An exponential left the floating range; never silently clipped."""

    def __init__(self, message, index=None):
        super().__init__(message)
        self.index = index


class IndexMismatch(PeanoLabError, ValueError):
    pass


class DomainWarning(UserWarning):
    """A sample was dropped because log log M(f, r) is undefined there."""
