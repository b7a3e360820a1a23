"""Exception types raised across the package."""


class DiracError(Exception):
    """Base class for all package errors."""


class DimensionMismatch(DiracError, ValueError):
    pass


class NonLagrangianResult(DiracError):
    """A computed image failed the isotropy or dimension certificate."""


class NonLagrangianInput(DiracError, ValueError):
    pass


class NotStrong(DiracError):
    pass


class NotOrthogonal(DiracError, ValueError):
    pass


class SingularForm(DiracError, ValueError):
    pass


class SingularOperator(DiracError, ValueError):
    pass


class OddKernel(DiracError):
    """dim ker(J1 + J2) came out odd, which cannot happen for real skew data."""


class WindowTooLarge(DiracError, ValueError):
    pass


class NotInGroup(DiracError, ValueError):
    pass


class InconsistentMomentCondition(DiracError):
    pass


class NotRegular(DiracError):
    pass


class NotFree(DiracError):
    pass


class ConsistencyError(DiracError):
    """Two independent computations of the same object disagree."""
