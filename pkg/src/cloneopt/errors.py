"""Exception types shared across the package."""


class CloningError(Exception):
    """Base class for all errors raised by cloneopt."""


class DomainError(CloningError, ValueError):
    """An argument lies outside the region where the operation is defined."""


class InfeasiblePointError(DomainError):
    """An operating point violates the unitarity constraint."""


class NumericError(CloningError, ArithmeticError):
    """An iterative routine failed to converge or hit a singular point."""


class SingularityError(NumericError):
    """Evaluation at a point where the expression diverges."""
