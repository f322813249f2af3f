"""Exception hierarchy shared by every module of the package."""


class DahaError(Exception):
    """Base class for all errors raised by daha_opuc."""


class DomainError(DahaError, ValueError):
    """Input outside the admissible parameter domain."""


class SingularityError(DahaError, ArithmeticError):
    """A closed-form denominator vanishes."""


class WindowError(DahaError, ValueError):
    """Matrix too small for the trusted interior window."""


class PositivityError(DahaError, ValueError):
    """A recurrence coefficient that must be positive is not."""


class RankError(DahaError, ArithmeticError):
    """Least-squares regression matrix is rank deficient."""


class StructureError(DahaError, ArithmeticError):
    """An operator does not have the expected sparsity pattern."""


class TruncationError(DahaError, ValueError):
    """The boundary coefficient does not reach +-1."""


class ForbiddenConditionError(DomainError):
    """The truncation g = q^(-N) is requested (singular coefficients)."""


class DegeneracyError(DahaError, ArithmeticError):
    """Two eigenvalues coincide, so the first basis vector is not cyclic."""
