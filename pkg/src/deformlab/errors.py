"""Exception types raised by deformlab."""


class DeformlabError(Exception):
    """Base class for all library errors."""


class DomainError(DeformlabError, ValueError):
    """Input lies outside the domain of an operation."""


class ZeroMatrix(DomainError):
    """The deformation coefficient of the zero operator is undefined."""


class ZeroColumn(DomainError):
    """A column bound was requested for a matrix with a zero column."""


class DimensionMismatch(DomainError):
    """Statistic and ensemble dimensions disagree."""


class ComplexRoots(DomainError):
    """Cubic coefficients do not come from a positive semidefinite Gram matrix."""


class ToleranceNotMet(DeformlabError, ArithmeticError):
    """Adaptive quadrature exhausted its node budget before reaching the target."""


class NonConvergence(DeformlabError, ArithmeticError):
    """An iterative oracle did not converge within its sweep budget."""
