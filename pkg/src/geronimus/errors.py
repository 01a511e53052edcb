"""Exception hierarchy for the geronimus package."""


class GeronimusError(Exception):
    """Base class for all errors raised by this package."""


class ParameterDomainError(GeronimusError, ValueError):
    """A measure or transform parameter violates its domain (alpha <= -1, N < 0, ...)."""


class ShiftInsideSupportError(GeronimusError, ValueError):
    """The shift c lies inside the support of the measure, or too close to it."""


class NumericalFailureError(GeronimusError, ArithmeticError):
    """A numerical procedure failed to converge (continued fraction, eigensolve)."""


class IllConditionedError(NumericalFailureError):
    """A Gram matrix is too ill-conditioned for the requested computation."""


class SimplicityViolationError(NumericalFailureError):
    """Two computed zeros coincide to within the simplicity tolerance."""


class SingularEvaluationError(GeronimusError, ValueError):
    """Evaluation requested at a removable singularity of a coefficient function."""


class DomainViolationError(GeronimusError, ValueError):
    """A potential or logarithm was evaluated outside its domain of definition."""
