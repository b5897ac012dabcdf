class HyperellError(Exception):
    """Base class for every error raised by hyperell."""


class DomainError(HyperellError, ValueError):
    """An argument lies outside the domain of the requested function."""


class BranchError(DomainError):
    """An argument lies on the branch cut [1, inf) of the integral representation."""


class PoleError(DomainError):
    """A denominator parameter is a non-positive integer."""


class SingularPivotError(DomainError):
    """The pivot argument of the reduction formula equals 1."""


class PreconditionError(HyperellError, ValueError):
    """A parameter relation required by an identity does not hold."""


class NotTabulatedError(HyperellError, KeyError):
    """The requested order is not in the singular-modulus table."""


class ConvergenceError(HyperellError, ArithmeticError):
    """
    An iterative evaluation stopped before reaching its tolerance.

    Parameters
    ----------
    message : str
        Human readable description.
    best_estimate : float or complex, optional
        Value at the last completed iteration.
    error_estimate : float, optional
        Error estimate of `best_estimate`.
    """

    def __init__(self, message, best_estimate=None, error_estimate=None):
        super().__init__(message)
        self.best_estimate = best_estimate
        self.error_estimate = error_estimate


class ConsistencyError(HyperellError, ArithmeticError):
    """A value expected to be real carries an imaginary residue above tolerance."""
