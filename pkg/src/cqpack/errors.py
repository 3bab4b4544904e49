"""Exception hierarchy."""


class CqpackError(Exception):
    """Base class for all package errors."""


class ValidationError(CqpackError, ValueError):
    """Malformed input: wrong shape, non-Hermitian matrix, bad distribution."""


class ResourceLimitError(CqpackError):
    """A dimension or enumeration limit would be exceeded."""


class EigensolverError(CqpackError):
    """The eigensolver failed or returned an inaccurate decomposition."""

    def __init__(self, message: str, residual: float = float("nan")):
        super().__init__(f"{message} (residual {residual:.3e})")
        self.residual = residual


class NegativeEigenvalueError(CqpackError, ValueError):
    def __init__(self, min_eigenvalue: float):
        super().__init__(f"operator has eigenvalue {min_eigenvalue:.3e} below zero")
        self.min_eigenvalue = min_eigenvalue


class SupportError(CqpackError, ValueError):
    """Support of the first state is not contained in the support of the second."""


class NumericalInconsistencyError(CqpackError):
    """Two routes to the same quantity disagree beyond tolerance."""


class NotConvergedError(CqpackError):
    def __init__(self, message: str, best=None):
        super().__init__(message)
        self.best = best


class InvariantViolation(CqpackError):
    def __init__(self, message: str, audit=None):
        super().__init__(message)
        self.audit = audit
