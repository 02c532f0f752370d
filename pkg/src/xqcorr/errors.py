"""Exception types shared across the package."""


class XqcorrError(Exception):
    """Base class for all xqcorr errors."""


class InvalidStateError(XqcorrError):
    """A state violates its physicality invariants beyond tolerance."""

    def __init__(self, message, violations=None):
        super().__init__(message)
        self.violations = tuple(violations or ())


class NotAnXStateError(InvalidStateError):
    """A dense matrix has support outside the X pattern.

    ``entries`` lists the offending (row, col) index pairs (0-based).
    """

    def __init__(self, message, entries):
        super().__init__(message)
        self.entries = tuple(entries)


class SolverFailureError(XqcorrError):
    """The closest-product stationarity solver found no usable root."""


class ConvergenceFailureError(XqcorrError):
    """Numerical minimization failed to reach the required residual.

    Carries the best point found so far in ``best``.
    """

    def __init__(self, message, best=None):
        super().__init__(message)
        self.best = best


class RejectionExhaustionError(XqcorrError):
    """Rejection sampling acceptance rate collapsed (impossible filter)."""


class UnphysicalParametersError(XqcorrError):
    """Parameters do not correspond to a positive semidefinite state."""
