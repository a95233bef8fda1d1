"""Exception hierarchy shared by all solvers."""


class CPAngularError(Exception):
    """Base class for every error raised by this package."""


class DomainError(CPAngularError, ValueError):
    """Input outside the domain where an operation is defined."""


class ConvergenceError(CPAngularError, RuntimeError):
    """An iteration failed to converge; ``best`` holds the last iterate."""

    def __init__(self, message, best=None):
        super().__init__(message)
        self.best = best


class BracketError(CPAngularError, ValueError):
    """Root bracket without a sign change."""


class StepSizeError(CPAngularError, RuntimeError):
    """Adaptive integrator step size underflow; ``t`` and ``y`` are the last good state."""

    def __init__(self, message, t=None, y=None):
        super().__init__(message)
        self.t = t
        self.y = y


class TrackingError(CPAngularError, RuntimeError):
    """Continuation lost the tracked root."""


class ResonanceError(CPAngularError, RuntimeError):
    """A resonant series coefficient needs more perturbation levels than were budgeted."""


class ConsistencyError(CPAngularError, RuntimeError):
    """Two routes that must agree by construction disagree beyond tolerance."""
