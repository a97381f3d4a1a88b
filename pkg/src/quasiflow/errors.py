"""Exception hierarchy.

Precondition errors map to CLI exit code 2, numerical failures to exit code 3.
"""


class QuasiflowError(Exception):
    pass


class PreconditionError(QuasiflowError, ValueError):
    """Input violates a documented precondition."""


class AdmissibilityError(PreconditionError):
    """Parameters or initial profile outside the admissible range."""


class DegenerateWindow(PreconditionError):
    """Profile underflows on the decay-rate fitting window."""


class NumericalFailure(QuasiflowError, RuntimeError):
    """A numerical procedure did not deliver a usable result."""


class StiffnessBreakdown(NumericalFailure):
    def __init__(self, t, dt, message=None):
        self.t = t
        self.dt = dt
        super().__init__(message or f"step size {dt:.3g} fell below dt_min at t={t:.6g}")


class NoBracket(NumericalFailure):
    """Shooting bracket does not straddle overshoot/undershoot."""


class BracketFailure(NumericalFailure):
    """Amplitude bracket could not be expanded to (Vanish, BlowUp)."""


class ConvergenceFailure(NumericalFailure):
    def __init__(self, message, residual=None):
        self.residual = residual
        super().__init__(message)


class SchemaError(NumericalFailure):
    """Stored run record is malformed or has an unsupported schema version."""
