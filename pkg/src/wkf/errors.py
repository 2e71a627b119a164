"""Exception types raised by the solvers and filters."""


class InvalidInputError(ValueError):
    """Input matrix is not symmetric, not PSD/PD, or has mismatched shape."""


class SingularBlockError(ValueError):
    """The observation block S_yy could not be factorized even after jitter."""


class DomainError(ValueError):
    """Dual variable gamma lies outside (lambda_max(D), inf)."""


class DegenerateGradientError(ValueError):
    """The gradient matrix D is zero, so the subproblem has no bisection bracket."""


class ConvergenceError(RuntimeError):
    """An iterative routine hit its iteration cap.

    Attributes
    ----------
    last_gap : float
        The last certified gap seen before giving up.
    context : str
        Where the failure happened (iteration or time step).
    """

    def __init__(self, message, last_gap=float("nan"), context=""):
        super().__init__(message if not context else f"{message} ({context})")
        self.last_gap = last_gap
        self.context = context


class ModelDegeneracyError(ValueError):
    """A state-space model produced a singular pseudo-nominal covariance."""
