class DomainError(ValueError):
    """Input outside the domain of a kernel (coincident points, r <= 0, ...)."""


class ConvergenceError(RuntimeError):
    """Adaptive quadrature hit its depth limit before reaching tolerance."""

    def __init__(self, message, estimate=None, error=None):
        super().__init__(message)
        self.estimate = estimate
        self.error = error


class ConfigurationError(ValueError):
    """Invalid initial data or run configuration."""


class NumericalAbort(RuntimeError):
    """A particle left the half-plane (or a guard tripped) during a run."""

    def __init__(self, message, index=None, time=None):
        super().__init__(message)
        self.index = index
        self.time = time
