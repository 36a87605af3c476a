"""Exception types shared across the package."""


class DomainError(ValueError):
    """An argument lies outside the mathematical domain of an operation."""


class ConfigError(ValueError):
    """Inconsistent or invalid configuration (bad parameter combination)."""


class AccuracyError(RuntimeError):
    """A numerical routine could not meet its accuracy target.

    The best available estimate is carried in ``estimate`` so callers can
    decide whether to keep a degraded value.
    """

    def __init__(self, message, estimate=None, error=None):
        super().__init__(message)
        self.estimate = estimate
        self.error = error


class ConvergenceError(RuntimeError):
    """An iterative solver failed to converge within its budget."""


class CompletenessError(RuntimeError):
    """A root set failed its argument-principle completeness check."""


class CapacityError(ValueError):
    """Requested problem size exceeds a hard cost guard."""


class InconclusiveError(RuntimeError):
    """A series computation cancelled below the noise floor at every order."""
