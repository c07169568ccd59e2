"""Exception types shared across the package."""


class DomainError(ValueError):
    """An argument lies outside the region where an operation is defined."""


class AccuracyError(ArithmeticError):
    """A numerical method failed to reach its requested accuracy.

    The best available estimate is kept on the exception so callers can
    decide whether it is still usable.
    """

    def __init__(self, message, value=None, err_est=None):
        super().__init__(message)
        self.value = value
        self.err_est = err_est


class SingularityError(DomainError):
    """A kernel was evaluated exactly at one of its singular points."""
