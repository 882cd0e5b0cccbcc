"""Exception hierarchy shared across the toolkit."""


class IonLinkError(Exception):
    """Base class for all toolkit errors."""


class ValidationError(IonLinkError, ValueError):
    """Input violates a documented precondition (shape, range, invariant)."""


class NumericalError(IonLinkError, ArithmeticError):
    """A computation produced a value outside its numerically valid range."""


class ConvergenceError(NumericalError):
    """An iterative routine stopped without meeting its convergence criterion.

    The best iterate found so far is kept on the exception so callers can
    still inspect or use it.
    """

    def __init__(self, message, best=None, best_value=None, gradient_norm=None):
        super().__init__(message)
        self.best = best
        self.best_value = best_value
        self.gradient_norm = gradient_norm


class ParseError(ValidationError):
    """Malformed text input; the message carries the offending line number."""
