"""Exception types shared across the package."""


class InputError(ValueError):
    """Malformed or mismatched input (unknown axis, size mismatch, bad file)."""


class DomainError(ValueError):
    """Operation undefined for the given arguments (e.g. conditioning on a null event)."""


class ConsistencyError(RuntimeError):
    """Numerical result that can only come from a bug, not from round-off."""


class PreconditionError(RuntimeError):
    """A structural precondition of a theorem-specific computation does not hold."""

    def __init__(self, message, violated=()):
        super().__init__(message)
        self.violated = tuple(violated)


class BudgetError(RuntimeError):
    """Requested computation exceeds the configured size budget."""
