class InvalidInputError(ValueError):
    """Raised when an argument violates an operation's precondition."""


class InvariantError(RuntimeError):
    """Raised when a computed quantity breaks a guaranteed invariant."""
