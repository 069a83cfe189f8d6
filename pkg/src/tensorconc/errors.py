"""Exception types shared across the package."""


class InvalidInputError(ValueError):
    """Raised when arguments violate an operation's preconditions."""


class ResourceLimitError(RuntimeError):
    """Raised when a construction would exceed the dense-tensor entry guard."""
