class DomainError(ValueError):
    """Input outside the physically or mathematically valid range."""


class ResourceLimitError(RuntimeError):
    """A requested table or grid would exceed the configured hard limit."""


class ConvergenceError(RuntimeError):
    """An iterative numerical routine failed to converge."""
