class ValidationError(ValueError):
    """Raised when an input violates a domain precondition."""


class NotInLambdaError(ValidationError):
    """The partition has a single part, so it lies outside Lambda."""


class UnbalancedError(ValidationError):
    """Some letter occurs a different number of times on the two sides."""
