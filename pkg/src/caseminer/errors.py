class ValidationError(ValueError):
    """Input violates a documented precondition or file-format rule."""


class DomainError(ValueError):
    """A statistic was requested for something not observed in the corpus."""
