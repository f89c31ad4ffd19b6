"""Exception types shared across the package."""


class DomainError(ValueError):
    """Argument outside the range where a routine is validated."""


class SingularityError(ZeroDivisionError):
    """Evaluation requested exactly at a pole."""


class ConditioningError(ArithmeticError):
    """Linear algebra too ill-conditioned to trust the result."""

    def __init__(self, message, s=None):
        super().__init__(message)
        self.s = s


class DataError(ValueError):
    """Input data parsed but violates a structural requirement."""

    def __init__(self, message, line=None):
        super().__init__(message)
        self.line = line


class FormatError(DataError):
    """Input data could not be parsed."""
