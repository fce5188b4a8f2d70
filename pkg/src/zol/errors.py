"""Shared exception types."""


class BudgetExceeded(Exception):
    """Raised when a computation would blow past its stated size budget."""


class ParseError(ValueError):
    """Syntax or validation error in a vocabulary or structure file."""

    def __init__(self, message, line=None):
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)
        self.line = line


class AgreementError(ValueError):
    """A substitution pair fails its agreement precondition."""
