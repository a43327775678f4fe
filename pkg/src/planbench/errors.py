"""Exception types shared across the package."""


class PlanbenchError(Exception):
    """Base class for every error raised by this package."""


class ContractViolation(PlanbenchError):
    """An operation was called with arguments that violate its preconditions."""


class ParseError(PlanbenchError):
    """A document could not be parsed; carries the 1-based line when known."""

    def __init__(self, message: str, line: int | None = None):
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)
        self.line = line


class ValidationError(PlanbenchError):
    """A parsed document or parameter set failed semantic validation."""
