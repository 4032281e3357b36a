"""Exception types shared across the package."""


class ConfigurationError(ValueError):
    """Invalid user-supplied configuration (qubit counts, shots, rates, labels)."""


class ValidationError(ValueError):
    """A matrix or structure violates a required invariant."""


class NumericalDegeneracyError(ArithmeticError):
    """A sampled measurement branch has (numerically) zero probability."""


class InsufficientDataError(ValueError):
    """Too few samples to form an estimate."""


class ParseError(ValueError):
    """Malformed circuit dump or coupling-map text."""

    def __init__(self, message: str, line: int | None = None):
        self.line = line
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)
