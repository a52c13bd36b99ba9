"""Exception types raised across the simulator."""


class FedSimError(Exception):
    """Base class for simulator errors."""


class DimensionError(FedSimError, ValueError):
    """Vector lengths or model dimensions disagree."""


class ParameterError(FedSimError, ValueError):
    """An argument or configuration value is outside its valid range."""


class SchedulingError(FedSimError, ValueError):
    """Compression ratios cannot equalize client upload times."""


class ParseError(FedSimError, ValueError):
    def __init__(self, message: str, line: int | None = None):
        self.line = line
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)


class SchemaError(FedSimError, ValueError):
    """Input file or config does not have the expected layout."""
