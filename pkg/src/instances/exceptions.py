from typing import Optional


class InstanceError(Exception):
    """Base class for instance file and generator errors."""
    pass

class InstanceSyntaxError(InstanceError):
    """Raised when an instance file line cannot be parsed."""

    def __init__(self, line: int, message: str, column: Optional[int] = None) -> None:
        self.line = line
        self.column = column
        where = f"line {line}" if column is None else f"line {line}, column {column}"
        super().__init__(f"{where}: {message}")

class CountMismatchError(InstanceError):
    """Raised when the vertex or edge lines disagree with the header counts."""
    pass

class InvalidParamsError(InstanceError):
    """Raised when a generator model or its parameters are invalid."""
    pass

class RetriesExhaustedError(InstanceError):
    """Raised when a generator cannot draw a connected graph within its retry budget."""
    pass
