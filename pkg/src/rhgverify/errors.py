"""Exception hierarchy for rhgverify."""

from typing import Optional


class RHGError(Exception):
    """Base class for all errors raised by rhgverify."""


class InputError(RHGError):
    """Invalid user input: shapes, cells, dimensions or parameter domains."""


class CircuitSyntaxError(InputError):
    """Malformed circuit file, with the offending location."""

    def __init__(self, message: str, line: Optional[int] = None, column: Optional[int] = None):
        self.detail = message
        self.line = line
        self.column = column
        location = ""
        if line is not None:
            location = f"line {line}"
            if column is not None:
                location += f", column {column}"
            location += ": "
        super().__init__(f"{location}{message}")


class OracleLimitError(InputError):
    """The brute-force oracle was asked to enumerate too many cells."""


class InfeasibleScheduleError(RHGError):
    """A distillation level has failure probability >= 1."""

    def __init__(self, message: str, level: Optional[int] = None):
        self.level = level
        super().__init__(message)
