from __future__ import annotations


class LoopfinderError(Exception):
    """Base class for all errors raised by the analyzer."""


class ParseError(LoopfinderError, ValueError):
    """
    Raised when program or query text cannot be parsed.

    Carries the 1-based line and column of the offending input so
    that management commands can point at it.

    """

    def __init__(self, message: str, line: int, column: int) -> None:
        super().__init__(message)
        self.message = message
        self.line = line
        self.column = column

    def __str__(self) -> str:
        return f"line {self.line}, column {self.column}: {self.message}"


class ResourceError(LoopfinderError):
    """Raised when an analysis exceeds one of its configured budgets."""

    def __init__(self, budget: str, limit: int, message: str = "") -> None:
        super().__init__(message or f"{budget} of {limit} exceeded")
        self.budget = budget
        self.limit = limit


class ModesFileError(LoopfinderError, ValueError):
    """Raised when a terminating-modes file does not follow the schema."""
