"""Custom exceptions used across the Grassmannian toolkit."""

from __future__ import annotations


class GrassmannError(Exception):
    """Base exception for toolkit related errors."""


class InvalidArgumentsError(GrassmannError, ValueError):
    """Raised when an operation receives arguments outside its domain."""


class InvalidStateError(GrassmannError):
    """Raised when a value cannot be processed in its current state (e.g. an all-zero vector)."""


class ModeMismatchError(GrassmannError):
    """Raised when an operation needs a scalar mode the input does not have."""


class SizeLimitError(GrassmannError):
    """Raised when an exhaustive computation is requested beyond its guarded size."""


class ConvergenceFailureError(GrassmannError):
    """Raised when an iteration does not converge within its budget."""


class CertificationError(GrassmannError):
    """Raised when a computation contradicts a proven statement it is supposed to confirm."""


class GenerationFailureError(GrassmannError):
    """Raised when a sampler exhausts its retries."""


class ConfigurationError(GrassmannError):
    """Raised when configuration values cannot be interpreted."""


class ReportIOError(GrassmannError, OSError):
    """Raised when a report cannot be written to its destination."""


class PreconditionViolationError(GrassmannError):
    """Raised when a named precondition does not hold."""

    def __init__(self, message: str, tag: str) -> None:
        super().__init__(message)
        self.tag = tag


class HypothesisNotMetError(PreconditionViolationError):
    """Raised when a verification pipeline is handed an input outside its hypothesis."""

    def __init__(self, message: str, tag: str = "positive") -> None:
        super().__init__(message, tag)


class BoundaryContactError(GrassmannError):
    """Raised when a flow reaches a vanishing Plücker coordinate."""

    def __init__(self, message: str, step: int) -> None:
        super().__init__(message)
        self.step = step


class MatrixParseError(GrassmannError, ValueError):
    """Raised when matrix text cannot be parsed."""

    def __init__(self, message: str, line: int, column: int) -> None:
        super().__init__(f"line {line}, column {column}: {message}")
        self.line = line
        self.column = column
