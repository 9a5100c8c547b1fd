"""Error taxonomy shared by the library and the CLI.

Each error carries the process exit code the CLI maps it to. Negative
mathematical outcomes (a failed check, a non-PSD Gram matrix, a terminated
iteration) are returned as results and never raised.
"""

from __future__ import annotations

from typing import Any, Optional


class RoughMetricsError(Exception):
    """Base class for all roughmetrics errors."""

    exit_code: int = 1


class StructuralError(RoughMetricsError):
    """Raised when distance data is malformed (non-square, negative, NaN, duplicates)."""

    exit_code = 2


class SpaceFormatError(RoughMetricsError):
    """Raised when a space or ordered-set file does not match the schema."""

    exit_code = 2

    def __init__(self, message: str, field: Optional[str] = None) -> None:
        self.field = field
        super().__init__(f"{message} (field: {field})" if field else message)


class DomainError(RoughMetricsError):
    """Raised when a parameter lies outside the domain of an operation."""

    exit_code = 3


class PreconditionError(RoughMetricsError):
    """Raised when an input fails the hypotheses an operation relies on."""

    exit_code = 4

    def __init__(self, message: str, report: Optional[dict[str, Any]] = None) -> None:
        self.report = report or {}
        super().__init__(message)


class BudgetExhaustedError(RoughMetricsError):
    """Raised when a search runs out of nodes and the caller demanded a proof."""

    exit_code = 5


class MetricViolationError(RoughMetricsError):
    """Raised when a loaded space violates the metric axioms."""

    exit_code = 6

    def __init__(self, message: str, report: Any = None) -> None:
        self.report = report
        super().__init__(message)
