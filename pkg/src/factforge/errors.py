"""Exception types shared across the pipeline."""

from __future__ import annotations

from dataclasses import dataclass


class FactForgeError(Exception):
    """Base class for all errors raised by this package."""


class EmptyInputError(FactForgeError):
    """Raised when an operation receives empty or whitespace-only text."""


class ContractViolationError(FactForgeError):
    """A precondition on input data was violated (e.g. unsegmented document)."""


class CapacityError(FactForgeError):
    """Not enough items of a required kind to satisfy a sampling request."""

    def __init__(self, label: str, needed: int, available: int):
        self.label = label
        self.needed = needed
        self.available = available
        super().__init__(
            f"need {needed} pairs labeled {label!r}, only {available} available"
        )


class ConfigurationError(FactForgeError):
    """Backend or pipeline configuration is missing or invalid."""


class BackendError(FactForgeError):
    """A live LLM endpoint returned a non-transient error."""

    def __init__(self, message: str, status: int | None = None):
        self.status = status
        super().__init__(message)


class TransientFailureError(BackendError):
    """Retries were exhausted on a transient (retryable) failure."""


class PayloadParseError(FactForgeError):
    """No balanced JSON object could be extracted from a model response."""


class PayloadSchemaError(FactForgeError):
    """Extracted JSON does not match the schema required by the task."""


class TableConstructionError(FactForgeError):
    """Entailment scoring failed for a specific table cell."""

    def __init__(self, row: int, col: int, cause: Exception):
        self.row = row
        self.col = col
        self.cause = cause
        super().__init__(f"scoring failed at cell (row={row}, col={col}): {cause}")


class BoundsError(FactForgeError):
    """A row or column index is outside the table dimensions."""


class ScanError(FactForgeError):
    """A hallucination scan could not be completed for a document."""


class DependencyError(FactForgeError):
    """A pipeline stage was invoked before its upstream artifact exists."""

    def __init__(self, stage: str, missing: str):
        self.stage = stage
        self.missing = missing
        super().__init__(f"stage {stage!r} requires artifact from {missing!r}; run it first")


class InputError(FactForgeError):
    """Structured input (predictions, gold labels) violates its contract."""


class UnknownReferenceError(FactForgeError):
    """An id points at a record that does not exist."""


@dataclass
class RowError:
    """One skipped input row, kept for the ingestion audit report."""

    source: str
    line_no: int
    reason: str

    def __str__(self) -> str:
        return f"{self.source}:{self.line_no}: {self.reason}"
