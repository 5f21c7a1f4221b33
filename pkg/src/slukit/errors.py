"""Exception types shared across the toolkit."""

from __future__ import annotations


class ToolkitError(Exception):
    """Base class for every error this package raises on purpose."""


class ParseError(ToolkitError):
    """Input text does not follow the expected file format."""

    def __init__(self, message: str, line: int | None = None):
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)
        self.line = line


class StructuralError(ToolkitError):
    """Data violates a structural invariant (shapes, labels, counts)."""


class AlignmentError(ToolkitError):
    """Gold and predicted datasets are not position-aligned."""


class DivergenceError(ToolkitError):
    """Training produced a non-finite loss."""

    def __init__(self, epoch: int, batch: int):
        super().__init__(f"non-finite loss at epoch {epoch}, batch {batch}")
        self.epoch = epoch
        self.batch = batch
