from __future__ import annotations


class LexitopicError(Exception):
    """Base class for all errors raised by this package."""


class InputError(LexitopicError):
    """An input file could not be read."""

    def __init__(self, path, reason: str) -> None:
        self.path = str(path)
        super().__init__(f"{self.path}: {reason}")


class RecordError(LexitopicError):
    """A single record in an input file is malformed."""

    def __init__(self, path, line_no: int, reason: str) -> None:
        self.path = str(path)
        self.line_no = line_no
        super().__init__(f"{self.path}:{line_no}: {reason}")


class ModelFormatError(LexitopicError):
    """A serialized topic model violates the expected schema."""


class ParameterError(LexitopicError, ValueError):
    """An argument is outside its valid domain."""


class TranslationError(LexitopicError):
    """Translation produced an unusable topic."""
