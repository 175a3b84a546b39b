"""Error types shared across the engine.

Every failure mode callers are expected to branch on gets its own class; plain
ValueError is reserved for programming mistakes that no caller should catch.
"""

from __future__ import annotations


class RecallError(Exception):
    """Base class for all engine errors."""


class EmptyTextError(RecallError):
    """Input text is empty after whitespace normalization."""


class EmptyQueryError(RecallError):
    """A query string was required but empty."""


class EmptyContextError(RecallError):
    """Query inference needs a non-empty context window."""


class DimensionMismatchError(RecallError):
    """Vector dimensions disagree with the configured embedding size."""


class ZeroVectorError(RecallError):
    """Cosine similarity is undefined for a zero-magnitude vector."""


class DuplicateIdError(RecallError):
    """A memory block id was inserted twice."""


class IoFailureError(RecallError):
    """Persistence could not read or write its file."""


class CorruptRecordError(RecallError):
    """A persisted line failed to parse; carries the 1-based line number."""

    def __init__(self, line_number: int, reason: str):
        super().__init__(f"line {line_number}: {reason}")
        self.line_number = line_number
        self.reason = reason


class RemoteUnavailableError(RecallError):
    """A remote backend call failed; `retryable` hints whether retrying may help."""

    def __init__(self, message: str, *, retryable: bool):
        super().__init__(message)
        self.retryable = retryable


class PromptTooLargeError(RecallError):
    """Prompt exceeds the backend's input limit."""


class MalformedPromptError(RecallError):
    """The mock backend could not find the section headers it needs."""


class MissingBindingError(RecallError):
    """A template placeholder had no binding."""


class UnknownPlaceholderError(RecallError):
    """A binding key does not correspond to any placeholder in the template."""


class SessionClosedError(RecallError):
    """Operation attempted on a closed session."""


class ModeArgMismatchError(RecallError):
    """Trigger arguments do not fit the requested interaction mode."""


class MissingAssetError(RecallError):
    """A bundled corpus or template asset is absent or empty."""


class InvalidCaseError(RecallError):
    """A corpus case violates the corpus schema or key invariants."""
