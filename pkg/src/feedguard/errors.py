"""Exception types shared across the package.

The CLI maps each category to a distinct exit code, so keep the hierarchy
flat and the messages self-contained.
"""


class FeedguardError(Exception):
    """Base class for all package errors."""


class ConfigError(FeedguardError):
    """Invalid or missing configuration field; names the offending field."""

    def __init__(self, field: str, message: str):
        self.field = field
        super().__init__(f"config field {field!r}: {message}")


class LabelError(FeedguardError):
    """Unknown corpus-native label for a source."""

    def __init__(self, source: str, raw_label: str):
        self.source = source
        self.raw_label = raw_label
        super().__init__(f"unknown label {raw_label!r} for source {source!r}")


class DataError(FeedguardError):
    """Malformed records, empty pools, or unusable splits."""


class CheckpointError(FeedguardError):
    """Corrupt or incompatible checkpoint/bundle files."""


class TrainingDiverged(FeedguardError):
    """Raised when a full epoch produces no finite loss; carries the history."""

    def __init__(self, message: str, history=None):
        self.history = history
        super().__init__(message)
