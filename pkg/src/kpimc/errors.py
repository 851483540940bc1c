"""Exception types shared across the package."""


class KpimcError(Exception):
    """Base class for all package errors."""


class InvalidParameterError(KpimcError, ValueError):
    """An argument violates a documented precondition."""


class EmptyDatasetError(KpimcError, ValueError):
    """An estimation operation received an empty dataset."""


class InvalidBoundsError(KpimcError, ValueError):
    """CDF bounds do not strictly bracket the observed data."""


class SchemaError(KpimcError, ValueError):
    """A CSV header or config document does not match the expected schema."""


class RowError(KpimcError, ValueError):
    """A CSV data row failed to parse or validate.

    Carries the 1-based physical line number of the offending row.
    """

    def __init__(self, line: int, message: str):
        super().__init__(f"line {line}: {message}")
        self.line = line


class EmptyChainError(KpimcError, ValueError):
    """A chain has no post-burn-in states to summarize."""


class ConfigError(KpimcError, ValueError):
    """A run-config document is invalid; message names the key path."""


class PipelineError(KpimcError, RuntimeError):
    """A per-dataset pipeline failed; message carries the dataset index."""
