"""Exception types shared across the pipeline.

Exit-code mapping (used by the CLI): usage and input problems are
``InputError`` subclasses (exit 2), environment and provider problems are
``EnvironmentFailure`` subclasses (exit 3).
"""


class StoryweaverError(Exception):
    """Base class for all errors raised by this package."""


class InputError(StoryweaverError):
    """Bad input: malformed documents, invalid config, missing pages."""


class ParseError(InputError):
    """Malformed input document. Carries a line/column when known."""

    def __init__(self, message: str, line: int | None = None, column: int | None = None):
        self.line = line
        self.column = column
        if line is not None:
            message = f"{message} (line {line}" + (f", column {column})" if column is not None else ")")
        super().__init__(message)


class ArticleValidationError(InputError):
    """Structurally parseable input that violates an article invariant."""


class ConfigError(InputError):
    """Invalid or unknown configuration key/value."""


class PlanningError(StoryweaverError):
    """Planner precondition violated, e.g. a summary missing for a section."""


class EnvironmentFailure(StoryweaverError):
    """Network, provider, or filesystem trouble outside the input's control."""


class FetchError(EnvironmentFailure):
    """HTTP-level failure while fetching an article."""


class PageNotFoundError(InputError):
    """The requested article title does not exist at the endpoint."""


class RateLimitedError(FetchError):
    """The endpoint asked us to back off and retries were exhausted."""


class ProviderError(EnvironmentFailure):
    """An external summarizer/embedder broke its contract."""
