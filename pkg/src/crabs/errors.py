"""Exception types shared across the package."""


class CrabsError(Exception):
    """Base class for all errors raised by this package."""


class NotebookParseError(CrabsError):
    """Notebook document is not valid JSON."""

    def __init__(self, message: str, byte_offset: int | None = None):
        super().__init__(message)
        self.byte_offset = byte_offset


class NotebookSchemaError(CrabsError):
    """Notebook JSON is missing a required field."""

    def __init__(self, field: str, message: str | None = None):
        super().__init__(message or f"missing required notebook field: {field!r}")
        self.field = field


class EmptyNotebookError(CrabsError):
    """Notebook contains no code cells."""


class UnparseableResponseError(CrabsError):
    """Resolver response contained no recognizable yes/no answer."""

    def __init__(self, raw_response: str):
        super().__init__(f"no yes/no answer in response: {raw_response!r}")
        self.raw_response = raw_response


class CacheMissError(CrabsError):
    """Replay cache has no entry for a prompt."""

    def __init__(self, prompt_hash: str):
        super().__init__(f"replay cache miss for prompt_hash {prompt_hash}")
        self.prompt_hash = prompt_hash


class ResolverError(CrabsError):
    """Resolver backend failed hard (after any retry)."""


class IncompleteResolutionError(CrabsError):
    """An ambiguity has no resolution record."""


class AnnotationMismatchError(CrabsError):
    """A resolution record does not fit the ground-truth annotation."""


class EmptyReportError(CrabsError):
    """No per-notebook scores were supplied to aggregate."""


class GraphSchemaError(CrabsError):
    """Graph JSON file does not match the expected schema."""
