"""Exception hierarchy for the kg_reason package."""

from __future__ import annotations


class KGReasonError(Exception):
    """Base class for all errors raised by this package."""


class GraphLoadError(KGReasonError):
    """A graph or type file could not be parsed."""

    def __init__(self, path: str, line: int | None, message: str):
        self.path = path
        self.line = line
        where = f"{path}:{line}" if line is not None else path
        super().__init__(f"{where}: {message}")


class UnknownEntityError(KGReasonError):
    """An entity label was not found in the graph."""

    def __init__(self, label: str):
        self.label = label
        super().__init__(f"unknown entity: {label!r}")


class DatasetLoadError(KGReasonError):
    """A dataset file could not be parsed."""

    def __init__(self, path: str, line: int | None, message: str):
        self.path = path
        self.line = line
        where = f"{path}:{line}" if line is not None else path
        super().__init__(f"{where}: {message}")


class RenderError(KGReasonError):
    """Prompt rendering failed (missing/unused binding or bad shot count)."""


class BackendError(KGReasonError):
    """A completion backend failed to produce a response."""


class MockScriptError(BackendError):
    """The mock backend had no entry matching a request."""

    def __init__(self, stage: str, prompt_hash: str, message: str):
        self.stage = stage
        self.prompt_hash = prompt_hash
        super().__init__(f"stage={stage} hash={prompt_hash}: {message}")


class ParseError(KGReasonError):
    """Base class for response parsing failures."""


class SegmentationParseError(ParseError):
    """No line of the segmentation response matched the grammar."""


class RelationParseError(ParseError):
    """No bracketed relation list was found in the response."""


class VerdictParseError(ParseError):
    """The response did not start with a True/False token."""


class AnswerGroundingError(ParseError):
    """No evidence entity could be grounded in the answer response."""


class CandidateError(KGReasonError):
    """Relation candidate extraction was called with unusable mentions."""


class RetrievalError(KGReasonError):
    """A sub-sentence had no candidate relations to offer."""


class AssemblyError(KGReasonError):
    """Evidence assembly hit a sub-sentence with no anchored entities."""


class QueryError(KGReasonError):
    """A query object violated its construction contract."""


class PipelineError(KGReasonError):
    """Wraps a stage failure, keeping the partial trace for inspection."""

    def __init__(self, stage: str, cause: Exception, trace=None):
        self.stage = stage
        self.cause = cause
        self.trace = trace
        super().__init__(f"{stage}: {cause}")
