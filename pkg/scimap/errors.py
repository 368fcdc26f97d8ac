"""scimap errors — one hierarchy for every library failure."""
from __future__ import annotations


class ScimapError(Exception):
    """Base class for all scimap errors."""


class RecordParseError(ScimapError, ValueError):
    """A record could not be parsed; ``line_no`` is None when no line applies."""

    def __init__(self, reason: str, line_no: int | None = None) -> None:
        super().__init__(reason if line_no is None else f"{reason} at line {line_no}")
        self.reason = reason
        self.line_no = line_no


class DuplicateRecordError(RecordParseError):
    """Two records share one id."""

    def __init__(self, record_id: str, line_no: int | None = None) -> None:
        super().__init__(f"duplicate id '{record_id}'", line_no)
        self.record_id = record_id


class ConfigError(ScimapError, ValueError):
    pass


class SnowballError(ScimapError):
    pass


class LayerError(ScimapError):
    pass


class CommunityError(ScimapError):
    pass


class AnalyticsError(ScimapError):
    pass


class ExportError(ScimapError):
    """Writing or reading a graph file failed."""

    def __init__(self, path: object, cause: object) -> None:
        super().__init__(f"{path}: {cause}")
        self.path = path
        self.cause = cause


class PipelineError(ScimapError):
    """A pipeline stage failed; ``stage`` names it."""

    def __init__(self, stage: str, cause: object) -> None:
        super().__init__(f"[{stage}] {cause}")
        self.stage = stage
        self.cause = cause
