"""Exception types raised across the pipeline.

Every error that callers are expected to catch is a subclass of
PipelineError; parse-time errors carry the offending line number where
one exists.
"""

from __future__ import annotations


class PipelineError(Exception):
    """Base class for all pipeline errors."""


class MissingFile(PipelineError):
    pass


class SchemaViolation(PipelineError):
    def __init__(self, field: str, reason: str):
        self.field = field
        self.reason = reason
        super().__init__(f"{field}: {reason}")


class DuplicateStreamId(PipelineError):
    pass


class DuplicateOOIName(PipelineError):
    pass


class MissingFloorPlane(PipelineError):
    pass


class MalformedRow(PipelineError):
    def __init__(self, line: int, reason: str):
        self.line = line
        self.reason = reason
        super().__init__(f"line {line}: {reason}")


class RangeViolation(PipelineError):
    def __init__(self, field: str, value: float, line: int | None = None):
        self.field = field
        self.value = value
        self.line = line
        at = f" (line {line})" if line is not None else ""
        super().__init__(f"{field} out of range: {value!r}{at}")


class FrameOrderViolation(PipelineError):
    pass


class EmptyGroundTruth(PipelineError):
    pass


class WrongWindowLength(PipelineError):
    pass


class NonFiniteInput(PipelineError):
    pass


class NonPositiveDepth(PipelineError):
    pass


class OriginBelowFloor(PipelineError):
    pass


class BehindCamera(PipelineError):
    pass


class MalformedEvent(PipelineError):
    def __init__(self, line: int, reason: str):
        self.line = line
        self.reason = reason
        super().__init__(f"line {line}: {reason}")


class UnknownKind(PipelineError):
    def __init__(self, line: int, kind: str):
        self.line = line
        self.kind = kind
        super().__init__(f"line {line}: unknown event kind {kind!r}")


class UnknownStudent(PipelineError):
    pass


class UnknownLane(PipelineError):
    pass


class NoStateData(PipelineError):
    pass


class SpecViolation(PipelineError):
    pass
