"""Multi-lane timeline assembly, zoom resampling, and canonical JSON.

A timeline is the serialized product consumed by the API and the viewer:
one lane per (student, modality) plus one session-wide system lane. Lanes
hold either labeled segments or point markers (the actions lane). The
serializer is byte-stable: fixed key order, floats always printed with six
decimal places.

Resampling contract: only grid buckets (anchored at the lane start) that
contain at least one segment shorter than the resolution are rewritten;
each such bucket collapses to one segment carrying the majority-duration
label within it. Everything else passes through verbatim, so a lane whose
segments all meet the resolution is returned unchanged, and resampling is
idempotent at a fixed resolution. Markers are never dropped: markers closer
together than the resolution coalesce into (first time, count) clusters.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, replace
from typing import Iterable, Mapping, Sequence

from .errors import SchemaViolation, UnknownLane, UnknownStudent

LANE_KINDS = ("state", "actions", "system", "affect", "gaze")
SEGMENT_LANES = ("state", "system", "affect", "gaze")
NATIVE_RESOLUTION = 0.0  # sentinel: no resampling applied


@dataclass(frozen=True)
class Segment:
    start: float
    end: float
    label: str | None

    def __post_init__(self):
        if not self.start < self.end:
            raise SchemaViolation("segment", f"start {self.start} >= end {self.end}")


@dataclass(frozen=True)
class Marker:
    time: float
    label: str | None
    count: int = 1


@dataclass(frozen=True)
class Lane:
    lane_id: str
    student_id: str | None = None
    segments: tuple[Segment, ...] | None = None
    markers: tuple[Marker, ...] | None = None

    def __post_init__(self):
        if self.lane_id not in LANE_KINDS:
            raise UnknownLane(self.lane_id)
        if (self.segments is None) == (self.markers is None):
            raise SchemaViolation("lane", "exactly one of segments/markers required")
        if self.segments is not None:
            for a, b in zip(self.segments, self.segments[1:]):
                if b.start < a.end:
                    raise SchemaViolation("lane", "segments overlap or are unsorted")
        if self.markers is not None:
            times = [m.time for m in self.markers]
            if times != sorted(times):
                raise SchemaViolation("lane", "markers unsorted")

    @property
    def extent(self) -> float:
        if self.segments:
            return self.segments[-1].end
        if self.markers:
            return self.markers[-1].time
        return 0.0


@dataclass(frozen=True)
class Timeline:
    session_id: str
    duration: float
    lanes: tuple[Lane, ...]
    resolution: float = NATIVE_RESOLUTION

    def __post_init__(self):
        if self.resolution < 0:
            raise SchemaViolation("resolution", "must be >= 0")


def _lane_sort_key(lane: Lane) -> tuple:
    student = "" if lane.student_id is None else lane.student_id
    return (lane.student_id is not None, student, LANE_KINDS.index(lane.lane_id))


def build_timeline(
    session_id: str,
    duration: float,
    lanes_by_student: Mapping[str, Mapping[str, Lane]],
    system_lane: Lane | None,
    students: Iterable[str] | None = None,
    kinds: Iterable[str] | None = None,
) -> Timeline:
    """Select lanes for the requested students and lane kinds.

    `lanes_by_student` maps student id -> lane kind -> Lane. None selectors
    mean "all". The system lane is included when its kind is requested.
    """
    known_students = set(lanes_by_student)
    selected_students = sorted(known_students) if students is None else sorted(set(students))
    for s in selected_students:
        if s not in known_students:
            raise UnknownStudent(s)
    selected_kinds = list(LANE_KINDS) if kinds is None else list(dict.fromkeys(kinds))
    for k in selected_kinds:
        if k not in LANE_KINDS:
            raise UnknownLane(k)

    lanes: list[Lane] = []
    if "system" in selected_kinds and system_lane is not None:
        lanes.append(system_lane)
    for student in selected_students:
        available = lanes_by_student[student]
        for kind in selected_kinds:
            if kind == "system":
                continue
            lane = available.get(kind)
            if lane is not None:
                lanes.append(lane)
    lanes.sort(key=_lane_sort_key)
    return Timeline(session_id, duration, tuple(lanes), NATIVE_RESOLUTION)


def _bucket_of(t: float, anchor: float, resolution: float) -> int:
    """Grid bucket index, consistent with edges computed as anchor + k*res."""
    b = int(math.floor((t - anchor) / resolution))
    while anchor + (b + 1) * resolution <= t:
        b += 1
    while anchor + b * resolution > t:
        b -= 1
    return b


def _resample_pass(
    segments: list[Segment], resolution: float, anchor: float
) -> tuple[list[Segment], bool]:
    def edge(b: int) -> float:
        return anchor + b * resolution

    dirty: set[int] = set()
    for seg in segments:
        if seg.end - seg.start < resolution:
            b = _bucket_of(seg.start, anchor, resolution)
            while edge(b) < seg.end:
                dirty.add(b)
                b += 1
    if not dirty:
        return segments, False

    # Coalesce adjacent dirty buckets into intervals for the subtraction step.
    ordered = sorted(dirty)
    intervals: list[tuple[int, int]] = []
    for b in ordered:
        if intervals and intervals[-1][1] == b - 1:
            intervals[-1] = (intervals[-1][0], b)
        else:
            intervals.append((b, b))
    dirty_spans = [(edge(lo), edge(hi + 1)) for lo, hi in intervals]

    out: list[Segment] = []

    # One majority-duration segment per dirty bucket, clipped to coverage.
    for b in ordered:
        lo, hi = edge(b), edge(b + 1)
        weights: dict[str | None, float] = {}
        order: list[str | None] = []
        span_lo = span_hi = None
        for seg in segments:
            o_lo = max(seg.start, lo)
            o_hi = min(seg.end, hi)
            if o_hi <= o_lo:
                continue
            if seg.label not in weights:
                order.append(seg.label)
                weights[seg.label] = 0.0
            weights[seg.label] += o_hi - o_lo
            span_lo = o_lo if span_lo is None else min(span_lo, o_lo)
            span_hi = o_hi if span_hi is None else max(span_hi, o_hi)
        if span_lo is None:
            continue
        best = max(weights.values())
        label = next(l for l in order if weights[l] == best)
        out.append(Segment(span_lo, span_hi, label))

    # Everything outside dirty buckets passes through verbatim.
    for seg in segments:
        cursor = seg.start
        for lo, hi in dirty_spans:
            if hi <= cursor:
                continue
            if lo >= seg.end:
                break
            if lo > cursor:
                out.append(Segment(cursor, min(lo, seg.end), seg.label))
            cursor = max(cursor, hi)
            if cursor >= seg.end:
                break
        if cursor < seg.end:
            out.append(Segment(cursor, seg.end, seg.label))

    out.sort(key=lambda s: (s.start, s.end))
    return out, True


def students_of(timeline: Timeline) -> list[str]:
    return sorted({l.student_id for l in timeline.lanes if l.student_id is not None})


def filter_timeline(
    timeline: Timeline,
    students: Iterable[str] | None = None,
    kinds: Iterable[str] | None = None,
) -> Timeline:
    """Restrict a timeline to the requested students and lane kinds."""
    known = set(students_of(timeline))
    if students is not None:
        wanted_students = set(students)
        for s in wanted_students:
            if s not in known:
                raise UnknownStudent(s)
    else:
        wanted_students = None
    if kinds is not None:
        wanted_kinds = set(kinds)
        for k in wanted_kinds:
            if k not in LANE_KINDS:
                raise UnknownLane(k)
    else:
        wanted_kinds = None
    lanes = []
    for lane in timeline.lanes:
        if wanted_kinds is not None and lane.lane_id not in wanted_kinds:
            continue
        if lane.student_id is not None and wanted_students is not None:
            if lane.student_id not in wanted_students:
                continue
        lanes.append(lane)
    return replace(timeline, lanes=tuple(lanes))


def _resample_segments(
    segments: Sequence[Segment], resolution: float
) -> tuple[Segment, ...]:
    current = list(segments)
    if not current:
        return ()
    anchor = current[0].start
    # Rewrites can leave new sub-resolution remainders at bucket edges, so
    # iterate to the fixpoint; each pass removes off-grid boundaries.
    for _ in range(2 * len(current) + 8):
        new, changed = _resample_pass(current, resolution, anchor)
        if not changed or new == current:
            break
        current = new
    return tuple(current)


def _resample_markers(
    markers: Sequence[Marker], resolution: float
) -> tuple[Marker, ...]:
    out: list[Marker] = []
    cluster_start: float | None = None
    cluster_count = 0
    cluster_label: str | None = None
    for m in markers:
        if cluster_start is not None and m.time - cluster_start < resolution:
            cluster_count += m.count
            if cluster_label != m.label:
                cluster_label = None  # mixed cluster
        else:
            if cluster_start is not None:
                out.append(Marker(cluster_start, cluster_label, cluster_count))
            cluster_start = m.time
            cluster_count = m.count
            cluster_label = m.label
    if cluster_start is not None:
        out.append(Marker(cluster_start, cluster_label, cluster_count))
    return tuple(out)


def resample(lane: Lane, resolution: float) -> Lane:
    if resolution < 0:
        raise SchemaViolation("resolution", "must be >= 0")
    if resolution == 0:
        return lane
    if lane.markers is not None:
        return replace(lane, markers=_resample_markers(lane.markers, resolution))
    return replace(lane, segments=_resample_segments(lane.segments, resolution))


def resample_timeline(timeline: Timeline, resolution: float) -> Timeline:
    return Timeline(
        timeline.session_id,
        timeline.duration,
        tuple(resample(lane, resolution) for lane in timeline.lanes),
        resolution,
    )


def clip_timeline(timeline: Timeline, start: float, end: float) -> Timeline:
    """Restrict lanes to [start, end]; duration is left untouched."""
    if not start < end:
        raise SchemaViolation("from/to", f"need from < to, got [{start}, {end}]")
    lanes = []
    for lane in timeline.lanes:
        if lane.segments is not None:
            segs = [
                Segment(max(s.start, start), min(s.end, end), s.label)
                for s in lane.segments
                if s.end > start and s.start < end
            ]
            lanes.append(replace(lane, segments=tuple(segs)))
        else:
            marks = tuple(m for m in lane.markers if start <= m.time <= end)
            lanes.append(replace(lane, markers=marks))
    return replace(timeline, lanes=tuple(lanes))


# -- canonical JSON ----------------------------------------------------------

def _fmt_float(x: float) -> str:
    if not math.isfinite(x):
        raise SchemaViolation("float", f"non-finite value {x!r}")
    s = f"{x:.6f}"
    return "0.000000" if s == "-0.000000" else s


def _emit(value, parts: list[str]) -> None:
    if value is None:
        parts.append("null")
    elif value is True:
        parts.append("true")
    elif value is False:
        parts.append("false")
    elif isinstance(value, str):
        parts.append(json.dumps(value, ensure_ascii=False))
    elif isinstance(value, int):
        parts.append(str(value))
    elif isinstance(value, float):
        parts.append(_fmt_float(value))
    elif isinstance(value, dict):
        parts.append("{")
        for i, (k, v) in enumerate(value.items()):
            if i:
                parts.append(",")
            parts.append(json.dumps(k, ensure_ascii=False))
            parts.append(":")
            _emit(v, parts)
        parts.append("}")
    elif isinstance(value, (list, tuple)):
        parts.append("[")
        for i, v in enumerate(value):
            if i:
                parts.append(",")
            _emit(v, parts)
        parts.append("]")
    else:
        raise SchemaViolation("json", f"unsupported type {type(value).__name__}")


def canonical_json(doc) -> str:
    """Byte-stable JSON: insertion key order, floats at 6 decimal places."""
    parts: list[str] = []
    _emit(doc, parts)
    return "".join(parts)


def timeline_to_dict(timeline: Timeline) -> dict:
    lanes = []
    for lane in timeline.lanes:
        doc: dict = {"lane_id": lane.lane_id, "student": lane.student_id}
        if lane.segments is not None:
            doc["segments"] = [
                {"start": float(s.start), "end": float(s.end), "label": s.label}
                for s in lane.segments
            ]
        else:
            doc["markers"] = [
                {"t": float(m.time), "label": m.label, "count": int(m.count)}
                for m in lane.markers
            ]
        lanes.append(doc)
    return {
        "session": timeline.session_id,
        "duration": float(timeline.duration),
        "resolution": float(timeline.resolution),
        "lanes": lanes,
    }


def serialize(timeline: Timeline) -> str:
    return canonical_json(timeline_to_dict(timeline)) + "\n"


def parse(text: str | bytes) -> Timeline:
    doc = json.loads(text)
    lanes = []
    for l in doc["lanes"]:
        if "segments" in l:
            segments = tuple(
                Segment(s["start"], s["end"], s["label"]) for s in l["segments"]
            )
            lanes.append(Lane(l["lane_id"], l["student"], segments=segments))
        else:
            markers = tuple(
                Marker(m["t"], m["label"], m["count"]) for m in l["markers"]
            )
            lanes.append(Lane(l["lane_id"], l["student"], markers=markers))
    return Timeline(
        session_id=doc["session"],
        duration=float(doc["duration"]),
        lanes=tuple(lanes),
        resolution=float(doc.get("resolution", NATIVE_RESOLUTION)),
    )
