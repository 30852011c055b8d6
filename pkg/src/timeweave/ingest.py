"""Input parsing and validation: session manifest, per-stream detection CSVs,
frame/timestamp alignment, and the scene file.

All loaders are pure given their inputs and resolve relative paths against
the manifest directory.
"""

from __future__ import annotations

import csv
import io
import json
import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Sequence

from .errors import (
    DuplicateStreamId,
    MalformedRow,
    MissingFile,
    RangeViolation,
    SchemaViolation,
)
from .scene import SceneModel, load_scene

DEFAULT_FPS = 30.0
DEFAULT_FOCAL_PX = 1000.0

DETECTION_COLUMNS = (
    "frame", "x_min", "y_min", "x_max", "y_max", "valence", "arousal",
)
GAZE_COLUMNS = ("pitch", "yaw", "depth")


@dataclass(frozen=True)
class CameraIntrinsics:
    fx: float
    fy: float
    cx: float
    cy: float
    image_width: int
    image_height: int

    def __post_init__(self):
        if self.fx <= 0 or self.fy <= 0:
            raise SchemaViolation("intrinsics", "focal lengths must be > 0")
        if not (0 <= self.cx < self.image_width):
            raise SchemaViolation("intrinsics.cx", "principal point outside image")
        if not (0 <= self.cy < self.image_height):
            raise SchemaViolation("intrinsics.cy", "principal point outside image")


def default_intrinsics(width: int = 1920, height: int = 1080) -> CameraIntrinsics:
    """Fallback used when a stream declares no intrinsics."""
    return CameraIntrinsics(
        fx=DEFAULT_FOCAL_PX, fy=DEFAULT_FOCAL_PX,
        cx=width / 2.0, cy=height / 2.0,
        image_width=width, image_height=height,
    )


@dataclass(frozen=True)
class StreamSpec:
    stream_id: str
    camera_id: str
    start_offset_seconds: float = 0.0
    intrinsics: CameraIntrinsics = field(default_factory=default_intrinsics)
    detections_path: Path | None = None

    def __post_init__(self):
        if not math.isfinite(self.start_offset_seconds) or self.start_offset_seconds < 0:
            raise SchemaViolation(
                "start_offset_seconds", "must be finite and non-negative"
            )


@dataclass(frozen=True)
class VideoFile:
    camera_id: str
    path: Path
    start_offset_seconds: float = 0.0


@dataclass(frozen=True)
class SessionManifest:
    session_id: str
    fps: float
    streams: tuple[StreamSpec, ...]
    video_files: tuple[VideoFile, ...] = ()
    log_path: Path | None = None
    scene_path: Path | None = None
    model_path: Path | None = None
    corrections_path: Path | None = None
    # student id -> (stream_id, track_id); links log identities to tracks
    student_map: dict = field(default_factory=dict)

    def __post_init__(self):
        if not (self.fps > 0) or not math.isfinite(self.fps):
            raise SchemaViolation("fps", "must be > 0")
        ids = [s.stream_id for s in self.streams]
        if len(ids) != len(set(ids)):
            raise DuplicateStreamId(f"duplicate stream ids in {ids}")
        paths = [str(s.detections_path) for s in self.streams if s.detections_path]
        paths += [str(v.path) for v in self.video_files]
        for p in (self.log_path, self.scene_path):
            if p is not None:
                paths.append(str(p))
        if len(paths) != len(set(paths)):
            raise SchemaViolation("paths", "a referenced path is declared twice")

    def stream(self, stream_id: str) -> StreamSpec:
        for s in self.streams:
            if s.stream_id == stream_id:
                return s
        raise KeyError(stream_id)


@dataclass(frozen=True)
class DetectionRecord:
    """One face observation in one frame of one stream."""

    frame_index: int
    bbox: tuple[float, float, float, float]  # x_min, y_min, x_max, y_max
    valence: float
    arousal: float
    pitch: float | None = None
    yaw: float | None = None
    depth: float | None = None


def _intrinsics_from_dict(doc: dict) -> CameraIntrinsics:
    try:
        width = int(doc.get("image_width", 1920))
        height = int(doc.get("image_height", 1080))
        return CameraIntrinsics(
            fx=float(doc.get("fx", DEFAULT_FOCAL_PX)),
            fy=float(doc.get("fy", DEFAULT_FOCAL_PX)),
            cx=float(doc.get("cx", width / 2.0)),
            cy=float(doc.get("cy", height / 2.0)),
            image_width=width,
            image_height=height,
        )
    except (TypeError, ValueError) as exc:
        raise SchemaViolation("intrinsics", str(exc)) from exc


def intrinsics_to_dict(k: CameraIntrinsics) -> dict:
    return {
        "fx": k.fx, "fy": k.fy, "cx": k.cx, "cy": k.cy,
        "image_width": k.image_width, "image_height": k.image_height,
    }


def manifest_from_dict(doc: dict, base_dir: Path) -> SessionManifest:
    if not isinstance(doc, dict):
        raise SchemaViolation("manifest", "document must be a JSON object")
    if "session_id" not in doc or not isinstance(doc["session_id"], str):
        raise SchemaViolation("session_id", "required string field")
    fps = doc.get("fps", DEFAULT_FPS)
    if not isinstance(fps, (int, float)):
        raise SchemaViolation("fps", "must be a number")

    def resolve(p) -> Path:
        p = Path(p)
        return p if p.is_absolute() else base_dir / p

    streams = []
    for i, s in enumerate(doc.get("streams", [])):
        if not isinstance(s, dict) or "stream_id" not in s:
            raise SchemaViolation(f"streams[{i}]", "stream_id is required")
        intr = (
            _intrinsics_from_dict(s["intrinsics"])
            if "intrinsics" in s
            else default_intrinsics()
        )
        det = s.get("detections_path", f"detections_{s['stream_id']}.csv")
        try:
            offset = float(s.get("start_offset_seconds", 0.0))
        except (TypeError, ValueError) as exc:
            raise SchemaViolation(
                f"streams[{i}].start_offset_seconds", "must be a number"
            ) from exc
        streams.append(
            StreamSpec(
                stream_id=s["stream_id"],
                camera_id=s.get("camera_id", s["stream_id"]),
                start_offset_seconds=offset,
                intrinsics=intr,
                detections_path=resolve(det),
            )
        )

    videos = []
    for i, v in enumerate(doc.get("video_files", [])):
        if not isinstance(v, dict) or "camera_id" not in v or "path" not in v:
            raise SchemaViolation(f"video_files[{i}]", "camera_id and path required")
        videos.append(
            VideoFile(
                camera_id=v["camera_id"],
                path=resolve(v["path"]),
                start_offset_seconds=float(v.get("start_offset_seconds", 0.0)),
            )
        )

    student_map = doc.get("student_map", {})
    if not isinstance(student_map, dict):
        raise SchemaViolation("student_map", "must be an object")
    for sid, ref in student_map.items():
        if not isinstance(ref, dict) or "stream_id" not in ref or "track_id" not in ref:
            raise SchemaViolation(
                f"student_map.{sid}", "needs stream_id and track_id"
            )

    return SessionManifest(
        session_id=doc["session_id"],
        fps=float(fps),
        streams=tuple(streams),
        video_files=tuple(videos),
        log_path=resolve(doc["log_path"]) if "log_path" in doc else None,
        scene_path=resolve(doc["scene_path"]) if "scene_path" in doc else None,
        model_path=resolve(doc["model_path"]) if "model_path" in doc else None,
        corrections_path=(
            resolve(doc["corrections_path"]) if "corrections_path" in doc else None
        ),
        student_map=dict(student_map),
    )


def manifest_to_dict(m: SessionManifest) -> dict:
    """Serializable form; paths emitted as given (already resolved)."""
    doc: dict = {
        "session_id": m.session_id,
        "fps": m.fps,
        "streams": [
            {
                "stream_id": s.stream_id,
                "camera_id": s.camera_id,
                "start_offset_seconds": s.start_offset_seconds,
                "intrinsics": intrinsics_to_dict(s.intrinsics),
                "detections_path": str(s.detections_path),
            }
            for s in m.streams
        ],
        "video_files": [
            {
                "camera_id": v.camera_id,
                "path": str(v.path),
                "start_offset_seconds": v.start_offset_seconds,
            }
            for v in m.video_files
        ],
    }
    if m.log_path:
        doc["log_path"] = str(m.log_path)
    if m.scene_path:
        doc["scene_path"] = str(m.scene_path)
    if m.model_path:
        doc["model_path"] = str(m.model_path)
    if m.corrections_path:
        doc["corrections_path"] = str(m.corrections_path)
    if m.student_map:
        doc["student_map"] = m.student_map
    return doc


def load_manifest(path: str | Path) -> SessionManifest:
    path = Path(path)
    if not path.is_file():
        raise MissingFile(str(path))
    try:
        doc = json.loads(path.read_text(encoding="utf-8"))
    except json.JSONDecodeError as exc:
        raise SchemaViolation("manifest", f"invalid JSON: {exc}") from exc
    return manifest_from_dict(doc, path.parent.resolve())


@dataclass(frozen=True)
class ParseDiagnostic:
    line: int
    reason: str


def _parse_row(
    row: Sequence[str], line: int, has_gaze: bool
) -> DetectionRecord:
    expected = len(DETECTION_COLUMNS) + (len(GAZE_COLUMNS) if has_gaze else 0)
    if len(row) != expected:
        raise MalformedRow(line, f"expected {expected} fields, got {len(row)}")
    try:
        frame = int(row[0])
        x_min, y_min, x_max, y_max = (float(v) for v in row[1:5])
        valence = float(row[5])
        arousal = float(row[6])
    except ValueError as exc:
        raise MalformedRow(line, f"non-numeric field: {exc}") from exc
    if frame < 0:
        raise MalformedRow(line, "frame must be >= 0")
    if not (x_min < x_max and y_min < y_max):
        raise MalformedRow(line, "degenerate bbox")
    if not -1.0 <= valence <= 1.0:
        raise RangeViolation("valence", valence, line)
    if not -1.0 <= arousal <= 1.0:
        raise RangeViolation("arousal", arousal, line)

    pitch = yaw = depth = None
    if has_gaze:
        raw = [v.strip() for v in row[7:10]]
        present = [v != "" for v in raw]
        if any(present) and not all(present):
            raise MalformedRow(line, "pitch/yaw/depth must be present together")
        if all(present):
            try:
                pitch, yaw, depth = (float(v) for v in raw)
            except ValueError as exc:
                raise MalformedRow(line, f"non-numeric gaze field: {exc}") from exc
            if depth <= 0:
                raise RangeViolation("depth", depth, line)
    return DetectionRecord(
        frame_index=frame,
        bbox=(x_min, y_min, x_max, y_max),
        valence=valence,
        arousal=arousal,
        pitch=pitch,
        yaw=yaw,
        depth=depth,
    )


def parse_detections(
    stream,
    spec: StreamSpec,
    strict: bool = True,
) -> list[DetectionRecord] | tuple[list[DetectionRecord], list[ParseDiagnostic]]:
    """Parse a detection CSV.

    `stream` is a text or byte source (file object, bytes, or str). In strict
    mode the first invalid row raises; otherwise invalid rows are skipped and
    reported as diagnostics with their 1-based line numbers. Records are
    stably sorted by frame_index, so multiple faces in one frame keep their
    input order.
    """
    if isinstance(stream, (bytes, bytearray)):
        stream = io.StringIO(stream.decode("utf-8"))
    elif isinstance(stream, str):
        stream = io.StringIO(stream)
    elif isinstance(stream, io.BufferedIOBase) or (
        hasattr(stream, "mode") and "b" in getattr(stream, "mode", "")
    ):
        stream = io.TextIOWrapper(stream, encoding="utf-8")

    reader = csv.reader(stream)
    try:
        header = next(reader)
    except StopIteration:
        raise MalformedRow(1, "empty file: header row required") from None
    header = tuple(h.strip() for h in header)
    if header == DETECTION_COLUMNS:
        has_gaze = False
    elif header == DETECTION_COLUMNS + GAZE_COLUMNS:
        has_gaze = True
    else:
        raise MalformedRow(1, f"unexpected header {header!r}")

    records: list[DetectionRecord] = []
    diagnostics: list[ParseDiagnostic] = []
    for line, row in enumerate(reader, start=2):
        if not row:
            continue
        try:
            records.append(_parse_row(row, line, has_gaze))
        except (MalformedRow, RangeViolation) as exc:
            if strict:
                raise
            diagnostics.append(ParseDiagnostic(line, str(exc)))
    records.sort(key=lambda r: r.frame_index)  # stable: in-frame order kept
    if strict:
        return records
    return records, diagnostics


def load_detections(spec: StreamSpec, strict: bool = True):
    if spec.detections_path is None or not Path(spec.detections_path).is_file():
        raise MissingFile(str(spec.detections_path))
    with open(spec.detections_path, "r", encoding="utf-8", newline="") as fh:
        return parse_detections(fh, spec, strict=strict)


def frame_to_time(frame_index: int, spec: StreamSpec, manifest: SessionManifest) -> float:
    """Seconds since session epoch for a frame of the given stream."""
    if frame_index < 0:
        raise SchemaViolation("frame_index", "must be >= 0")
    return spec.start_offset_seconds + frame_index / manifest.fps


__all__ = [
    "CameraIntrinsics",
    "DetectionRecord",
    "ParseDiagnostic",
    "SessionManifest",
    "StreamSpec",
    "VideoFile",
    "default_intrinsics",
    "frame_to_time",
    "load_detections",
    "load_manifest",
    "load_scene",
    "manifest_from_dict",
    "manifest_to_dict",
    "parse_detections",
    "SceneModel",
]
