"""Batch pipeline driver and on-disk session store.

process_session composes ingest -> tracking -> affect/gaze -> log analysis,
then persists every artifact plus a native-resolution timeline cache into a
per-session directory. Publication is atomic: artifacts are staged in a
temporary directory and renamed into place, and a session is only served
once its completion marker exists.
"""

from __future__ import annotations

import json
import os
import shutil
from dataclasses import dataclass
from pathlib import Path

from . import affect as affect_mod
from . import gaze3d, simlog, timeline as tl
from .errors import SchemaViolation
from .ingest import (
    SessionManifest,
    StreamSpec,
    frame_to_time,
    load_detections,
    load_manifest,
)
from .reid import (
    Track,
    TrackerParams,
    dump_tracks_jsonl,
    group_by_frame,
    load_corrections,
    run_tracker,
)
from .scene import load_scene

COMPLETE_MARKER = "COMPLETE"


def _tracker_params(manifest_doc: dict) -> TrackerParams:
    cfg = manifest_doc.get("tracker", {})
    return TrackerParams(
        distance_threshold_px=float(
            cfg.get("distance_threshold_px", TrackerParams().distance_threshold_px)
        ),
        memory_frames=int(cfg.get("memory_frames", TrackerParams().memory_frames)),
        max_tracks=cfg.get("max_tracks"),
    )


def _affect_thresholds(manifest_doc: dict) -> affect_mod.AffectThresholds:
    cfg = manifest_doc.get("affect", {})
    defaults = affect_mod.AffectThresholds()
    return affect_mod.AffectThresholds(
        neutral_radius=float(cfg.get("neutral_radius", defaults.neutral_radius)),
        delight_arousal_min=float(
            cfg.get("delight_arousal_min", defaults.delight_arousal_min)
        ),
        frustration_arousal_min=float(
            cfg.get("frustration_arousal_min", defaults.frustration_arousal_min)
        ),
        window_frames=int(cfg.get("window_frames", defaults.window_frames)),
        sustain_frames=int(cfg.get("sustain_frames", defaults.sustain_frames)),
        delight_sustain_frames=int(
            cfg.get("delight_sustain_frames", defaults.delight_sustain_frames)
        ),
        notfound_fraction=float(
            cfg.get("notfound_fraction", defaults.notfound_fraction)
        ),
        quadrants_only=bool(cfg.get("quadrants_only", defaults.quadrants_only)),
    )


def track_key(stream_id: str, track_id: int) -> str:
    return f"{stream_id}.{track_id}"


@dataclass
class ProcessedSession:
    manifest: SessionManifest
    duration: float
    timeline: tl.Timeline
    metrics: dict
    tracks_by_stream: dict[str, list[Track]]
    student_of_track: dict[tuple[str, int], str]


def _student_names(
    manifest: SessionManifest,
    tracks_by_stream: dict[str, list[Track]],
    log_students: list[str],
) -> dict[tuple[str, int], str]:
    mapping: dict[tuple[str, int], str] = {}
    for student, ref in manifest.student_map.items():
        mapping[(ref["stream_id"], int(ref["track_id"]))] = student
    for stream_id, tracks in tracks_by_stream.items():
        for t in tracks:
            mapping.setdefault(
                (stream_id, t.track_id), track_key(stream_id, t.track_id)
            )
    return mapping


def analyze_session(manifest: SessionManifest, manifest_doc: dict) -> ProcessedSession:
    """Run every analysis stage; pure function of the referenced inputs."""
    tracker_params = _tracker_params(manifest_doc)
    thresholds = _affect_thresholds(manifest_doc)

    scene = load_scene(manifest.scene_path) if manifest.scene_path else None
    events = simlog.load_log(manifest.log_path) if manifest.log_path else []
    model = (
        simlog.load_model(manifest.model_path)
        if manifest.model_path
        else simlog.default_model()
    )
    corrections = (
        load_corrections(manifest.corrections_path)
        if manifest.corrections_path
        else None
    )

    tracks_by_stream: dict[str, list[Track]] = {}
    for spec in manifest.streams:
        records = load_detections(spec)
        tracks_by_stream[spec.stream_id] = run_tracker(
            group_by_frame(records), tracker_params, corrections
        )

    log_students = simlog.students_in(events)
    student_of_track = _student_names(manifest, tracks_by_stream, log_students)

    duration = simlog.session_end(events)
    for spec in manifest.streams:
        for t in tracks_by_stream[spec.stream_id]:
            duration = max(duration, frame_to_time(t.last_frame + 1, spec, manifest))

    lanes_by_student: dict[str, dict[str, tl.Lane]] = {}

    def lane_slot(student: str) -> dict[str, tl.Lane]:
        return lanes_by_student.setdefault(student, {})

    # Log-derived lanes.
    outcomes = simlog.validate_transitions(events, model)
    metrics: dict[str, dict] = {}
    for student in log_students:
        intervals = simlog.state_intervals(events, student, end=duration)
        if intervals:
            lane_slot(student)["state"] = tl.Lane(
                "state",
                student,
                segments=tuple(tl.Segment(a, b, m) for a, b, m in intervals),
            )
            metrics[student] = simlog.compute_metrics(
                intervals,
                [o for o in outcomes if o.student_id == student],
                model,
            ).to_dict()
        markers = []
        for e in events:
            if e.student_id != student:
                continue
            if e.kind == "avatar_change":
                markers.append(tl.Marker(e.time, f"avatar:{e.molecule}"))
            elif e.kind == "zone_enter":
                markers.append(tl.Marker(e.time, f"zone:{e.zone}"))
        for o in outcomes:
            if o.student_id == student:
                markers.append(
                    tl.Marker(o.time, f"{o.from_molecule}->{o.to_molecule}:{o.outcome}")
                )
        if markers:
            markers.sort(key=lambda m: m.time)
            lane_slot(student)["actions"] = tl.Lane(
                "actions", student, markers=tuple(markers)
            )

    system_lane = None
    if events:
        system_lane = tl.Lane(
            "system",
            None,
            segments=tuple(
                tl.Segment(a, b, s)
                for a, b, s in simlog.system_state_lane(events, end=duration)
            ),
        )

    # Vision-derived lanes.
    for spec in manifest.streams:
        tracks = tracks_by_stream[spec.stream_id]
        hits = (
            gaze3d.encode_session(tracks, scene, spec.intrinsics)
            if scene is not None
            else {}
        )
        for t in tracks:
            student = student_of_track[(spec.stream_id, t.track_id)]
            segs = affect_mod.affect_lane(t, manifest, spec, thresholds)
            if segs:
                lane_slot(student)["affect"] = tl.Lane(
                    "affect",
                    student,
                    segments=tuple(
                        tl.Segment(s.start_time, s.end_time, s.label.value)
                        for s in segs
                    ),
                )
            if scene is not None:
                gsegs = gaze3d.gaze_lane(
                    t, hits.get(t.track_id, {}), manifest, spec,
                    window_frames=thresholds.window_frames,
                )
                if gsegs:
                    lane_slot(student)["gaze"] = tl.Lane(
                        "gaze",
                        student,
                        segments=tuple(
                            tl.Segment(
                                s.start_time,
                                s.end_time,
                                _rename_person(
                                    s.ooi_name, spec.stream_id, student_of_track
                                ),
                            )
                            for s in gsegs
                        ),
                    )

    built = tl.build_timeline(
        manifest.session_id, duration, lanes_by_student, system_lane
    )
    return ProcessedSession(
        manifest=manifest,
        duration=duration,
        timeline=built,
        metrics=metrics,
        tracks_by_stream=tracks_by_stream,
        student_of_track=student_of_track,
    )


def _rename_person(
    ooi_name: str | None,
    stream_id: str,
    student_of_track: dict[tuple[str, int], str],
) -> str | None:
    """Rewrite person:<track_id> hits to person:<student_id> where mapped."""
    if ooi_name is None or not ooi_name.startswith("person:"):
        return ooi_name
    tid = int(ooi_name.split(":", 1)[1])
    return f"person:{student_of_track.get((stream_id, tid), tid)}"


def metrics_document(metrics: dict) -> str:
    return tl.canonical_json({sid: metrics[sid] for sid in sorted(metrics)}) + "\n"


def process_session(
    manifest_path: str | Path, root: str | Path
) -> Path:
    """Process one session into <root>/<session_id>; atomic and idempotent."""
    manifest_path = Path(manifest_path)
    root = Path(root)
    root.mkdir(parents=True, exist_ok=True)
    manifest = load_manifest(manifest_path)
    manifest_doc = json.loads(manifest_path.read_text(encoding="utf-8"))
    session_id = manifest.session_id

    lock_path = root / f"{session_id}.lock"
    try:
        lock_fd = os.open(lock_path, os.O_CREAT | os.O_EXCL | os.O_WRONLY)
    except FileExistsError:
        raise SchemaViolation(
            "session", f"{session_id} is already being processed (lock present)"
        ) from None
    try:
        result = analyze_session(manifest, manifest_doc)

        staging = root / f".staging-{session_id}-{os.getpid()}"
        if staging.exists():
            shutil.rmtree(staging)
        staging.mkdir(parents=True)

        (staging / "manifest.json").write_text(
            json.dumps(
                dict(manifest_doc, **{"_resolved_base": str(manifest_path.parent.resolve())}),
                indent=2,
            )
            + "\n",
            encoding="utf-8",
        )
        with open(staging / "tracks.jsonl", "w", encoding="utf-8") as fh:
            for spec in manifest.streams:
                dump_tracks_jsonl(
                    result.tracks_by_stream[spec.stream_id], spec.stream_id, fh
                )
        for lane in result.timeline.lanes:
            if lane.lane_id == "affect":
                name = f"affect_{_safe(lane.student_id)}.jsonl"
                _dump_segments(staging / name, lane)
            elif lane.lane_id == "gaze":
                name = f"gaze_{_safe(lane.student_id)}.jsonl"
                _dump_segments(staging / name, lane)
        (staging / "metrics.json").write_text(
            metrics_document(result.metrics), encoding="utf-8"
        )
        (staging / "timeline.json").write_text(
            tl.serialize(result.timeline), encoding="utf-8"
        )
        (staging / COMPLETE_MARKER).write_text("", encoding="utf-8")

        final = root / session_id
        if final.exists():
            trash = root / f".trash-{session_id}-{os.getpid()}"
            if trash.exists():
                shutil.rmtree(trash)
            os.rename(final, trash)
            os.rename(staging, final)
            shutil.rmtree(trash)
        else:
            os.rename(staging, final)
        return final
    finally:
        os.close(lock_fd)
        lock_path.unlink(missing_ok=True)


def _safe(name: str | None) -> str:
    return "".join(c if c.isalnum() or c in "-_." else "_" for c in (name or ""))


def _dump_segments(path: Path, lane: tl.Lane) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        for seg in lane.segments:
            key = "label" if lane.lane_id == "affect" else "ooi"
            fh.write(
                json.dumps({"start": seg.start, "end": seg.end, key: seg.label}) + "\n"
            )


class SessionStore:
    """Read side of the per-session artifact directory."""

    def __init__(self, root: str | Path):
        self.root = Path(root)
        self._timeline_cache: dict[str, tuple[float, tl.Timeline]] = {}

    def list_sessions(self) -> list[str]:
        if not self.root.is_dir():
            return []
        return sorted(
            p.name
            for p in self.root.iterdir()
            if p.is_dir() and (p / COMPLETE_MARKER).exists()
        )

    def session_dir(self, session_id: str) -> Path | None:
        p = self.root / session_id
        if p.is_dir() and (p / COMPLETE_MARKER).exists():
            return p
        return None

    def timeline(self, session_id: str) -> tl.Timeline | None:
        p = self.session_dir(session_id)
        if p is None:
            return None
        path = p / "timeline.json"
        if not path.is_file():
            return None
        mtime = path.stat().st_mtime_ns
        cached = self._timeline_cache.get(session_id)
        if cached and cached[0] == mtime:
            return cached[1]
        parsed = tl.parse(path.read_text(encoding="utf-8"))
        self._timeline_cache[session_id] = (mtime, parsed)
        return parsed

    def metrics_bytes(self, session_id: str) -> bytes | None:
        p = self.session_dir(session_id)
        if p is None:
            return None
        path = p / "metrics.json"
        return path.read_bytes() if path.is_file() else None

    def manifest_doc(self, session_id: str) -> dict | None:
        p = self.session_dir(session_id)
        if p is None:
            return None
        path = p / "manifest.json"
        if not path.is_file():
            return None
        return json.loads(path.read_text(encoding="utf-8"))

    def video_path(self, session_id: str, camera_id: str) -> Path | None:
        doc = self.manifest_doc(session_id)
        if doc is None:
            return None
        base = Path(doc.get("_resolved_base", "."))
        for v in doc.get("video_files", []):
            if v.get("camera_id") == camera_id:
                p = Path(v["path"])
                return p if p.is_absolute() else base / p
        return None
