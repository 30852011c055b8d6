"""Deterministic synthetic-session generator.

Scripts student head trajectories, gaze targets, affect traces, presence
windows, and a simulation log, then emits a complete session fixture in the
ingest formats (manifest.json, scene.json, detections_<stream>.csv,
log.jsonl, model.json) plus ground_truth.json with the scripted identities,
per-frame objects of interest, pooled gaze windows, affect segments, and
metrics. Pitch/yaw are produced by inverting the exact direction formula the
gaze pipeline uses, so any convention drift breaks round-trip tests
immediately.
"""

from __future__ import annotations

import bisect
import json
import math
import random
from dataclasses import dataclass, field
from pathlib import Path

from .errors import BehindCamera, SpecViolation
from .gaze3d import angles_from_direction
from .ingest import CameraIntrinsics, default_intrinsics, intrinsics_to_dict
from .scene import Box, SceneModel, scene_from_dict, scene_to_dict
from .simlog import DEFAULT_MODEL

Vec3 = tuple[float, float, float]

DEFAULT_BBOX_PX = 60.0


def project(point: Vec3, k: CameraIntrinsics) -> tuple[float, float]:
    """Pinhole projection of a camera-frame point to pixels."""
    x, y, z = point
    if z <= 0:
        raise BehindCamera(f"z={z}")
    return (k.fx * x / z + k.cx, k.fy * y / z + k.cy)


@dataclass(frozen=True)
class AgentSpec:
    """One scripted student.

    Schedules are lists of [t0, t1, ...] entries covering [0, duration);
    gaze targets are a static OOI name, "person:<student_id>", an explicit
    {"dir": [x, y, z], "expect": name-or-None} entry, or None for frames
    without gaze data.
    """

    student_id: str
    waypoints: tuple[tuple[float, Vec3], ...]
    affect: tuple[tuple[float, float, float, float], ...]  # (t0, t1, v, a)
    gaze: tuple[tuple[float, float, object], ...] = ()
    presence: tuple[tuple[float, float], ...] | None = None  # None: always

    def position(self, t: float) -> Vec3:
        times = [w[0] for w in self.waypoints]
        i = bisect.bisect_right(times, t) - 1
        if i < 0:
            return self.waypoints[0][1]
        if i >= len(self.waypoints) - 1:
            return self.waypoints[-1][1]
        t0, p0 = self.waypoints[i]
        t1, p1 = self.waypoints[i + 1]
        if t1 <= t0:
            return p1
        a = (t - t0) / (t1 - t0)
        return tuple(p0[j] + a * (p1[j] - p0[j]) for j in range(3))

    def present(self, t: float) -> bool:
        if self.presence is None:
            return True
        return any(t0 <= t < t1 for t0, t1 in self.presence)

    def affect_at(self, t: float) -> tuple[float, float]:
        for t0, t1, v, a in self.affect:
            if t0 <= t < t1:
                return v, a
        return 0.0, 0.0

    def gaze_at(self, t: float):
        for t0, t1, target in self.gaze:
            if t0 <= t < t1:
                return target
        return None


@dataclass(frozen=True)
class ScenarioSpec:
    name: str
    duration: float
    students: tuple[AgentSpec, ...]
    scene: SceneModel
    seed: int = 0
    fps: float = 30.0
    noise_sigma_px: float = 0.0
    bbox_px: float = DEFAULT_BBOX_PX
    stream_id: str = "cam1"
    intrinsics: CameraIntrinsics = field(default_factory=default_intrinsics)
    log_events: tuple[dict, ...] = ()
    model: dict | None = None
    expected_metrics: dict | None = None       # student -> metric subset
    expected_affect: dict | None = None        # student -> [[t0, t1, label]]
    manifest_extra: dict = field(default_factory=dict)
    with_video_stub: bool = False

    def __post_init__(self):
        if self.duration <= 0 or self.fps <= 0:
            raise SpecViolation("duration and fps must be > 0")
        for agent in self.students:
            if not agent.waypoints:
                raise SpecViolation(f"{agent.student_id}: no waypoints")
            for _, pos in agent.waypoints:
                if pos[1] >= self.scene.floor_y:
                    raise SpecViolation(
                        f"{agent.student_id}: trajectory below floor"
                    )


def _normalize(v: Vec3) -> Vec3:
    n = math.sqrt(v[0] * v[0] + v[1] * v[1] + v[2] * v[2])
    if n == 0:
        raise SpecViolation("zero gaze direction")
    return (v[0] / n, v[1] / n, v[2] / n)


def _box_center(box: Box) -> Vec3:
    return tuple((box.min[i] + box.max[i]) / 2.0 for i in range(3))


@dataclass
class GeneratedFixture:
    directory: Path
    manifest_path: Path
    ground_truth: dict
    spec: ScenarioSpec


def _resolve_target(
    spec: ScenarioSpec, agent: AgentSpec, target, t: float, pos: Vec3
) -> tuple[Vec3 | None, str | None]:
    """(direction, expected OOI name) for one frame's scripted gaze."""
    if target is None:
        return None, None
    if isinstance(target, dict):
        direction = _normalize(tuple(float(c) for c in target["dir"]))
        return direction, target.get("expect")
    if isinstance(target, str):
        if target.startswith("person:"):
            other_id = target.split(":", 1)[1]
            other = next(
                (a for a in spec.students if a.student_id == other_id), None
            )
            if other is None:
                raise SpecViolation(f"gaze target {target!r}: unknown student")
            aim = other.position(t)
            # Aim slightly below the head so the ray enters the body volume.
            aim = (aim[0], aim[1] + spec.scene.head_margin, aim[2])
        else:
            aim = _box_center(spec.scene.ooi(target))
        direction = _normalize(tuple(aim[i] - pos[i] for i in range(3)))
        return direction, target
    raise SpecViolation(f"bad gaze target {target!r}")


def _window_mode(names: list[str | None]) -> str | None:
    counts: dict[str, int] = {}
    for n in names:
        if n is not None:
            counts[n] = counts.get(n, 0) + 1
    if not counts:
        return None
    best = max(counts.values())
    return min(n for n, c in counts.items() if c == best)


def _gt_gaze_segments(
    frames: list[int], names: dict[int, str | None], fps: float,
    window_frames: int = 150,
) -> list[list]:
    """Pool scripted per-frame targets into window segments (oracle side)."""
    if not frames:
        return []
    first, last = frames[0], frames[-1]
    segments: list[list] = []
    start = first
    while start <= last:
        end = min(start + window_frames, last + 1)
        mode = _window_mode([names.get(f) for f in range(start, end)])
        t0, t1 = start / fps, end / fps
        if segments and segments[-1][2] == mode:
            segments[-1][1] = t1
        else:
            segments.append([t0, t1, mode])
        start += window_frames
    return segments


def generate(spec: ScenarioSpec, out_dir: str | Path) -> GeneratedFixture:
    """Write the full fixture for a scenario; deterministic for a fixed seed."""
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    rng = random.Random(spec.seed)
    k = spec.intrinsics
    n_frames = round(spec.duration * spec.fps)
    half_box = spec.bbox_px / 2.0

    has_gaze = any(agent.gaze for agent in spec.students)
    header = "frame,x_min,y_min,x_max,y_max,valence,arousal"
    if has_gaze:
        header += ",pitch,yaw,depth"

    rows: list[str] = [header]
    identities: list[dict] = []
    gt_ooi: dict[str, dict[int, str | None]] = {a.student_id: {} for a in spec.students}
    frames_seen: dict[str, list[int]] = {a.student_id: [] for a in spec.students}
    first_seen: dict[str, int] = {}

    for f in range(n_frames):
        t = f / spec.fps
        for agent in spec.students:
            if not agent.present(t):
                continue
            pos = agent.position(t)
            u, v = project(pos, k)
            if spec.noise_sigma_px > 0:
                u += rng.gauss(0.0, spec.noise_sigma_px)
                v += rng.gauss(0.0, spec.noise_sigma_px)
            bbox = (u - half_box, v - half_box, u + half_box, v + half_box)
            valence, arousal = agent.affect_at(t)
            target = agent.gaze_at(t)
            direction, expect = _resolve_target(spec, agent, target, t, pos)

            cells = [str(f)] + [repr(c) for c in bbox] + [repr(valence), repr(arousal)]
            if has_gaze:
                if direction is None:
                    cells += ["", "", ""]
                else:
                    pitch, yaw = angles_from_direction(direction)
                    cells += [repr(pitch), repr(yaw), repr(pos[2])]
            rows.append(",".join(cells))

            identities.append(
                {"frame": f, "bbox": list(bbox), "student": agent.student_id}
            )
            gt_ooi[agent.student_id][f] = expect
            frames_seen[agent.student_id].append(f)
            first_seen.setdefault(agent.student_id, f)

    det_path = out / f"detections_{spec.stream_id}.csv"
    det_path.write_text("\n".join(rows) + "\n", encoding="utf-8")

    (out / "scene.json").write_text(
        json.dumps(scene_to_dict(spec.scene), indent=2) + "\n", encoding="utf-8"
    )

    log_path = out / "log.jsonl"
    log_path.write_text(
        "".join(json.dumps(e) + "\n" for e in spec.log_events), encoding="utf-8"
    )

    model = spec.model or DEFAULT_MODEL
    (out / "model.json").write_text(json.dumps(model, indent=2) + "\n", encoding="utf-8")

    # Track ids follow first appearance order, matching the tracker's minting.
    order = sorted(first_seen, key=lambda s: (first_seen[s], _spec_index(spec, s)))
    student_map = {
        sid: {"stream_id": spec.stream_id, "track_id": i + 1}
        for i, sid in enumerate(order)
    }

    manifest: dict = {
        "session_id": spec.name,
        "fps": spec.fps,
        "streams": [
            {
                "stream_id": spec.stream_id,
                "camera_id": spec.stream_id,
                "start_offset_seconds": 0.0,
                "intrinsics": intrinsics_to_dict(k),
                "detections_path": det_path.name,
            }
        ],
        "video_files": [],
        "log_path": "log.jsonl",
        "scene_path": "scene.json",
        "model_path": "model.json",
    }
    if student_map:
        manifest["student_map"] = student_map
    if spec.with_video_stub:
        video_path = out / f"{spec.stream_id}.mp4"
        video_path.write_bytes(bytes(range(256)) * 400)
        manifest["video_files"] = [
            {"camera_id": spec.stream_id, "path": video_path.name,
             "start_offset_seconds": 0.0}
        ]
    manifest.update(spec.manifest_extra)
    (out / "manifest.json").write_text(
        json.dumps(manifest, indent=2) + "\n", encoding="utf-8"
    )

    ground_truth = {
        "duration": spec.duration,
        "identities": identities,
        "ooi": {
            sid: [[f, name] for f, name in sorted(per.items())]
            for sid, per in gt_ooi.items()
        },
        "gaze_segments": {
            sid: _gt_gaze_segments(frames_seen[sid], gt_ooi[sid], spec.fps)
            for sid in gt_ooi
        },
        "student_map": student_map,
    }
    if spec.expected_affect is not None:
        ground_truth["affect_segments"] = spec.expected_affect
    if spec.expected_metrics is not None:
        ground_truth["metrics"] = spec.expected_metrics
    (out / "ground_truth.json").write_text(
        json.dumps(ground_truth, indent=2) + "\n", encoding="utf-8"
    )

    (out / "scenario.json").write_text(
        json.dumps(spec_to_dict(spec), indent=2) + "\n", encoding="utf-8"
    )
    return GeneratedFixture(out, out / "manifest.json", ground_truth, spec)


def _spec_index(spec: ScenarioSpec, student_id: str) -> int:
    for i, a in enumerate(spec.students):
        if a.student_id == student_id:
            return i
    return len(spec.students)


def ground_truth_by_frame(ground_truth: dict) -> dict[int, list[tuple[str, list[float]]]]:
    """Reshape identities for reid.evaluate_tracking."""
    by_frame: dict[int, list[tuple[str, list[float]]]] = {}
    for entry in ground_truth["identities"]:
        by_frame.setdefault(entry["frame"], []).append(
            (entry["student"], entry["bbox"])
        )
    return by_frame


# -- scenario.json (de)serialization ------------------------------------------

def spec_to_dict(spec: ScenarioSpec) -> dict:
    return {
        "name": spec.name,
        "seed": spec.seed,
        "duration": spec.duration,
        "fps": spec.fps,
        "noise_sigma_px": spec.noise_sigma_px,
        "bbox_px": spec.bbox_px,
        "stream_id": spec.stream_id,
        "intrinsics": intrinsics_to_dict(spec.intrinsics),
        "scene": scene_to_dict(spec.scene),
        "students": [
            {
                "student_id": a.student_id,
                "waypoints": [[t, list(p)] for t, p in a.waypoints],
                "affect": [list(entry) for entry in a.affect],
                "gaze": [list(entry) for entry in a.gaze],
                "presence": None if a.presence is None else [list(w) for w in a.presence],
            }
            for a in spec.students
        ],
        "log_events": list(spec.log_events),
        "model": spec.model,
        "expected_metrics": spec.expected_metrics,
        "expected_affect": spec.expected_affect,
        "manifest_extra": spec.manifest_extra,
        "with_video_stub": spec.with_video_stub,
    }


def spec_from_dict(doc: dict) -> ScenarioSpec:
    try:
        students = tuple(
            AgentSpec(
                student_id=a["student_id"],
                waypoints=tuple((float(t), tuple(float(c) for c in p)) for t, p in a["waypoints"]),
                affect=tuple(tuple(entry) for entry in a.get("affect", [])),
                gaze=tuple(tuple(entry) for entry in a.get("gaze", [])),
                presence=(
                    None if a.get("presence") is None
                    else tuple(tuple(w) for w in a["presence"])
                ),
            )
            for a in doc.get("students", [])
        )
        intr = doc.get("intrinsics")
        return ScenarioSpec(
            name=doc["name"],
            seed=int(doc.get("seed", 0)),
            duration=float(doc["duration"]),
            fps=float(doc.get("fps", 30.0)),
            noise_sigma_px=float(doc.get("noise_sigma_px", 0.0)),
            bbox_px=float(doc.get("bbox_px", DEFAULT_BBOX_PX)),
            stream_id=doc.get("stream_id", "cam1"),
            intrinsics=(
                default_intrinsics()
                if intr is None
                else CameraIntrinsics(
                    fx=intr["fx"], fy=intr["fy"], cx=intr["cx"], cy=intr["cy"],
                    image_width=intr["image_width"], image_height=intr["image_height"],
                )
            ),
            scene=scene_from_dict(doc["scene"]),
            students=students,
            log_events=tuple(doc.get("log_events", [])),
            model=doc.get("model"),
            expected_metrics=doc.get("expected_metrics"),
            expected_affect=doc.get("expected_affect"),
            manifest_extra=doc.get("manifest_extra", {}),
            with_video_stub=bool(doc.get("with_video_stub", False)),
        )
    except (KeyError, TypeError, ValueError) as exc:
        raise SpecViolation(f"bad scenario spec: {exc}") from exc


def load_scenario(path: str | Path) -> ScenarioSpec:
    return spec_from_dict(json.loads(Path(path).read_text(encoding="utf-8")))
