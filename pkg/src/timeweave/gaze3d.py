"""Per-frame gaze-to-object encoding.

Pitch/yaw become a unit direction, the face centroid plus depth become a 3D
origin, dynamic person volumes are stood up between head height and the
floor, and the gaze ray is traced against everything; 5-second windows then
pool per-frame hits by mode. Camera frame: +X right, +Y down, +Z into the
scene; a subject looking straight into the camera has direction (0, 0, -1).
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable, Mapping, Sequence

from .errors import NonFiniteInput, NonPositiveDepth, OriginBelowFloor
from .ingest import CameraIntrinsics, SessionManifest, StreamSpec, frame_to_time
from .reid import Track, centroid
from .scene import Box, SceneModel

#: Hits closer than this along the ray are ignored (the caster's own head).
SELF_HIT_EPSILON = 0.3

Vec3 = tuple[float, float, float]


@dataclass(frozen=True)
class GazePose:
    """Rotation + translation of one gaze sample, with its ray direction."""

    rotation: tuple[Vec3, Vec3, Vec3]
    translation: Vec3
    direction: Vec3


@dataclass(frozen=True)
class OOIHit:
    track_id: int
    frame_index: int
    ooi_name: str | None  # None: face missing or ray missed everything


def gaze_direction(pitch: float, yaw: float) -> Vec3:
    if not (math.isfinite(pitch) and math.isfinite(yaw)):
        raise NonFiniteInput(f"pitch={pitch}, yaw={yaw}")
    cp = math.cos(pitch)
    return (-cp * math.sin(yaw), -math.sin(pitch), -cp * math.cos(yaw))


def angles_from_direction(direction: Vec3) -> tuple[float, float]:
    """Inverse of gaze_direction for unit vectors (used by the simulator)."""
    dx, dy, dz = direction
    pitch = math.asin(max(-1.0, min(1.0, -dy)))
    yaw = math.atan2(-dx, -dz)
    return pitch, yaw


def rotation_from_angles(pitch: float, yaw: float) -> tuple[Vec3, Vec3, Vec3]:
    """Row-major R = Ry(yaw) @ Rx(-pitch); R @ (0,0,-1) equals gaze_direction."""
    cp, sp = math.cos(pitch), math.sin(pitch)
    cy, sy = math.cos(yaw), math.sin(yaw)
    return (
        (cy, -sy * sp, sy * cp),
        (0.0, cp, sp),
        (-sy, -cy * sp, cy * cp),
    )


def gaze_pose(
    pitch: float, yaw: float, origin: Vec3
) -> GazePose:
    return GazePose(
        rotation=rotation_from_angles(pitch, yaw),
        translation=origin,
        direction=gaze_direction(pitch, yaw),
    )


def back_project(
    centroid_px: tuple[float, float], depth: float, k: CameraIntrinsics
) -> Vec3:
    if depth <= 0:
        raise NonPositiveDepth(f"depth={depth}")
    u, v = centroid_px
    return ((u - k.cx) * depth / k.fx, (v - k.cy) * depth / k.fy, depth)


def person_volume(origin: Vec3, scene: SceneModel, track_id: int | None = None) -> Box:
    """Axis-aligned body volume hung from a head position down to the floor."""
    ox, oy, oz = origin
    if oy >= scene.floor_y:
        raise OriginBelowFloor(f"origin y={oy} not above floor y={scene.floor_y}")
    half = scene.person_width / 2.0
    name = f"person:{track_id}" if track_id is not None else "person"
    return Box(
        name,
        (ox - half, oy - scene.head_margin, oz - half),
        (ox + half, scene.floor_y, oz + half),
    )


def ray_box_interval(
    origin: Vec3, direction: Vec3, box: Box
) -> tuple[float, float] | None:
    """[entry, exit] ray parameters through an AABB; None when it misses.

    Standard slab test; degenerate (zero-thickness) axes work out of the
    box, and a zero direction component outside its slab is a miss.
    """
    tmin = -math.inf
    tmax = math.inf
    bmin = box.min
    bmax = box.max
    for axis in range(3):
        o = origin[axis]
        d = direction[axis]
        if d == 0.0:
            if o < bmin[axis] or o > bmax[axis]:
                return None
            continue
        t1 = (bmin[axis] - o) / d
        t2 = (bmax[axis] - o) / d
        if t1 > t2:
            t1, t2 = t2, t1
        if t1 > tmin:
            tmin = t1
        if t2 < tmax:
            tmax = t2
        if tmin > tmax:
            return None
    return tmin, tmax


def ray_cast(
    origin: Vec3,
    direction: Vec3,
    scene: SceneModel,
    others: Sequence[tuple[int, Box]] = (),
    epsilon: float = SELF_HIT_EPSILON,
) -> str | None:
    """Name of the nearest object the gaze ray hits beyond epsilon, if any.

    Candidates are the scene's static OOIs and the supplied other-person
    volumes (the caster's own volume must not be passed in). A ray starting
    inside a candidate counts as hitting it at the epsilon cutoff.
    """
    best_s = math.inf
    best_name = None
    for name, box in _candidates(scene, others):
        interval = ray_box_interval(origin, direction, box)
        if interval is None:
            continue
        entry, exit_ = interval
        if exit_ <= epsilon:
            continue  # entirely behind the cutoff
        s = entry if entry > epsilon else epsilon
        if s < best_s or (s == best_s and best_name is not None and name < best_name):
            best_s = s
            best_name = name
    return best_name


def _candidates(
    scene: SceneModel, others: Sequence[tuple[int, Box]]
) -> Iterable[tuple[str, Box]]:
    for b in scene.static_oois:
        yield b.name, b
    for tid, box in others:
        yield f"person:{tid}", box


@dataclass(frozen=True)
class FrameGaze:
    """One track's gaze inputs at one frame (None fields = not available)."""

    track_id: int
    origin: Vec3 | None
    direction: Vec3 | None


def encode_frame(
    frame_index: int,
    gazes: Sequence[FrameGaze],
    scene: SceneModel,
) -> list[OOIHit]:
    """Resolve every track's OOI for one frame.

    Person volumes are built for every track with a known origin; each track
    with a direction is then ray-cast against the scene plus the *other*
    tracks' volumes. Tracks without a face this frame yield a None hit.
    """
    volumes: dict[int, Box] = {}
    for g in gazes:
        if g.origin is not None:
            volumes[g.track_id] = person_volume(g.origin, scene, g.track_id)
    hits = []
    for g in gazes:
        name = None
        if g.origin is not None and g.direction is not None:
            others = [
                (tid, box) for tid, box in volumes.items() if tid != g.track_id
            ]
            name = ray_cast(g.origin, g.direction, scene, others)
        hits.append(OOIHit(g.track_id, frame_index, name))
    return hits


def encode_session(
    tracks: Sequence[Track],
    scene: SceneModel,
    intrinsics: CameraIntrinsics,
) -> dict[int, dict[int, str | None]]:
    """Per-frame OOI names for every track, one scene pass per frame."""
    by_frame: dict[int, list[tuple[int, object]]] = {}
    for t in tracks:
        for frame, det in t.history:
            by_frame.setdefault(frame, []).append((t.track_id, det))

    results: dict[int, dict[int, str | None]] = {t.track_id: {} for t in tracks}
    for frame in sorted(by_frame):
        gazes = []
        for tid, det in by_frame[frame]:
            origin = direction = None
            if det.depth is not None:
                origin = back_project(centroid(det.bbox), det.depth, intrinsics)
                if det.pitch is not None and det.yaw is not None:
                    direction = gaze_direction(det.pitch, det.yaw)
            gazes.append(FrameGaze(tid, origin, direction))
        for hit in encode_frame(frame, gazes, scene):
            results[hit.track_id][frame] = hit.ooi_name
    return results


def pool_ooi(hits: Sequence[str | None]) -> str | None:
    """Predominant present OOI in a window; lexicographic tie-break."""
    counts: dict[str, int] = {}
    for name in hits:
        if name is not None:
            counts[name] = counts.get(name, 0) + 1
    if not counts:
        return None
    best = max(counts.values())
    return min(name for name, n in counts.items() if n == best)


@dataclass(frozen=True)
class GazeSegment:
    track_id: int
    start_time: float
    end_time: float
    ooi_name: str | None


def gaze_lane(
    track: Track,
    frame_hits: Mapping[int, str | None],
    manifest: SessionManifest,
    stream: StreamSpec,
    window_frames: int = 150,
) -> list[GazeSegment]:
    """Window per-frame hits into merged gaze segments (same tiling as affect)."""
    from .affect import track_windows  # same window arithmetic

    if not track.history:
        return []
    segments: list[GazeSegment] = []
    for start, end in track_windows(track, window_frames):
        window = [frame_hits.get(f) for f in range(start, end)]
        name = pool_ooi(window)
        seg = GazeSegment(
            track_id=track.track_id,
            start_time=frame_to_time(start, stream, manifest),
            end_time=frame_to_time(end, stream, manifest),
            ooi_name=name,
        )
        if segments and segments[-1].ooi_name == seg.ooi_name:
            prev = segments[-1]
            segments[-1] = GazeSegment(
                prev.track_id, prev.start_time, seg.end_time, prev.ooi_name
            )
        else:
            segments.append(seg)
    return segments
