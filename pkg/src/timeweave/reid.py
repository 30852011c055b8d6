"""Re-identification of students across frames from bounding boxes alone.

Nearest-centroid matching: candidate (track, detection) pairs within a pixel
distance threshold are taken greedily in ascending distance order. Unmatched
tracks coast on their last known center for up to `memory_frames` frames
before retiring, which carries identities through short occlusions.
Deterministic by construction: distance ties break on lower detection index,
then lower track id.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Mapping, Sequence

from .errors import EmptyGroundTruth, FrameOrderViolation, SchemaViolation
from .ingest import DetectionRecord

DEFAULT_DISTANCE_THRESHOLD_PX = 75.0
DEFAULT_MEMORY_FRAMES = 30


@dataclass(frozen=True)
class TrackerParams:
    distance_threshold_px: float = DEFAULT_DISTANCE_THRESHOLD_PX
    memory_frames: int = DEFAULT_MEMORY_FRAMES
    max_tracks: int | None = None

    def __post_init__(self):
        if self.distance_threshold_px <= 0:
            raise SchemaViolation("distance_threshold_px", "must be > 0")
        if self.memory_frames < 0:
            raise SchemaViolation("memory_frames", "must be >= 0")


@dataclass
class Track:
    track_id: int
    last_center: tuple[float, float]
    last_seen_frame: int
    coasting: bool = False
    history: list[tuple[int, DetectionRecord]] = field(default_factory=list)

    @property
    def first_frame(self) -> int:
        return self.history[0][0]

    @property
    def last_frame(self) -> int:
        return self.history[-1][0]


def centroid(bbox: Sequence[float]) -> tuple[float, float]:
    x_min, y_min, x_max, y_max = bbox
    return ((x_min + x_max) / 2.0, (y_min + y_max) / 2.0)


def _distance(a: tuple[float, float], b: tuple[float, float]) -> float:
    return math.hypot(a[0] - b[0], a[1] - b[1])


class _TrackerState:
    """Mutable scan state shared by track_step/run_tracker."""

    def __init__(self, params: TrackerParams):
        self.params = params
        self.active: list[Track] = []
        self.retired: list[Track] = []
        self.next_id = 1

    def mint_id(self) -> int:
        tid = self.next_id
        self.next_id += 1
        return tid


def track_step(
    tracks: list[Track],
    detections: Sequence[DetectionRecord],
    frame: int,
    params: TrackerParams,
    forced: Mapping[int, int] | None = None,
    _state: _TrackerState | None = None,
) -> tuple[dict[int, int], list[Track]]:
    """Assign one frame of detections to tracks, in place.

    Returns ({detection index -> track id}, updated active tracks). Tracks
    that exceed the memory window are dropped from the active list (collected
    in `_state.retired` when a state object is supplied). `forced` maps
    detection indexes to manually corrected track ids and wins over matching.
    """
    state = _state or _TrackerState(params)
    if _state is None:
        state.active = tracks
        state.next_id = max((t.track_id for t in tracks), default=0) + 1

    for det in detections:
        if det.frame_index != frame:
            raise FrameOrderViolation(
                f"detection frame {det.frame_index} != step frame {frame}"
            )
    for t in state.active:
        if frame <= t.last_seen_frame:
            raise FrameOrderViolation(
                f"frame {frame} not after track {t.track_id} (seen {t.last_seen_frame})"
            )

    # Retire tracks that have coasted past the memory window.
    survivors = []
    for t in state.active:
        if frame - t.last_seen_frame > params.memory_frames:
            t.coasting = False
            state.retired.append(t)
        else:
            survivors.append(t)
    state.active = survivors

    assignments: dict[int, int] = {}
    matched_tracks: set[int] = set()
    by_id = {t.track_id: t for t in state.active}

    def assign(det_idx: int, track: Track):
        det = detections[det_idx]
        track.last_center = centroid(det.bbox)
        track.last_seen_frame = frame
        track.coasting = False
        track.history.append((frame, det))
        assignments[det_idx] = track.track_id
        matched_tracks.add(track.track_id)

    # Manual corrections first; they may revive a retired track or mint
    # the given id outright.
    if forced:
        for det_idx in sorted(forced):
            tid = forced[det_idx]
            if det_idx in assignments or det_idx >= len(detections):
                raise SchemaViolation(
                    "corrections", f"bad detection index {det_idx} at frame {frame}"
                )
            track = by_id.get(tid)
            if track is None:
                for r in state.retired:
                    if r.track_id == tid:
                        track = r
                        state.retired.remove(r)
                        state.active.append(r)
                        by_id[tid] = r
                        break
            if track is None:
                track = Track(tid, centroid(detections[det_idx].bbox), frame - 1)
                state.active.append(track)
                by_id[tid] = track
                state.next_id = max(state.next_id, tid + 1)
            if track.track_id in matched_tracks:
                raise SchemaViolation(
                    "corrections", f"track {tid} forced twice at frame {frame}"
                )
            assign(det_idx, track)

    # Greedy global matching over remaining pairs, ascending distance.
    pairs = []
    for det_idx, det in enumerate(detections):
        if det_idx in assignments:
            continue
        c = centroid(det.bbox)
        for t in state.active:
            if t.track_id in matched_tracks:
                continue
            d = _distance(c, t.last_center)
            if d <= params.distance_threshold_px:
                pairs.append((d, det_idx, t.track_id))
    pairs.sort()
    for d, det_idx, tid in pairs:
        if det_idx in assignments or tid in matched_tracks:
            continue
        assign(det_idx, by_id[tid])

    # Spawn new tracks for leftover detections.
    for det_idx, det in enumerate(detections):
        if det_idx in assignments:
            continue
        if params.max_tracks is not None and (
            len(state.active) >= params.max_tracks
        ):
            continue
        track = Track(state.mint_id(), centroid(det.bbox), frame)
        track.history.append((frame, det))
        state.active.append(track)
        by_id[track.track_id] = track
        assignments[det_idx] = track.track_id
        matched_tracks.add(track.track_id)

    # Remaining tracks coast until their memory runs out.
    for t in state.active:
        if t.track_id not in matched_tracks:
            t.coasting = True

    return assignments, state.active


def run_tracker(
    frames: Iterable[tuple[int, Sequence[DetectionRecord]]],
    params: TrackerParams | None = None,
    corrections: Mapping[tuple[int, int], int] | None = None,
) -> list[Track]:
    """Scan a sorted frame sequence and return all tracks ever created.

    `corrections` maps (frame, detection_index) to a forced track id.
    The union of returned track histories is exactly the input detections.
    """
    params = params or TrackerParams()
    state = _TrackerState(params)
    last_frame = None
    for frame, detections in frames:
        if last_frame is not None and frame <= last_frame:
            raise FrameOrderViolation(f"frame {frame} after {last_frame}")
        last_frame = frame
        forced = None
        if corrections:
            forced = {
                det_idx: tid
                for (f, det_idx), tid in corrections.items()
                if f == frame
            }
        track_step(state.active, detections, frame, params, forced, _state=state)
    done = state.retired + state.active
    for t in done:
        t.coasting = False
    done.sort(key=lambda t: t.track_id)
    return done


def group_by_frame(
    records: Sequence[DetectionRecord],
) -> list[tuple[int, list[DetectionRecord]]]:
    """Group sorted detection records into (frame, detections) steps."""
    frames: list[tuple[int, list[DetectionRecord]]] = []
    for rec in records:
        if frames and frames[-1][0] == rec.frame_index:
            frames[-1][1].append(rec)
        else:
            frames.append((rec.frame_index, [rec]))
    return frames


def load_corrections(path: str | Path) -> dict[tuple[int, int], int]:
    """corrections.jsonl: one {frame, detection_index, track_id} per line."""
    out: dict[tuple[int, int], int] = {}
    with open(path, "r", encoding="utf-8") as fh:
        for i, line in enumerate(fh, start=1):
            line = line.strip()
            if not line:
                continue
            try:
                doc = json.loads(line)
                out[(int(doc["frame"]), int(doc["detection_index"]))] = int(
                    doc["track_id"]
                )
            except (json.JSONDecodeError, KeyError, TypeError, ValueError) as exc:
                raise SchemaViolation(f"corrections line {i}", str(exc)) from exc
    return out


def evaluate_tracking(
    tracks: Sequence[Track],
    ground_truth: Mapping[int, Sequence[tuple[str, Sequence[float]]]],
) -> float:
    """Fraction of ground-truth detections explained by identity-pure tracks.

    Each track is mapped to the true identity it covers most often (majority
    vote, ties to the lexicographically smallest id); a detection counts as
    correct when its track's majority identity matches its own true identity.
    """
    total = sum(len(v) for v in ground_truth.values())
    if total == 0:
        raise EmptyGroundTruth("ground truth has no detections")

    truth: dict[tuple[int, tuple[float, ...]], str] = {}
    for frame, entries in ground_truth.items():
        for true_id, bbox in entries:
            truth[(int(frame), tuple(float(v) for v in bbox))] = true_id

    per_track: list[list[str]] = []
    for t in tracks:
        ids = []
        for frame, det in t.history:
            tid = truth.get((frame, tuple(det.bbox)))
            if tid is not None:
                ids.append(tid)
        per_track.append(ids)

    correct = 0
    for ids in per_track:
        if not ids:
            continue
        counts: dict[str, int] = {}
        for i in ids:
            counts[i] = counts.get(i, 0) + 1
        best = max(counts.values())
        majority = min(i for i, c in counts.items() if c == best)
        correct += counts[majority]
    return correct / total


def dump_tracks_jsonl(tracks: Sequence[Track], stream_id: str, fh) -> None:
    """tracks.jsonl: one line per (track, frame) observation."""
    for t in tracks:
        for frame, det in t.history:
            doc = {
                "stream_id": stream_id,
                "track_id": t.track_id,
                "frame": frame,
                "bbox": list(det.bbox),
                "valence": det.valence,
                "arousal": det.arousal,
                "pitch": det.pitch,
                "yaw": det.yaw,
                "depth": det.depth,
            }
            fh.write(json.dumps(doc) + "\n")
