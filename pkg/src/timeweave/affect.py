"""Discretization of continuous valence/arousal into the 11-label affect set.

Per-frame labels come from a circumplex rule: a neutral disk around the
origin maps to engaged concentration, the four quadrants map to learning
emotions (delight, confusion/frustration, boredom) or plain quadrant labels.
Windows of 150 frames (5 s at 30 fps) then pool frame labels: a label must
dominate the whole window to count, except delight which needs only 60
frames; windows that are mostly face-less become NotFound, windows without
a dominant label become NoDominantEmotion.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum
from typing import Sequence

from .errors import RangeViolation, SchemaViolation, WrongWindowLength
from .ingest import SessionManifest, StreamSpec, frame_to_time
from .reid import Track


class AffectLabel(str, Enum):
    DELIGHT = "Delight"
    ENGAGEMENT = "Engagement"
    CONFUSION = "Confusion"
    FRUSTRATION = "Frustration"
    BOREDOM = "Boredom"
    Q1_PLEASANT_ACTIVE = "Q1PleasantActive"
    Q2_UNPLEASANT_ACTIVE = "Q2UnpleasantActive"
    Q3_UNPLEASANT_SUBDUED = "Q3UnpleasantSubdued"
    Q4_PLEASANT_SERENE = "Q4PleasantSerene"
    NOT_FOUND = "NotFound"
    NO_DOMINANT_EMOTION = "NoDominantEmotion"


#: Labels a single frame can carry (window-only labels excluded).
FRAME_LABELS = (
    AffectLabel.DELIGHT,
    AffectLabel.ENGAGEMENT,
    AffectLabel.CONFUSION,
    AffectLabel.FRUSTRATION,
    AffectLabel.BOREDOM,
    AffectLabel.Q1_PLEASANT_ACTIVE,
    AffectLabel.Q2_UNPLEASANT_ACTIVE,
    AffectLabel.Q3_UNPLEASANT_SUBDUED,
    AffectLabel.Q4_PLEASANT_SERENE,
)


@dataclass(frozen=True)
class AffectThresholds:
    neutral_radius: float = 0.15
    delight_arousal_min: float = 0.35
    frustration_arousal_min: float = 0.35
    window_frames: int = 150
    sustain_frames: int = 150
    delight_sustain_frames: int = 60
    notfound_fraction: float = 0.5
    quadrants_only: bool = False

    def __post_init__(self):
        if not (0 < self.neutral_radius < 1):
            raise SchemaViolation("neutral_radius", "must be in (0, 1)")
        if not (
            self.delight_sustain_frames <= self.sustain_frames <= self.window_frames
        ):
            raise SchemaViolation(
                "sustain_frames",
                "need delight_sustain_frames <= sustain_frames <= window_frames",
            )


@dataclass(frozen=True)
class AffectSegment:
    track_id: int
    start_time: float
    end_time: float
    label: AffectLabel


def frame_label(
    valence: float, arousal: float, t: AffectThresholds | None = None
) -> AffectLabel:
    """Label a single frame's (valence, arousal) point.

    Zero coordinates count as positive, so the quadrant map is total on
    [-1, 1]^2. With quadrants_only the learning-emotion overlay is disabled
    and raw quadrant labels are returned.
    """
    t = t or AffectThresholds()
    if not -1.0 <= valence <= 1.0:
        raise RangeViolation("valence", valence)
    if not -1.0 <= arousal <= 1.0:
        raise RangeViolation("arousal", arousal)

    positive_v = valence >= 0
    positive_a = arousal >= 0
    if t.quadrants_only:
        if positive_v and positive_a:
            return AffectLabel.Q1_PLEASANT_ACTIVE
        if not positive_v and positive_a:
            return AffectLabel.Q2_UNPLEASANT_ACTIVE
        if not positive_v and not positive_a:
            return AffectLabel.Q3_UNPLEASANT_SUBDUED
        return AffectLabel.Q4_PLEASANT_SERENE

    if math.hypot(valence, arousal) <= t.neutral_radius:
        return AffectLabel.ENGAGEMENT
    if positive_v and positive_a:
        if arousal >= t.delight_arousal_min:
            return AffectLabel.DELIGHT
        return AffectLabel.Q1_PLEASANT_ACTIVE
    if not positive_v and positive_a:
        if arousal >= t.frustration_arousal_min:
            return AffectLabel.FRUSTRATION
        return AffectLabel.CONFUSION
    if not positive_v and not positive_a:
        return AffectLabel.BOREDOM
    return AffectLabel.Q4_PLEASANT_SERENE


def _scaled(count: int, length: int, window: int) -> int:
    # Proportional threshold for a truncated window; never below one frame.
    return max(1, (count * length) // window)


def window_label(
    frames: Sequence[AffectLabel | None],
    t: AffectThresholds | None = None,
    expected_length: int | None = None,
) -> AffectLabel:
    """Pool one window of optional per-frame labels into a window label.

    Entries are None where no face was found. Decision order: mostly-absent
    windows are NotFound; then delight with its shorter sustain count; then
    any non-engagement label reaching the sustain count; then engagement;
    otherwise NoDominantEmotion. Counts are plain frame counts, runs need
    not be contiguous.
    """
    t = t or AffectThresholds()
    expected = expected_length if expected_length is not None else t.window_frames
    if len(frames) != expected or expected == 0:
        raise WrongWindowLength(
            f"window has {len(frames)} entries, expected {expected}"
        )
    length = len(frames)
    if length == t.window_frames:
        sustain = t.sustain_frames
        delight_sustain = t.delight_sustain_frames
    else:
        sustain = _scaled(t.sustain_frames, length, t.window_frames)
        delight_sustain = _scaled(t.delight_sustain_frames, length, t.window_frames)

    absent = sum(1 for f in frames if f is None)
    if absent / length > t.notfound_fraction:
        return AffectLabel.NOT_FOUND

    counts: dict[AffectLabel, int] = {}
    for f in frames:
        if f is not None:
            counts[f] = counts.get(f, 0) + 1

    if counts.get(AffectLabel.DELIGHT, 0) >= delight_sustain:
        return AffectLabel.DELIGHT
    candidates = [
        (label, n)
        for label, n in counts.items()
        if label is not AffectLabel.ENGAGEMENT and n >= sustain
    ]
    if candidates:
        # With sustain <= window/2 two labels can qualify; keep it deterministic.
        candidates.sort(key=lambda kv: (-kv[1], FRAME_LABELS.index(kv[0])))
        return candidates[0][0]
    if counts.get(AffectLabel.ENGAGEMENT, 0) >= sustain:
        return AffectLabel.ENGAGEMENT
    return AffectLabel.NO_DOMINANT_EMOTION


def track_windows(
    track: Track, window_frames: int
) -> list[tuple[int, int]]:
    """Consecutive [start, end) frame windows tiling a track's presence."""
    first = track.first_frame
    last = track.last_frame
    windows = []
    start = first
    while start <= last:
        end = min(start + window_frames, last + 1)
        windows.append((start, end))
        start += window_frames
    return windows


def frame_labels_for_track(
    track: Track, t: AffectThresholds
) -> dict[int, AffectLabel]:
    return {
        frame: frame_label(det.valence, det.arousal, t)
        for frame, det in track.history
    }


def affect_lane(
    track: Track,
    manifest: SessionManifest,
    stream: StreamSpec,
    t: AffectThresholds | None = None,
) -> list[AffectSegment]:
    """Window a track's frame labels into merged, gap-free affect segments."""
    t = t or AffectThresholds()
    if not track.history:
        return []
    labels = frame_labels_for_track(track, t)
    segments: list[AffectSegment] = []
    for start, end in track_windows(track, t.window_frames):
        window = [labels.get(f) for f in range(start, end)]
        label = window_label(window, t, expected_length=end - start)
        seg = AffectSegment(
            track_id=track.track_id,
            start_time=frame_to_time(start, stream, manifest),
            end_time=frame_to_time(end, stream, manifest),
            label=label,
        )
        if segments and segments[-1].label == seg.label:
            prev = segments[-1]
            segments[-1] = AffectSegment(
                prev.track_id, prev.start_time, seg.end_time, prev.label
            )
        else:
            segments.append(seg)
    return segments
