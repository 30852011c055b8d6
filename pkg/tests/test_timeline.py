from __future__ import annotations

import json
import random

import pytest

from timeweave import errors
from timeweave.timeline import (
    Lane,
    Marker,
    Segment,
    Timeline,
    build_timeline,
    canonical_json,
    clip_timeline,
    filter_timeline,
    parse,
    resample,
    resample_timeline,
    serialize,
    students_of,
)


def seg_lane(kind, student, triples):
    return Lane(kind, student, segments=tuple(Segment(a, b, l) for a, b, l in triples))


def test_build_timeline_single_lane():
    lanes = {"s1": {"affect": seg_lane("affect", "s1", [(0, 5, "Engagement")])}}
    t = build_timeline("demo", 5.0, lanes, None, students={"s1"}, kinds={"affect"})
    assert len(t.lanes) == 1


def test_build_timeline_lane_arithmetic():
    def full(student):
        return {
            "state": seg_lane("state", student, [(0, 10, "water")]),
            "actions": Lane("actions", student, markers=(Marker(1.0, "avatar:water"),)),
            "affect": seg_lane("affect", student, [(0, 10, "Engagement")]),
            "gaze": seg_lane("gaze", student, [(0, 10, "screen")]),
        }

    lanes = {s: full(s) for s in ("a", "b", "c")}
    system = seg_lane("system", None, [(0, 10, "day")])
    t = build_timeline("demo", 10.0, lanes, system)
    assert len(t.lanes) == 13  # 3 students x 4 lanes + system


def test_build_timeline_unknown_student():
    with pytest.raises(errors.UnknownStudent):
        build_timeline("demo", 5.0, {}, None, students={"ghost"})


def test_build_timeline_unknown_lane():
    with pytest.raises(errors.UnknownLane):
        build_timeline("demo", 5.0, {}, None, kinds={"sound"})


def test_resample_majority_duration_example():
    lane = seg_lane("affect", "s", [(0, 4.9, "A"), (4.9, 5.0, "B"), (5.0, 10, "A")])
    out = resample(lane, 5.0)
    assert [(s.start, s.end, s.label) for s in out.segments] == [
        (0.0, 5.0, "A"),
        (5.0, 10.0, "A"),
    ]


def test_resample_identity_when_all_segments_long():
    lane = seg_lane("affect", "s", [(0, 7.3, "A"), (7.3, 13.1, "B"), (13.1, 30, "C")])
    assert resample(lane, 5.0) == lane


def test_resample_marker_clustering():
    lane = Lane(
        "actions",
        "s",
        markers=(Marker(10.0, "x"), Marker(10.4, "y"), Marker(11.0, "x"), Marker(30.0, "z")),
    )
    out = resample(lane, 5.0)
    assert out.markers == (Marker(10.0, None, 3), Marker(30.0, "z", 1))


def test_resample_markers_preserve_total_count():
    rng = random.Random(0)
    times = sorted(rng.uniform(0, 100) for _ in range(60))
    lane = Lane("actions", "s", markers=tuple(Marker(t, "m") for t in times))
    for res in (0.5, 2.0, 10.0):
        out = resample(lane, res)
        assert sum(m.count for m in out.markers) == 60
        starts = [m.time for m in out.markers]
        assert all(b - a >= res for a, b in zip(starts, starts[1:]))


def random_lane(rng: random.Random) -> Lane:
    labels = ["A", "B", "C", None]
    cursor = rng.uniform(0, 3)
    triples = []
    for _ in range(rng.randint(1, 40)):
        length = rng.choice([rng.uniform(0.05, 0.9), rng.uniform(1.0, 8.0)])
        triples.append((cursor, cursor + length, rng.choice(labels)))
        cursor += length
    return seg_lane("affect", "s", triples)


@pytest.mark.parametrize("seed", range(12))
def test_resample_idempotent_and_extent_preserving(seed):
    rng = random.Random(seed)
    for _ in range(40):
        lane = random_lane(rng)
        res = rng.choice([0.5, 1.0, 2.5, 5.0])
        once = resample(lane, res)
        twice = resample(once, res)
        assert twice == once
        assert once.segments[0].start == lane.segments[0].start
        assert once.segments[-1].end == lane.segments[-1].end


def test_resample_fine_resolution_is_identity():
    rng = random.Random(99)
    for _ in range(200):
        lane = random_lane(rng)
        min_len = min(s.end - s.start for s in lane.segments)
        assert resample(lane, min_len * 0.9) == lane


def test_resample_zero_resolution_is_identity():
    lane = seg_lane("affect", "s", [(0, 0.4, "A"), (0.4, 0.5, "B")])
    assert resample(lane, 0) == lane


def test_serialize_byte_stable(golden_store):
    t = golden_store.timeline("golden")
    assert serialize(t) == serialize(t)


def test_serialize_empty_lanes():
    t = Timeline("empty", 0.0, ())
    doc = json.loads(serialize(t))
    assert doc == {"session": "empty", "duration": 0.0, "resolution": 0.0, "lanes": []}


def test_serialize_fixed_float_format():
    t = Timeline("s", 1.0, (seg_lane("affect", "x", [(0, 1 / 3, "A")]),))
    text = serialize(t)
    assert '"start":0.000000' in text
    assert '"end":0.333333' in text


def test_serialize_parse_canonical_round_trip(golden_store):
    t = golden_store.timeline("golden")
    text = serialize(t)
    assert serialize(parse(text)) == text


def test_canonical_json_rejects_non_finite():
    with pytest.raises(errors.SchemaViolation):
        canonical_json({"x": float("inf")})


def test_clip_timeline():
    t = Timeline(
        "s",
        10.0,
        (
            seg_lane("affect", "x", [(0, 4, "A"), (4, 8, "B")]),
            Lane("actions", "x", markers=(Marker(1.0, "m"), Marker(6.0, "n"))),
        ),
    )
    c = clip_timeline(t, 3.0, 6.0)
    assert [(s.start, s.end) for s in c.lanes[0].segments] == [(3.0, 4.0), (4.0, 6.0)]
    assert [m.time for m in c.lanes[1].markers] == [6.0]
    assert c.duration == 10.0
    with pytest.raises(errors.SchemaViolation):
        clip_timeline(t, 6.0, 3.0)


def test_filter_timeline(golden_store):
    t = golden_store.timeline("golden")
    assert students_of(t) == ["dapaw", "rose", "taylor"]
    f = filter_timeline(t, students=["rose"], kinds=["affect", "gaze"])
    assert {(l.lane_id, l.student_id) for l in f.lanes} == {
        ("affect", "rose"),
        ("gaze", "rose"),
    }
    with pytest.raises(errors.UnknownStudent):
        filter_timeline(t, students=["ghost"])
    with pytest.raises(errors.UnknownLane):
        filter_timeline(t, kinds=["sound"])


def test_resample_timeline_sets_resolution(golden_store):
    t = golden_store.timeline("golden")
    r = resample_timeline(t, 5.0)
    assert r.resolution == 5.0
    assert len(r.lanes) == len(t.lanes)
