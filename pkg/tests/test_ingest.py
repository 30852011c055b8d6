from __future__ import annotations

import json

import pytest

from timeweave import errors
from timeweave.ingest import (
    StreamSpec,
    default_intrinsics,
    frame_to_time,
    load_manifest,
    manifest_from_dict,
    manifest_to_dict,
    parse_detections,
)
from timeweave.scene import load_scene, scene_from_dict, scene_to_dict

MINIMAL_MANIFEST = {
    "session_id": "demo",
    "fps": 30,
    "streams": [{"stream_id": "cam1", "camera_id": "cam1"}],
}


def write_manifest(tmp_path, doc):
    path = tmp_path / "manifest.json"
    path.write_text(json.dumps(doc), encoding="utf-8")
    return path


def test_load_minimal_manifest(tmp_path):
    m = load_manifest(write_manifest(tmp_path, MINIMAL_MANIFEST))
    assert m.session_id == "demo"
    assert m.fps == 30
    assert len(m.streams) == 1
    assert m.streams[0].intrinsics.fx == 1000.0
    # default detections path is derived from the stream id
    assert m.streams[0].detections_path.name == "detections_cam1.csv"


def test_missing_manifest_file(tmp_path):
    with pytest.raises(errors.MissingFile):
        load_manifest(tmp_path / "nope.json")


def test_fps_zero_rejected(tmp_path):
    doc = dict(MINIMAL_MANIFEST, fps=0)
    with pytest.raises(errors.SchemaViolation) as exc:
        load_manifest(write_manifest(tmp_path, doc))
    assert exc.value.field == "fps"


def test_duplicate_stream_id(tmp_path):
    doc = dict(
        MINIMAL_MANIFEST,
        streams=[
            {"stream_id": "cam1", "detections_path": "a.csv"},
            {"stream_id": "cam1", "detections_path": "b.csv"},
        ],
    )
    with pytest.raises(errors.DuplicateStreamId):
        load_manifest(write_manifest(tmp_path, doc))


def test_duplicate_referenced_path(tmp_path):
    doc = dict(
        MINIMAL_MANIFEST,
        streams=[
            {"stream_id": "cam1", "detections_path": "same.csv"},
            {"stream_id": "cam2", "detections_path": "same.csv"},
        ],
    )
    with pytest.raises(errors.SchemaViolation):
        load_manifest(write_manifest(tmp_path, doc))


def test_manifest_round_trip(tmp_path):
    doc = dict(
        MINIMAL_MANIFEST,
        log_path="log.jsonl",
        scene_path="scene.json",
        student_map={"rose": {"stream_id": "cam1", "track_id": 1}},
    )
    m1 = load_manifest(write_manifest(tmp_path, doc))
    m2 = manifest_from_dict(manifest_to_dict(m1), tmp_path)
    assert m1 == m2


CSV_HEADER = "frame,x_min,y_min,x_max,y_max,valence,arousal"


def spec():
    return StreamSpec(stream_id="cam1", camera_id="cam1")


def test_parse_detection_row():
    rows = parse_detections(f"{CSV_HEADER}\n10,100,100,160,180,0.5,0.3\n", spec())
    assert len(rows) == 1
    rec = rows[0]
    assert rec.frame_index == 10
    assert rec.bbox == (100.0, 100.0, 160.0, 180.0)
    assert rec.valence == 0.5 and rec.arousal == 0.3
    assert rec.pitch is None and rec.depth is None


def test_out_of_range_valence_is_error():
    body = f"{CSV_HEADER}\n10,0,0,5,5,1.7,0.0\n"
    with pytest.raises(errors.RangeViolation) as exc:
        parse_detections(body, spec())
    assert exc.value.field == "valence"
    assert exc.value.line == 2


def test_multiple_faces_per_frame_keep_order():
    body = f"{CSV_HEADER}\n10,0,0,5,5,0.1,0.0\n10,50,0,55,5,0.2,0.0\n"
    rows = parse_detections(body, spec())
    assert [r.valence for r in rows] == [0.1, 0.2]


def test_rows_sorted_by_frame_stably():
    body = f"{CSV_HEADER}\n12,0,0,5,5,0.1,0.0\n10,0,0,5,5,0.2,0.0\n10,9,0,14,5,0.3,0.0\n"
    rows = parse_detections(body, spec())
    assert [r.frame_index for r in rows] == [10, 10, 12]
    assert [r.valence for r in rows] == [0.2, 0.3, 0.1]


def test_gaze_columns_parsed():
    header = CSV_HEADER + ",pitch,yaw,depth"
    body = f"{header}\n0,0,0,5,5,0.0,0.0,0.1,-0.2,2.5\n1,0,0,5,5,0.0,0.0,,,\n"
    rows = parse_detections(body, spec())
    assert rows[0].pitch == 0.1 and rows[0].yaw == -0.2 and rows[0].depth == 2.5
    assert rows[1].pitch is None and rows[1].depth is None


def test_degenerate_bbox_rejected():
    with pytest.raises(errors.MalformedRow):
        parse_detections(f"{CSV_HEADER}\n0,10,0,10,5,0.0,0.0\n", spec())


def test_collect_mode_reports_line_numbers():
    body = f"{CSV_HEADER}\n0,0,0,5,5,0.0,0.0\nbad,row\n2,0,0,5,5,2.0,0.0\n"
    records, diagnostics = parse_detections(body, spec(), strict=False)
    assert len(records) == 1
    assert [d.line for d in diagnostics] == [3, 4]


def test_unexpected_header_rejected():
    with pytest.raises(errors.MalformedRow):
        parse_detections("a,b,c\n1,2,3\n", spec())


def test_frame_to_time_examples():
    m = manifest_from_dict(MINIMAL_MANIFEST, __import__("pathlib").Path("."))
    s0 = StreamSpec("cam1", "cam1", start_offset_seconds=0.0)
    assert frame_to_time(0, s0, m) == 0.0
    assert frame_to_time(150, s0, m) == 5.0
    s_off = StreamSpec("cam1", "cam1", start_offset_seconds=2.5)
    assert frame_to_time(30, s_off, m) == 3.5


def test_frame_to_time_monotonic_and_accurate():
    from fractions import Fraction

    m = manifest_from_dict(dict(MINIMAL_MANIFEST, fps=29.97), __import__("pathlib").Path("."))
    s = StreamSpec("cam1", "cam1", start_offset_seconds=1.25)
    prev = -1.0
    for frame in range(0, 216001, 5400):  # spans two hours at ~30 fps
        t = frame_to_time(frame, s, m)
        assert t > prev
        prev = t
        exact = Fraction(5, 4) + Fraction(frame) / Fraction(29.97)
        assert abs(t - float(exact)) < 1e-6


SCENE_DOC = {
    "oois": [
        {"name": "screen", "min": [-1, -1, 3], "max": [1, 1, 3]},
        {"name": "teacher_desk", "min": [2, 0, 3], "max": [3, 1.5, 4]},
    ],
    "floor_y": 1.6,
    "person_width": 0.5,
}


def test_load_scene(tmp_path):
    path = tmp_path / "scene.json"
    path.write_text(json.dumps(SCENE_DOC), encoding="utf-8")
    scene = load_scene(path)
    assert {b.name for b in scene.static_oois} == {"screen", "teacher_desk"}
    assert scene.floor_y == 1.6
    assert scene.person_width == 0.5


def test_scene_requires_floor():
    doc = {k: v for k, v in SCENE_DOC.items() if k != "floor_y"}
    with pytest.raises(errors.MissingFloorPlane):
        scene_from_dict(doc)


def test_scene_duplicate_names():
    doc = dict(
        SCENE_DOC,
        oois=[
            {"name": "screen", "min": [0, 0, 3], "max": [1, 1, 3]},
            {"name": "screen", "min": [2, 0, 3], "max": [3, 1, 3]},
        ],
    )
    with pytest.raises(errors.DuplicateOOIName):
        scene_from_dict(doc)


def test_scene_round_trip():
    scene = scene_from_dict(SCENE_DOC)
    assert scene_from_dict(scene_to_dict(scene)) == scene
