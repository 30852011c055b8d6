"""Read-only HTTP API over a session store.

Every data response is rendered by the timeline module's canonical
serializer, so identical requests always return identical bytes. Videos are
served with byte-range support for player seeking. The server never writes
to the store; sessions become visible only once their completion marker
exists.
"""

from __future__ import annotations

import re
from pathlib import Path

from fastapi import FastAPI, Request
from fastapi.responses import Response
from fastapi.staticfiles import StaticFiles

from .errors import SchemaViolation, UnknownLane, UnknownStudent
from .pipeline import SessionStore
from .timeline import (
    canonical_json,
    clip_timeline,
    filter_timeline,
    resample_timeline,
    serialize,
    students_of,
)

_RANGE_RE = re.compile(r"bytes=(\d*)-(\d*)$")


def _json(payload, status: int = 200) -> Response:
    return Response(
        content=canonical_json(payload) + "\n",
        status_code=status,
        media_type="application/json",
    )


def _error(status: int, message: str, field: str | None = None) -> Response:
    doc: dict = {"error": message}
    if field is not None:
        doc["field"] = field
    return _json(doc, status)


def _csv_param(raw: str | None) -> list[str] | None:
    if raw is None:
        return None
    items = [s for s in (part.strip() for part in raw.split(",")) if s]
    return items or None


def create_app(store: SessionStore, ui_dir: str | Path | None = None) -> FastAPI:
    app = FastAPI(title="timeweave", docs_url=None, redoc_url=None)

    @app.get("/sessions")
    def sessions() -> Response:
        return _json(store.list_sessions())

    @app.get("/sessions/{session_id}/students")
    def students(session_id: str) -> Response:
        timeline = store.timeline(session_id)
        if timeline is None:
            return _error(404, f"unknown session {session_id!r}")
        return _json(students_of(timeline))

    @app.get("/sessions/{session_id}/timeline")
    def timeline_endpoint(session_id: str, request: Request) -> Response:
        timeline = store.timeline(session_id)
        if timeline is None:
            return _error(404, f"unknown session {session_id!r}")
        params = request.query_params

        def float_param(name: str, default: float | None):
            raw = params.get(name)
            if raw is None:
                return default, None
            try:
                return float(raw), None
            except ValueError:
                return None, _error(400, f"{name} must be a number", field=name)

        start, err = float_param("from", None)
        if err:
            return err
        end, err = float_param("to", None)
        if err:
            return err
        resolution, err = float_param("resolution", None)
        if err:
            return err
        if resolution is not None and resolution <= 0:
            return _error(400, "resolution must be > 0", field="resolution")

        try:
            timeline = filter_timeline(
                timeline,
                _csv_param(params.get("students")),
                _csv_param(params.get("lanes")),
            )
        except UnknownStudent as exc:
            return _error(400, f"unknown student {exc}", field="students")
        except UnknownLane as exc:
            return _error(400, f"unknown lane {exc}", field="lanes")

        if start is not None or end is not None:
            lo = 0.0 if start is None else start
            hi = timeline.duration if end is None else end
            try:
                timeline = clip_timeline(timeline, lo, hi)
            except SchemaViolation as exc:
                return _error(400, str(exc), field="from")
        if resolution is not None:
            timeline = resample_timeline(timeline, resolution)
        return Response(content=serialize(timeline), media_type="application/json")

    @app.get("/sessions/{session_id}/metrics")
    def metrics(session_id: str) -> Response:
        data = store.metrics_bytes(session_id)
        if data is None:
            return _error(404, f"unknown session {session_id!r}")
        return Response(content=data, media_type="application/json")

    @app.get("/sessions/{session_id}/video-meta")
    def video_meta(session_id: str) -> Response:
        doc = store.manifest_doc(session_id)
        if doc is None:
            return _error(404, f"unknown session {session_id!r}")
        cameras = [
            {
                "camera_id": v["camera_id"],
                "file": Path(v["path"]).name,
                "start_offset_seconds": float(v.get("start_offset_seconds", 0.0)),
                "url": f"/sessions/{session_id}/video/{v['camera_id']}",
            }
            for v in doc.get("video_files", [])
        ]
        return _json({"session": session_id, "fps": doc.get("fps", 30), "cameras": cameras})

    @app.get("/sessions/{session_id}/video/{camera_id}")
    def video(session_id: str, camera_id: str, request: Request) -> Response:
        path = store.video_path(session_id, camera_id)
        if path is None or not path.is_file():
            return _error(404, f"no video for camera {camera_id!r}")
        return _file_range_response(path, request.headers.get("range"))

    if ui_dir is not None and Path(ui_dir).is_dir():
        app.mount("/ui", StaticFiles(directory=str(ui_dir), html=True), name="ui")

    return app


def _file_range_response(path: Path, range_header: str | None) -> Response:
    size = path.stat().st_size
    headers = {"Accept-Ranges": "bytes"}
    if range_header:
        m = _RANGE_RE.match(range_header.strip())
        if not m or (not m.group(1) and not m.group(2)):
            return Response(status_code=416, headers={"Content-Range": f"bytes */{size}"})
        if m.group(1):
            start = int(m.group(1))
            end = int(m.group(2)) if m.group(2) else size - 1
        else:
            # suffix form: last N bytes
            n = int(m.group(2))
            start = max(size - n, 0)
            end = size - 1
        if start >= size or end < start:
            return Response(status_code=416, headers={"Content-Range": f"bytes */{size}"})
        end = min(end, size - 1)
        with open(path, "rb") as fh:
            fh.seek(start)
            data = fh.read(end - start + 1)
        headers["Content-Range"] = f"bytes {start}-{end}/{size}"
        return Response(
            content=data, status_code=206, headers=headers, media_type="video/mp4"
        )
    return Response(
        content=path.read_bytes(), headers=headers, media_type="video/mp4"
    )
