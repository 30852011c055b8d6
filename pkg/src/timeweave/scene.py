"""Static scene geometry: named axis-aligned volumes, the floor plane, and
the parameters used to build dynamic person volumes.

Coordinates are meters in the camera frame: +X right, +Y down, +Z into the
scene. A "rectangle" is a box that is degenerate (min == max) along exactly
one axis; the ray intersection code handles both uniformly.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path

from .errors import DuplicateOOIName, MissingFile, MissingFloorPlane, SchemaViolation

DEFAULT_PERSON_WIDTH = 0.5
DEFAULT_HEAD_MARGIN = 0.15


@dataclass(frozen=True)
class Box:
    """Axis-aligned box, possibly degenerate along one axis."""

    name: str
    min: tuple[float, float, float]
    max: tuple[float, float, float]

    def __post_init__(self):
        for axis in range(3):
            if self.min[axis] > self.max[axis]:
                raise SchemaViolation(
                    f"ooi.{self.name}", f"min > max on axis {axis}"
                )

    def contains(self, p: tuple[float, float, float], slack: float = 0.0) -> bool:
        return all(
            self.min[i] - slack <= p[i] <= self.max[i] + slack for i in range(3)
        )

    def scaled(self, lam: float) -> "Box":
        return Box(
            self.name,
            tuple(c * lam for c in self.min),
            tuple(c * lam for c in self.max),
        )


@dataclass(frozen=True)
class SceneModel:
    """Static objects of interest plus the floor plane (y = floor_y)."""

    static_oois: tuple[Box, ...]
    floor_y: float
    person_width: float = DEFAULT_PERSON_WIDTH
    head_margin: float = DEFAULT_HEAD_MARGIN

    def __post_init__(self):
        if self.person_width <= 0:
            raise SchemaViolation("person_width", "must be > 0")
        names = [b.name for b in self.static_oois]
        dupes = {n for n in names if names.count(n) > 1}
        if dupes:
            raise DuplicateOOIName(f"duplicate OOI names: {sorted(dupes)}")

    def ooi(self, name: str) -> Box:
        for b in self.static_oois:
            if b.name == name:
                return b
        raise KeyError(name)


def scene_from_dict(doc: dict) -> SceneModel:
    if not isinstance(doc, dict):
        raise SchemaViolation("scene", "document must be a JSON object")
    if "floor_y" not in doc:
        raise MissingFloorPlane("scene has no floor_y plane")
    floor_y = doc["floor_y"]
    if not isinstance(floor_y, (int, float)):
        raise SchemaViolation("floor_y", "must be a number")
    oois_doc = doc.get("oois")
    if not isinstance(oois_doc, list) or not oois_doc:
        raise SchemaViolation("oois", "at least one static OOI is required")
    boxes = []
    for i, o in enumerate(oois_doc):
        try:
            name = o["name"]
            lo = tuple(float(c) for c in o["min"])
            hi = tuple(float(c) for c in o["max"])
        except (KeyError, TypeError, ValueError) as exc:
            raise SchemaViolation(f"oois[{i}]", f"bad OOI entry: {exc}") from exc
        if len(lo) != 3 or len(hi) != 3:
            raise SchemaViolation(f"oois[{i}]", "min/max must have 3 components")
        boxes.append(Box(name, lo, hi))
    return SceneModel(
        static_oois=tuple(boxes),
        floor_y=float(floor_y),
        person_width=float(doc.get("person_width", DEFAULT_PERSON_WIDTH)),
        head_margin=float(doc.get("head_margin", DEFAULT_HEAD_MARGIN)),
    )


def scene_to_dict(scene: SceneModel) -> dict:
    return {
        "oois": [
            {"name": b.name, "min": list(b.min), "max": list(b.max)}
            for b in scene.static_oois
        ],
        "floor_y": scene.floor_y,
        "person_width": scene.person_width,
        "head_margin": scene.head_margin,
    }


def load_scene(path: str | Path) -> SceneModel:
    path = Path(path)
    if not path.is_file():
        raise MissingFile(str(path))
    try:
        doc = json.loads(path.read_text(encoding="utf-8"))
    except json.JSONDecodeError as exc:
        raise SchemaViolation("scene", f"invalid JSON: {exc}") from exc
    return scene_from_dict(doc)
