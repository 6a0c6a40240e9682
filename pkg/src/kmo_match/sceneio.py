"""Reading and writing scene files and reports.

The on-disk format is JSON tagged "kmo-match/1"; docs/formats.md is the
normative description. Loading validates structure eagerly and reports every
violation as SchemaError with the offending scene and field; OS-level read
and write failures surface as IoError. Serialization uses Python's shortest
round-trip float representation and a trailing newline, and never embeds
timestamps, so equal inputs produce byte-identical files.
"""
from __future__ import annotations

import json
import math
from dataclasses import dataclass
from typing import Any, Sequence

from .errors import IoError, SchemaError
from .geometry import Point
from .matcher import GtPoint, PredPoint

SCHEMA = "kmo-match/1"


@dataclass(frozen=True)
class Scene:
    """One labeled frame: an id, a frame size, ground truths, and optionally
    predictions."""

    scene_id: str
    width: float
    height: float
    gt: tuple[GtPoint, ...]
    pred: tuple[PredPoint, ...] | None = None

    @property
    def frame(self) -> tuple[float, float]:
        return (self.width, self.height)


def _require(cond: bool, msg: str) -> None:
    if not cond:
        raise SchemaError(msg)


def _as_finite(value: Any, what: str) -> float:
    _require(isinstance(value, (int, float)) and not isinstance(value, bool), f"{what} must be a number, got {value!r}")
    v = float(value)
    _require(math.isfinite(v), f"{what} must be finite, got {value!r}")
    return v


def _parse_gt(obj: Any, where: str) -> GtPoint:
    _require(isinstance(obj, dict), f"{where} must be an object")
    unknown = set(obj) - {"x", "y", "w", "h"}
    _require(not unknown, f"{where} has unknown fields {sorted(unknown)}")
    _require("x" in obj and "y" in obj, f"{where} needs x and y")
    x = _as_finite(obj["x"], f"{where}.x")
    y = _as_finite(obj["y"], f"{where}.y")
    w = _as_finite(obj["w"], f"{where}.w") if "w" in obj else None
    h = _as_finite(obj["h"], f"{where}.h") if "h" in obj else None
    if w is not None:
        _require(w > 0, f"{where}.w must be > 0")
    if h is not None:
        _require(h > 0, f"{where}.h must be > 0")
    return GtPoint(Point(x, y), box_w=w, box_h=h)


def _parse_pred(obj: Any, where: str) -> PredPoint:
    _require(isinstance(obj, dict), f"{where} must be an object")
    unknown = set(obj) - {"x", "y", "score", "knn"}
    _require(not unknown, f"{where} has unknown fields {sorted(unknown)}")
    _require("x" in obj and "y" in obj and "score" in obj, f"{where} needs x, y, and score")
    x = _as_finite(obj["x"], f"{where}.x")
    y = _as_finite(obj["y"], f"{where}.y")
    score = _as_finite(obj["score"], f"{where}.score")
    _require(0.0 <= score <= 1.0, f"{where}.score must be in [0, 1], got {score}")
    knn = _as_finite(obj["knn"], f"{where}.knn") if "knn" in obj else None
    if knn is not None:
        _require(knn >= 0, f"{where}.knn must be >= 0")
    return PredPoint(Point(x, y), confidence=score, knn_feature=knn)


def parse_scenes(payload: Any, source: str = "<memory>") -> list[Scene]:
    """Validate a decoded scene document and build Scene values."""
    _require(isinstance(payload, dict), f"{source}: top level must be an object")
    _require(payload.get("schema") == SCHEMA, f"{source}: schema must be {SCHEMA!r}, got {payload.get('schema')!r}")
    _require(isinstance(payload.get("scenes"), list) and payload["scenes"], f"{source}: scenes must be a non-empty list")
    scenes = []
    seen: set[str] = set()
    for idx, raw in enumerate(payload["scenes"]):
        where = f"{source}: scenes[{idx}]"
        _require(isinstance(raw, dict), f"{where} must be an object")
        sid = raw.get("scene_id")
        _require(isinstance(sid, str) and sid, f"{where}.scene_id must be a non-empty string")
        _require(sid not in seen, f"{where}.scene_id {sid!r} is duplicated")
        seen.add(sid)
        width = _as_finite(raw.get("width"), f"{where}.width")
        height = _as_finite(raw.get("height"), f"{where}.height")
        _require(width > 0 and height > 0, f"{where}: frame must be positive")
        _require(isinstance(raw.get("gt"), list), f"{where}.gt must be a list")
        gt = tuple(_parse_gt(g, f"{where}.gt[{i}]") for i, g in enumerate(raw["gt"]))
        pred = None
        if raw.get("pred") is not None:
            _require(isinstance(raw["pred"], list), f"{where}.pred must be a list")
            pred = tuple(_parse_pred(p, f"{where}.pred[{i}]") for i, p in enumerate(raw["pred"]))
        scenes.append(Scene(sid, width, height, gt, pred))
    return scenes


def load_scenes(path: str) -> list[Scene]:
    """Load and validate a scene file."""
    try:
        with open(path, "r", encoding="utf-8") as fh:
            text = fh.read()
    except OSError as exc:
        raise IoError(f"cannot read {path}: {exc}") from exc
    try:
        payload = json.loads(text)
    except json.JSONDecodeError as exc:
        raise SchemaError(f"{path}: not valid JSON: {exc}") from exc
    return parse_scenes(payload, source=path)


def scene_to_obj(scene: Scene) -> dict:
    record: dict[str, Any] = {
        "scene_id": scene.scene_id,
        "width": scene.width,
        "height": scene.height,
        "gt": [],
    }
    for g in scene.gt:
        item: dict[str, Any] = {"x": g.point.x, "y": g.point.y}
        if g.box_w is not None:
            item["w"] = g.box_w
        if g.box_h is not None:
            item["h"] = g.box_h
        record["gt"].append(item)
    if scene.pred is not None:
        record["pred"] = []
        for p in scene.pred:
            item = {"x": p.point.x, "y": p.point.y, "score": p.confidence}
            if p.knn_feature is not None:
                item["knn"] = p.knn_feature
            record["pred"].append(item)
    return record


def scenes_to_payload(scenes: Sequence[Scene]) -> dict:
    return {"schema": SCHEMA, "scenes": [scene_to_obj(s) for s in scenes]}


def dump_json(obj: Any) -> str:
    """Serialize a report or scene payload deterministically."""
    return json.dumps(obj, indent=2, allow_nan=False) + "\n"


def write_json(path: str, obj: Any) -> None:
    try:
        with open(path, "w", encoding="utf-8") as fh:
            fh.write(dump_json(obj))
    except OSError as exc:
        raise IoError(f"cannot write {path}: {exc}") from exc


def write_scenes(path: str, scenes: Sequence[Scene]) -> None:
    write_json(path, scenes_to_payload(scenes))
