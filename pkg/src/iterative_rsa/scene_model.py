"""Graded scene graphs: objects with scored types/attributes and scored relations.

Scores are raw detector confidences in [0, 1].  Boxes follow the COCO
``(x, y, w, h)`` convention with a top-left origin.
"""

from __future__ import annotations

import json
import math
import warnings
from dataclasses import dataclass, field
from typing import Any, Mapping

from .errors import SceneParseError, SceneValidationError

__all__ = [
    "BoundingBox",
    "GradedObject",
    "GradedRelation",
    "TargetSpec",
    "GradedScene",
    "parse_scene",
    "scene_from_dict",
    "scene_to_dict",
    "serialize_scene",
    "object_area",
]


@dataclass(frozen=True)
class BoundingBox:
    x: float
    y: float
    w: float
    h: float

    def __post_init__(self):
        vals = (self.x, self.y, self.w, self.h)
        if not all(math.isfinite(v) for v in vals):
            raise SceneValidationError("", f"non-finite box {vals}")
        if self.w <= 0 or self.h <= 0:
            raise SceneValidationError("", f"box must have positive size, got w={self.w}, h={self.h}")

    @property
    def area(self) -> float:
        return self.w * self.h

    @property
    def center(self) -> tuple[float, float]:
        return (self.x + self.w / 2.0, self.y + self.h / 2.0)

    def as_list(self) -> list[float]:
        return [self.x, self.y, self.w, self.h]


def _check_scores(scores: Mapping[str, float], path: str) -> None:
    for label, s in scores.items():
        if not isinstance(s, (int, float)) or isinstance(s, bool) or not math.isfinite(s):
            raise SceneValidationError(f"{path}.{label}", f"score must be a finite number, got {s!r}")
        if s < 0.0 or s > 1.0:
            raise SceneValidationError(f"{path}.{label}", f"score out of range: {s}")


@dataclass(frozen=True)
class GradedObject:
    id: str
    box: BoundingBox
    type_scores: Mapping[str, float]
    attribute_scores: Mapping[str, float] = field(default_factory=dict)

    def __post_init__(self):
        if not self.type_scores:
            raise SceneValidationError(f"object {self.id}", "type_scores must be non-empty")
        _check_scores(self.type_scores, f"object {self.id}.types")
        _check_scores(self.attribute_scores, f"object {self.id}.attributes")

    @property
    def category(self) -> str:
        """Argmax type label; ties resolve to the lexicographically smallest label."""
        return min(self.type_scores, key=lambda k: (-self.type_scores[k], k))


@dataclass(frozen=True)
class GradedRelation:
    subject: str
    predicate: str
    object: str
    score: float

    def __post_init__(self):
        if self.subject == self.object:
            raise SceneValidationError(
                f"relation {self.subject}-{self.predicate}", "subject and object must differ"
            )
        _check_scores({self.predicate: self.score}, f"relation {self.subject}")


@dataclass(frozen=True)
class TargetSpec:
    box: BoundingBox
    type_scores: Mapping[str, float]
    attribute_scores: Mapping[str, float] = field(default_factory=dict)

    def __post_init__(self):
        _check_scores(self.type_scores, "target.types")
        _check_scores(self.attribute_scores, "target.attributes")


@dataclass(frozen=True)
class GradedScene:
    image_id: str
    width: float
    height: float
    objects: tuple[GradedObject, ...]
    relations: tuple[GradedRelation, ...] = ()
    target: TargetSpec | None = None

    def __post_init__(self):
        object.__setattr__(self, "objects", tuple(self.objects))
        object.__setattr__(self, "relations", tuple(self.relations))
        seen = set()
        for i, o in enumerate(self.objects):
            if o.id in seen:
                raise SceneValidationError(f"objects[{i}].id", f"duplicate object id {o.id!r}")
            seen.add(o.id)
        for i, r in enumerate(self.relations):
            for end in ("subject", "object"):
                if getattr(r, end) not in seen:
                    raise SceneValidationError(
                        f"relations[{i}].{end}",
                        f"unresolved relation endpoint {getattr(r, end)!r}",
                    )

    @property
    def ids(self) -> tuple[str, ...]:
        return tuple(o.id for o in self.objects)

    def get(self, object_id: str) -> GradedObject:
        for o in self.objects:
            if o.id == object_id:
                return o
        raise KeyError(object_id)


def object_area(o: GradedObject) -> float:
    return o.box.area


# -- parsing -------------------------------------------------------------


def _require(doc: Mapping, key: str, path: str) -> Any:
    if key not in doc:
        raise SceneParseError(f"{path}.{key}" if path else key, "missing required field")
    return doc[key]


def _number(v: Any, path: str) -> float:
    if isinstance(v, bool) or not isinstance(v, (int, float)):
        raise SceneParseError(path, f"expected a number, got {type(v).__name__}")
    return float(v)


def _score_map(v: Any, path: str) -> dict[str, float]:
    if not isinstance(v, dict):
        raise SceneParseError(path, "expected an object mapping label to score")
    out = {}
    for label, s in v.items():
        out[str(label).lower()] = _number(s, f"{path}.{label}")
    return out


def _bbox(v: Any, path: str, width: float, height: float) -> BoundingBox:
    if not isinstance(v, (list, tuple)) or len(v) != 4:
        raise SceneParseError(path, "expected [x, y, w, h]")
    x, y, w, h = (_number(c, f"{path}[{i}]") for i, c in enumerate(v))
    if w <= 0 or h <= 0:
        raise SceneValidationError(path, f"box must have positive size, got w={w}, h={h}")
    x0, y0 = max(0.0, x), max(0.0, y)
    x1, y1 = min(width, x + w), min(height, y + h)
    if (x0, y0, x1, y1) != (x, y, x + w, y + h):
        if x1 <= x0 or y1 <= y0:
            raise SceneValidationError(path, "box lies entirely outside the image")
        warnings.warn(f"{path}: box {[x, y, w, h]} clamped to image bounds", stacklevel=4)
        return BoundingBox(x0, y0, x1 - x0, y1 - y0)
    return BoundingBox(x, y, w, h)


def _wrap_validation(fn, path):
    try:
        return fn()
    except SceneValidationError as e:
        if e.path:
            raise
        raise SceneValidationError(path, str(e)) from None


def scene_from_dict(doc: Mapping) -> GradedScene:
    """Build a validated scene from an already-decoded JSON document."""
    if not isinstance(doc, dict):
        raise SceneParseError("", "scene document must be a JSON object")
    image_id = _require(doc, "image_id", "")
    if not isinstance(image_id, str):
        raise SceneParseError("image_id", "expected a string")
    width = _number(_require(doc, "width", ""), "width")
    height = _number(_require(doc, "height", ""), "height")
    if width <= 0 or height <= 0:
        raise SceneValidationError("width", "image dimensions must be positive")

    raw_objects = _require(doc, "objects", "")
    if not isinstance(raw_objects, list):
        raise SceneParseError("objects", "expected a list")
    objects = []
    for i, ro in enumerate(raw_objects):
        p = f"objects[{i}]"
        if not isinstance(ro, dict):
            raise SceneParseError(p, "expected an object")
        oid = _require(ro, "id", p)
        if not isinstance(oid, str) or not oid:
            raise SceneParseError(f"{p}.id", "expected a non-empty string")
        box = _bbox(_require(ro, "bbox", p), f"{p}.bbox", width, height)
        types = _score_map(_require(ro, "types", p), f"{p}.types")
        attrs = _score_map(ro.get("attributes", {}), f"{p}.attributes")
        objects.append(_wrap_validation(lambda: GradedObject(oid, box, types, attrs), p))

    raw_rels = doc.get("relations", [])
    if not isinstance(raw_rels, list):
        raise SceneParseError("relations", "expected a list")
    relations = []
    for i, rr in enumerate(raw_rels):
        p = f"relations[{i}]"
        if not isinstance(rr, dict):
            raise SceneParseError(p, "expected an object")
        subj, pred, obj = (_require(rr, k, p) for k in ("subject", "predicate", "object"))
        for k, v in (("subject", subj), ("predicate", pred), ("object", obj)):
            if not isinstance(v, str) or not v:
                raise SceneParseError(f"{p}.{k}", "expected a non-empty string")
        score = _number(_require(rr, "score", p), f"{p}.score")
        relations.append(
            _wrap_validation(lambda: GradedRelation(subj, pred.lower(), obj, score), p)
        )

    target = None
    if doc.get("target") is not None:
        rt = doc["target"]
        if not isinstance(rt, dict):
            raise SceneParseError("target", "expected an object")
        tbox = _bbox(_require(rt, "bbox", "target"), "target.bbox", width, height)
        ttypes = _score_map(rt.get("types", {}), "target.types")
        tattrs = _score_map(rt.get("attributes", {}), "target.attributes")
        target = _wrap_validation(lambda: TargetSpec(tbox, ttypes, tattrs), "target")

    return GradedScene(image_id, width, height, tuple(objects), tuple(relations), target)


def parse_scene(data: bytes | str) -> GradedScene:
    """Parse and validate scene-file content (UTF-8 JSON)."""
    if isinstance(data, bytes):
        try:
            data = data.decode("utf-8")
        except UnicodeDecodeError as e:
            raise SceneParseError("", f"scene file is not valid UTF-8: {e}") from None
    try:
        doc = json.loads(data)
    except json.JSONDecodeError as e:
        raise SceneParseError("", f"invalid JSON at line {e.lineno} column {e.colno}: {e.msg}") from None
    return scene_from_dict(doc)


def scene_to_dict(scene: GradedScene) -> dict:
    doc = {
        "image_id": scene.image_id,
        "width": scene.width,
        "height": scene.height,
        "objects": [
            {
                "id": o.id,
                "bbox": o.box.as_list(),
                "types": dict(o.type_scores),
                "attributes": dict(o.attribute_scores),
            }
            for o in scene.objects
        ],
        "relations": [
            {"subject": r.subject, "predicate": r.predicate, "object": r.object, "score": r.score}
            for r in scene.relations
        ],
    }
    if scene.target is not None:
        doc["target"] = {
            "bbox": scene.target.box.as_list(),
            "types": dict(scene.target.type_scores),
            "attributes": dict(scene.target.attribute_scores),
        }
    return doc


def serialize_scene(scene: GradedScene, indent: int | None = 2) -> str:
    return json.dumps(scene_to_dict(scene), indent=indent)
