"""Target alignment and ordinal-relation synthesis over a graded scene."""

from __future__ import annotations

from collections import defaultdict
from dataclasses import dataclass, replace

from .errors import SceneValidationError
from .scene_model import BoundingBox, GradedObject, GradedScene

__all__ = [
    "AlignmentResult",
    "intersection_area",
    "overlap_ratio",
    "iou",
    "align_target",
    "ordinal_label",
    "synthesize_ordinals",
]

MIN_OVERLAP = 0.8

_ORDINAL_WORDS = [
    "first", "second", "third", "fourth", "fifth",
    "sixth", "seventh", "eighth", "ninth", "tenth",
]


@dataclass(frozen=True)
class AlignmentResult:
    target_id: str
    added_new: bool
    best_overlap: float
    alignment_class_match: bool


def intersection_area(a: BoundingBox, b: BoundingBox) -> float:
    iw = min(a.x + a.w, b.x + b.w) - max(a.x, b.x)
    ih = min(a.y + a.h, b.y + b.h) - max(a.y, b.y)
    if iw <= 0 or ih <= 0:
        return 0.0
    return iw * ih


def overlap_ratio(a: BoundingBox, target: BoundingBox) -> float:
    """Fraction of the target box covered by ``a``."""
    return min(1.0, intersection_area(a, target) / target.area)


def iou(a: BoundingBox, b: BoundingBox) -> float:
    inter = intersection_area(a, b)
    return inter / (a.area + b.area - inter)


def _argmax_label(scores) -> str:
    return min(scores, key=lambda k: (-scores[k], k))


def _fresh_id(scene: GradedScene, base: str = "target") -> str:
    taken = set(scene.ids)
    if base not in taken:
        return base
    i = 1
    while f"{base}_{i}" in taken:
        i += 1
    return f"{base}_{i}"


def align_target(
    scene: GradedScene,
    overlap: str = "coverage",
    min_overlap: float = MIN_OVERLAP,
) -> tuple[GradedScene, AlignmentResult]:
    """Designate a context object as the referent, appending the target box if none fits.

    A context object is reused when it covers at least ``min_overlap`` of the
    target box and its argmax class equals the target's.  ``overlap`` selects
    the overlap measure: ``"coverage"`` (intersection over target area) or
    ``"iou"``.
    """
    if scene.target is None:
        raise SceneValidationError("target", "scene has no target")
    if not scene.target.type_scores:
        raise SceneValidationError("target.types", "unclassifiable target")
    if overlap == "coverage":
        measure = overlap_ratio
    elif overlap == "iou":
        measure = iou
    else:
        raise ValueError(f"unknown overlap measure {overlap!r}")

    tspec = scene.target
    tclass = _argmax_label(tspec.type_scores)
    best_overlap = 0.0
    best_class_match = False
    best_match: tuple[float, str] | None = None
    for o in sorted(scene.objects, key=lambda o: o.id):
        ov = measure(o.box, tspec.box)
        same = o.category == tclass
        if ov > best_overlap:
            best_overlap, best_class_match = ov, same
        if same and ov >= min_overlap:
            key = (-ov, o.id)
            if best_match is None or key < best_match:
                best_match = key

    if best_match is not None:
        return scene, AlignmentResult(best_match[1], False, best_overlap, True)

    tid = _fresh_id(scene)
    new_obj = GradedObject(tid, tspec.box, dict(tspec.type_scores), dict(tspec.attribute_scores))
    new_scene = replace(scene, objects=scene.objects + (new_obj,))
    return new_scene, AlignmentResult(tid, True, best_overlap, best_class_match)


def ordinal_label(position: int, n: int) -> str:
    """Label for 1-based ``position`` among ``n`` objects sorted left to right."""
    if position == 1:
        return "left"
    if position == n:
        return "right"
    if position <= len(_ORDINAL_WORDS):
        word = _ORDINAL_WORDS[position - 1]
    else:
        word = f"{position}th"
    return f"{word} from left"


def synthesize_ordinals(scene: GradedScene) -> list[tuple[str, str]]:
    """Assign horizontal ordinals within each argmax category of two or more objects.

    Members are sorted by x-center, then y-center, then id.  The returned
    list is ordered by category name, then position.
    """
    groups: dict[str, list[GradedObject]] = defaultdict(list)
    for o in scene.objects:
        groups[o.category].append(o)
    out = []
    for cat in sorted(groups):
        members = groups[cat]
        n = len(members)
        if n < 2:
            continue
        members = sorted(members, key=lambda o: (o.box.center[0], o.box.center[1], o.id))
        for pos, o in enumerate(members, start=1):
            out.append((o.id, ordinal_label(pos, n)))
    return out
