"""Threshold semantics over graded scenes.

A graded score becomes categorical truth by a per-kind cutoff: a predicate
holds of an object iff its score is at least the threshold.  The resulting
single-predicate descriptors form the speaker's utterance space.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from typing import Iterable, Iterator, Mapping

from .errors import SemanticsError
from .scene_model import GradedScene
from .scene_prep import synthesize_ordinals

__all__ = [
    "ThresholdTable",
    "DescriptorKind",
    "Descriptor",
    "DescriptorSpace",
    "Distribution",
    "categorize",
    "salience_prior",
    "truth",
]

NORMALIZATION_TOL = 1e-9


@dataclass(frozen=True)
class ThresholdTable:
    theta_type: float = 0.3
    theta_attr: float = 0.3
    theta_rel: float = 0.5

    def __post_init__(self):
        for name in ("theta_type", "theta_attr", "theta_rel"):
            v = getattr(self, name)
            if not 0.0 <= v <= 1.0:
                raise ValueError(f"{name} must lie in [0, 1], got {v}")


class DescriptorKind(enum.Enum):
    TYPE = "type"
    ATTRIBUTE = "attribute"
    RELATION = "relation"
    ORDINAL = "ordinal"


@dataclass(frozen=True)
class Descriptor:
    kind: DescriptorKind
    surface: str
    extension: frozenset[str]

    def __post_init__(self):
        if not self.surface.strip():
            raise ValueError("descriptor surface must be non-empty")
        object.__setattr__(self, "extension", frozenset(self.extension))

    @property
    def key(self) -> tuple[DescriptorKind, str]:
        return (self.kind, self.surface)

    @property
    def words(self) -> list[str]:
        return self.surface.split()

    def __repr__(self):
        return f"Descriptor({self.kind.value}:{self.surface!r}, {sorted(self.extension)})"


class DescriptorSpace:
    """Ordered, deduplicated collection of descriptors over a fixed object set.

    Order is deterministic: types, attributes, relations, then ordinals, each
    group sorted by surface.  Greedy speakers break ties by this order.
    """

    _KIND_ORDER = {k: i for i, k in enumerate(DescriptorKind)}

    def __init__(self, descriptors: Iterable[Descriptor], object_ids: Iterable[str]):
        self.object_ids = tuple(object_ids)
        ids = set(self.object_ids)
        merged: dict[tuple, set[str]] = {}
        for d in descriptors:
            if not d.extension <= ids:
                raise SemanticsError(f"descriptor {d.surface!r} refers to unknown objects")
            merged.setdefault(d.key, set()).update(d.extension)
        ds = [Descriptor(k, s, frozenset(ext)) for (k, s), ext in merged.items() if ext]
        ds.sort(key=lambda d: (self._KIND_ORDER[d.kind], d.surface))
        self.descriptors: tuple[Descriptor, ...] = tuple(ds)
        self._by_key = {d.key: d for d in ds}

    def __iter__(self) -> Iterator[Descriptor]:
        return iter(self.descriptors)

    def __len__(self):
        return len(self.descriptors)

    def __getitem__(self, i) -> Descriptor:
        return self.descriptors[i]

    def lookup(self, kind: DescriptorKind, surface: str) -> Descriptor:
        return self._by_key[(kind, surface)]

    def by_surface(self, surface: str) -> list[Descriptor]:
        return [d for d in self.descriptors if d.surface == surface]

    def __repr__(self):
        return f"DescriptorSpace({len(self)} descriptors over {len(self.object_ids)} objects)"


class Distribution(Mapping[str, float]):
    """Probability mass over object ids.  Immutable; insertion order is preserved."""

    __slots__ = ("_p",)

    def __init__(self, probabilities: Mapping[str, float]):
        p = {k: float(v) for k, v in probabilities.items()}
        if not p:
            raise ValueError("distribution over no objects")
        for k, v in p.items():
            if not (v >= 0.0 and math.isfinite(v)):
                raise ValueError(f"invalid probability {v!r} for {k!r}")
        total = math.fsum(p.values())
        if abs(total - 1.0) > NORMALIZATION_TOL:
            raise ValueError(f"probabilities sum to {total}, not 1")
        self._p = p

    @classmethod
    def normalized(cls, weights: Mapping[str, float]) -> "Distribution":
        total = math.fsum(weights.values())
        if not total > 0.0:
            raise ValueError("cannot normalize zero mass")
        return cls({k: v / total for k, v in weights.items()})

    @classmethod
    def uniform(cls, ids: Iterable[str]) -> "Distribution":
        ids = list(ids)
        return cls({k: 1.0 / len(ids) for k in ids})

    def __getitem__(self, k):
        return self._p[k]

    def __iter__(self):
        return iter(self._p)

    def __len__(self):
        return len(self._p)

    @property
    def support(self) -> frozenset[str]:
        return frozenset(k for k, v in self._p.items() if v > 0.0)

    def argmax(self) -> str:
        return max(self._p, key=self._p.__getitem__)

    def as_dict(self) -> dict[str, float]:
        return dict(self._p)

    def __repr__(self):
        inner = ", ".join(f"{k}: {v:.4g}" for k, v in self._p.items())
        return f"Distribution({{{inner}}})"


def categorize(
    scene: GradedScene,
    theta: ThresholdTable | None = None,
    ordinals: list[tuple[str, str]] | None = None,
) -> DescriptorSpace:
    """Threshold a graded scene into its descriptor space.

    ``ordinals`` are (object id, label) pairs from
    :func:`~iterative_rsa.scene_prep.synthesize_ordinals`; they are computed
    from ``scene`` when omitted.  Ordinal labels shared across categories
    (every category has a "left") merge into one descriptor.
    """
    theta = theta or ThresholdTable()
    if ordinals is None:
        ordinals = synthesize_ordinals(scene)
    ds: list[Descriptor] = []
    byid = {o.id: o for o in scene.objects}

    for o in scene.objects:
        for label, s in o.type_scores.items():
            if s >= theta.theta_type:
                ds.append(Descriptor(DescriptorKind.TYPE, label, frozenset([o.id])))
        for label, s in o.attribute_scores.items():
            if s >= theta.theta_attr:
                ds.append(Descriptor(DescriptorKind.ATTRIBUTE, label, frozenset([o.id])))
    for r in scene.relations:
        if r.score >= theta.theta_rel:
            surface = f"{r.predicate} {byid[r.object].category}"
            ds.append(Descriptor(DescriptorKind.RELATION, surface, frozenset([r.subject])))
    for oid, label in ordinals:
        if oid not in byid:
            raise SemanticsError(f"ordinal for unknown object {oid!r}")
        ds.append(Descriptor(DescriptorKind.ORDINAL, label, frozenset([oid])))

    space = DescriptorSpace(ds, scene.ids)
    if not len(space):
        raise SemanticsError("scene yields no descriptors")
    return space


def salience_prior(scene: GradedScene) -> Distribution:
    """Prior over objects proportional to bounding-box area."""
    if not scene.objects:
        raise ValueError("salience prior of an empty scene")
    return Distribution.normalized({o.id: o.box.area for o in scene.objects})


def truth(d: Descriptor, o: str, space: DescriptorSpace | None = None) -> int:
    if space is not None and o not in space.object_ids:
        raise KeyError(f"unknown object id {o!r}")
    return 1 if o in d.extension else 0
