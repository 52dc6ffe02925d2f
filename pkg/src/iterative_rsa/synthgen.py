"""Seeded synthetic scenes with controlled discriminability, plus a brute-force oracle.

Scores are drawn from two bands kept well away from the default thresholds:
"present" scores lie in [0.65, 1] and "absent" tail scores in [0, 0.2].
Boxes sit in disjoint grid cells with areas within a factor of four of each
other, so any belief spread over two or more objects has entropy above
0.7 bits.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass

import numpy as np

from .errors import GenerationError, NoUtterableDescriptor
from .rsa_core import Expression, Mode, RsaConfig
from .scene_model import BoundingBox, GradedObject, GradedRelation, GradedScene, TargetSpec

__all__ = ["Guarantee", "SynthParams", "generate_scene", "brute_force_oracle", "ORACLE_MAX_OBJECTS", "ORACLE_MAX_DESCRIPTORS"]

TYPE_POOL = ["dog", "cat", "train", "person", "car", "pizza", "chair", "horse", "bus", "cup"]
ATTR_POOL = ["red", "black", "white", "small", "large", "wooden", "striped", "cooking", "standing", "sitting", "open", "parked"]
PRED_POOL = ["with", "on", "near", "holding", "behind"]

CELL = 100.0
GRID_COLS, GRID_ROWS = 6, 4

ORACLE_MAX_OBJECTS = 6
ORACLE_MAX_DESCRIPTORS = 20


class Guarantee(enum.Enum):
    UNIQUE_TYPE = "unique_type"
    UNIQUE_ATTRIBUTE = "unique_attribute"
    RELATION_ONLY = "relation_only"
    AMBIGUOUS = "ambiguous"


@dataclass(frozen=True)
class SynthParams:
    n_objects: tuple[int, int] = (2, 6)
    n_types: tuple[int, int] = (2, 3)
    n_attributes: tuple[int, int] = (1, 4)
    n_relations: tuple[int, int] = (0, 3)
    noise: float = 0.5
    guarantee: Guarantee = Guarantee.UNIQUE_TYPE
    seed: int = 0

    def __post_init__(self):
        if isinstance(self.guarantee, str):
            object.__setattr__(self, "guarantee", Guarantee(self.guarantee))
        for name in ("n_objects", "n_types", "n_attributes", "n_relations"):
            lo, hi = getattr(self, name)
            if lo > hi or lo < 0:
                raise ValueError(f"{name} range {lo}..{hi} is empty")
        if not 0.0 <= self.noise <= 1.0:
            raise ValueError("noise must lie in [0, 1]")


# minimum (objects, types, attributes, relations) per guarantee
_FEASIBLE = {
    Guarantee.UNIQUE_TYPE: (1, 1, 0, 0),
    Guarantee.UNIQUE_ATTRIBUTE: (2, 1, 1, 0),
    Guarantee.RELATION_ONLY: (3, 2, 0, 1),
    Guarantee.AMBIGUOUS: (2, 2, 0, 0),
}


class _Builder:
    def __init__(self, p: SynthParams):
        self.p = p
        self.rng = np.random.default_rng(p.seed)

    def draw(self, rng_range, floor):
        lo, hi = rng_range
        lo = max(lo, floor)
        if lo > hi:
            raise ValueError(f"infeasible parameters for {self.p.guarantee.value}: need at least {floor}, range {rng_range}")
        return int(self.rng.integers(lo, hi + 1))

    def present(self) -> float:
        return round(1.0 - 0.35 * self.p.noise * self.rng.random(), 4)

    def absent(self) -> float:
        return round(0.2 * self.p.noise * self.rng.random(), 4)

    def tail(self, labels, exclude=()):
        """Sparse sub-threshold scores for a random subset of ``labels``."""
        return {l: self.absent() for l in labels if l not in exclude and self.rng.random() < 0.3}


def generate_scene(p: SynthParams) -> GradedScene:
    """Build a scene whose target is described by ``scene.target``; deterministic in ``p.seed``."""
    b = _Builder(p)
    rng = b.rng
    g = p.guarantee
    min_obj, min_types, min_attrs, min_rels = _FEASIBLE[g]
    n = b.draw(p.n_objects, min_obj)
    if n > GRID_COLS * GRID_ROWS:
        raise ValueError(f"at most {GRID_COLS * GRID_ROWS} objects supported")
    nt = b.draw(p.n_types, max(min_types, 2 if (g is Guarantee.UNIQUE_TYPE and n > 1) else 0,
                                3 if (g is Guarantee.AMBIGUOUS and n > 2) else 0))
    na = b.draw(p.n_attributes, min_attrs)
    nr = b.draw(p.n_relations, min_rels)

    types = [str(x) for x in rng.permutation(TYPE_POOL)[:nt]]
    attrs = [str(x) for x in rng.permutation(ATTR_POOL)[:na]]
    preds = [str(x) for x in rng.permutation(PRED_POOL)[: max(1, min(nr, len(PRED_POOL)))]]

    target = 0
    cats: list[str] = [""] * n
    type_scores: list[dict] = [dict() for _ in range(n)]
    attr_sets: list[set] = [set() for _ in range(n)]

    if g is Guarantee.UNIQUE_TYPE:
        cats[0] = types[0]
        for i in range(1, n):
            cats[i] = types[int(rng.integers(1, nt))]
    elif g is Guarantee.AMBIGUOUS:
        cats[0], cats[1] = types[0], types[1]
        for i in range(2, n):
            cats[i] = types[int(rng.integers(2, nt))]
    else:
        cats[0] = cats[1] = types[0]
        for i in range(2, n):
            lo = 1 if g is Guarantee.RELATION_ONLY and i == 2 else 0
            cats[i] = types[int(rng.integers(lo, nt))] if nt > lo else types[0]

    for i in range(n):
        type_scores[i] = {cats[i]: b.present()}
        for l in attrs:
            if rng.random() < 0.4:
                attr_sets[i].add(l)

    same_type = [i for i in range(1, n) if cats[i] == cats[0]]
    if g is Guarantee.UNIQUE_TYPE:
        pass
    elif g is Guarantee.UNIQUE_ATTRIBUTE:
        key = attrs[0]
        for i in range(n):
            attr_sets[i].discard(key)
        attr_sets[0].add(key)
        for i in same_type:
            attr_sets[i] |= attr_sets[0] - {key}
    elif g is Guarantee.RELATION_ONLY:
        for i in same_type:
            attr_sets[i] |= attr_sets[0]
    elif g is Guarantee.AMBIGUOUS:
        hi = type_scores[0][cats[0]]
        type_scores[0][cats[1]] = round(hi - 0.1, 4)
        type_scores[1] = {cats[1]: hi, cats[0]: round(hi - 0.1, 4)}
        attr_sets[1] = set(attr_sets[0])

    relations: list[tuple[int, str, int]] = []
    if g is Guarantee.RELATION_ONLY:
        anchor = 2
        pred = preds[0]
        relations.append((0, pred, anchor))
        rel_pool = [(s, q, o) for s in range(n) for q in preds for o in range(n)
                    if s != o and s != 0 and not (s in same_type and q == pred and cats[o] == cats[anchor])]
    elif g is Guarantee.AMBIGUOUS:
        rel_pool = [(s, q, o) for s in range(2, n) for q in preds for o in range(n) if s != o]
    else:
        rel_pool = [(s, q, o) for s in range(n) for q in preds for o in range(n) if s != o]
    extra = nr - len(relations)
    if extra > 0 and rel_pool:
        pick = rng.choice(len(rel_pool), size=min(extra, len(rel_pool)), replace=False)
        relations.extend(rel_pool[int(k)] for k in sorted(pick))

    # sub-threshold tails never touch labels that carry a guarantee
    protected_types = {cats[0]} | ({cats[1]} if g is Guarantee.AMBIGUOUS else set())
    for i in range(n):
        twin = g is Guarantee.AMBIGUOUS and i in (0, 1)
        excl = set(type_scores[i]) | (set() if twin else protected_types)
        for l, s in b.tail(types, exclude=excl).items():
            type_scores[i][l] = s
    attr_scores = [{l: b.present() for l in sorted(attr_sets[i])} for i in range(n)]
    for i in range(n):
        for l, s in b.tail(attrs, exclude=set(attr_scores[i])).items():
            attr_scores[i][l] = s
    if g is Guarantee.AMBIGUOUS:
        attr_scores[1] = {l: attr_scores[0][l] for l in sorted(attr_sets[0])}

    cells = rng.choice(GRID_COLS * GRID_ROWS, size=n, replace=False)
    boxes = []
    for c in cells:
        cx, cy = int(c) % GRID_COLS, int(c) // GRID_COLS
        w, h = (float(v) for v in rng.integers(40, 81, size=2))
        x = cx * CELL + float(rng.integers(0, int(CELL - w) + 1))
        y = cy * CELL + float(rng.integers(0, int(CELL - h) + 1))
        boxes.append(BoundingBox(x, y, w, h))

    order = [int(i) for i in rng.permutation(n)]
    ids = {orig: f"o{pos + 1}" for pos, orig in enumerate(order)}
    objects = [
        GradedObject(ids[i], boxes[i], type_scores[i], attr_scores[i]) for i in order
    ]
    rels = [
        GradedRelation(ids[s], q, ids[o], b.present()) for s, q, o in relations
    ]
    tspec = TargetSpec(boxes[target], dict(type_scores[target]), dict(attr_scores[target]))
    return GradedScene(
        f"synth-{g.value}-{p.seed}", GRID_COLS * CELL, GRID_ROWS * CELL, tuple(objects), tuple(rels), tspec
    )


# -- oracle ---------------------------------------------------------------

_ORACLE_TIE = 1e-12


def brute_force_oracle(space, target, prior, lm=None, cfg: RsaConfig | None = None) -> Expression:
    """Greedy Iterative RSA recomputed with plain loops.

    Deliberately shares no arithmetic with :mod:`iterative_rsa.rsa_core` so
    both can be checked against each other.
    """
    cfg = cfg or RsaConfig()
    if cfg.mode is not Mode.GREEDY:
        raise ValueError("the oracle reproduces greedy generation only")
    descs = list(space)
    objects = list(prior.keys())
    if len(descs) > ORACLE_MAX_DESCRIPTORS or len(objects) > ORACLE_MAX_OBJECTS:
        raise ValueError(f"oracle bound exceeded: {len(descs)} descriptors, {len(objects)} objects")

    belief = {o: prior[o] for o in objects}
    chosen = []
    for step in range(cfg.max_len):
        if step > 0:
            h = 0.0
            for o in objects:
                if belief[o] > 0:
                    h -= belief[o] * math.log2(belief[o])
            if h <= cfg.entropy_stop:
                break
        used = [(d.kind, d.surface) for d in chosen]
        history_words = []
        for d in chosen:
            history_words += d.surface.split()
        cands = []
        for d in descs:
            if (d.kind, d.surface) in used:
                continue
            if not any(belief[o] > 0 and o in d.extension for o in objects):
                continue
            cands.append(d)
        best_i, best_u = None, None
        utilities = []
        for d in cands:
            mass = 0.0
            for o in objects:
                if o in d.extension:
                    mass += belief[o]
            l0 = belief[target] / mass if (target in d.extension and belief[target] > 0) else 0.0
            ng = 0.0
            if cfg.lm_weight and lm is not None:
                ng = lm.descriptor_prob(d.surface.split(), history_words)
            if l0 + ng > 0:
                u = math.log(l0 + ng) - cfg.beta * len(d.surface.split())
            else:
                u = float("-inf")
            utilities.append(u)
        finite = [u for u in utilities if u != float("-inf")]
        if not finite:
            if not chosen:
                raise NoUtterableDescriptor("oracle: speaker has no utterable descriptor")
            break
        if cfg.alpha == 0:
            best_i = next(i for i, u in enumerate(utilities) if u != float("-inf"))
        else:
            best_u = max(finite)
            best_i = next(i for i, u in enumerate(utilities) if u >= best_u - _ORACLE_TIE)
        pick = cands[best_i]
        new_belief = {}
        z = 0.0
        for o in objects:
            z += belief[o] if o in pick.extension else 0.0
        if z <= 0:
            raise GenerationError("oracle: descriptor eliminates all candidates")
        for o in objects:
            new_belief[o] = belief[o] / z if o in pick.extension else 0.0
        belief = new_belief
        chosen.append(pick)
    return Expression(tuple(chosen))
