"""Simulated comprehension and corpus evaluation of generated expressions.

Comprehension uses categorical truth: the simulated listener collects every
object satisfying all descriptors of the expression, and the outcome is
classified with the human-study error taxonomy.  "Not highlighted" cannot be
observed without people picking boxes; it is approximated by the case where
the referent had to be appended because no detected object covered the
target box.
"""

from __future__ import annotations

import enum
import json
import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Mapping, Sequence

from .metrics import bleu, meteor_exact, rouge_l
from .ngram_lm import LanguageModel
from .pipeline import prepare_scene
from .rsa_core import Expression, RsaConfig, generate, pragmatic_listener, render
from .scene_model import GradedScene, parse_scene
from .scene_prep import MIN_OVERLAP, AlignmentResult
from .semantics import DescriptorSpace, ThresholdTable

__all__ = [
    "Outcome",
    "InstanceResult",
    "MetricsReport",
    "matching_objects",
    "classify",
    "adjusted_accuracy",
    "summarize",
    "merge_reports",
    "evaluate_instance",
    "evaluate_dataset",
    "load_dataset",
]

REPORT_NOTES = (
    "overlap metrics are averaged per instance; errored instances score 0",
    "not_highlighted is a proxy: referent appended with best overlap below 0.8",
)


class Outcome(enum.Enum):
    TRUE = "true"
    FALSE = "false"
    UNDER_INFORMATIVE = "under_informative"
    NO_MATCH = "no_match"
    NOT_HIGHLIGHTED = "not_highlighted"


def matching_objects(expression: Iterable, space: DescriptorSpace) -> frozenset[str]:
    m = set(space.object_ids)
    for d in expression:
        m &= d.extension
    return frozenset(m)


def classify(
    expression: Expression | Sequence,
    space: DescriptorSpace,
    target: str,
    alignment: AlignmentResult | None = None,
) -> Outcome:
    if alignment is not None and alignment.added_new and alignment.best_overlap < MIN_OVERLAP:
        return Outcome.NOT_HIGHLIGHTED
    m = matching_objects(expression, space)
    if not m:
        return Outcome.NO_MATCH
    if target not in m:
        return Outcome.FALSE
    return Outcome.TRUE if len(m) == 1 else Outcome.UNDER_INFORMATIVE


def adjusted_accuracy(counts: Mapping) -> float | None:
    """True / (True + False + UnderInformative); None when the denominator is zero.

    Keys may be :class:`Outcome` members or their string values; counts may
    be raw tallies or percentages.
    """
    def get(o: Outcome) -> float:
        return float(counts.get(o, counts.get(o.value, 0)))

    denom = get(Outcome.TRUE) + get(Outcome.FALSE) + get(Outcome.UNDER_INFORMATIVE)
    if denom <= 0:
        return None
    return get(Outcome.TRUE) / denom


@dataclass
class InstanceResult:
    key: str
    outcome: Outcome
    expression: str = ""
    references: tuple[str, ...] = ()
    bleu: float = 0.0
    rouge_l: float = 0.0
    meteor: float = 0.0
    listener_correct: bool = False
    n_descriptors: int = 0
    truncated: bool = False
    error: str | None = None

    def to_dict(self) -> dict:
        return {
            "key": self.key,
            "outcome": self.outcome.value,
            "expression": self.expression,
            "references": list(self.references),
            "bleu": self.bleu,
            "rouge_l": self.rouge_l,
            "meteor": self.meteor,
            "listener_correct": self.listener_correct,
            "n_descriptors": self.n_descriptors,
            "truncated": self.truncated,
            "error": self.error,
        }


@dataclass
class MetricsReport:
    counts: dict[Outcome, int]
    n_instances: int
    raw_accuracy: float
    adjusted_accuracy: float | None
    bleu: float
    rouge_l: float
    meteor: float
    listener_accuracy: float
    rows: list[InstanceResult] = field(default_factory=list)
    notes: tuple[str, ...] = REPORT_NOTES

    def to_dict(self) -> dict:
        return {
            "notes": list(self.notes),
            "n_instances": self.n_instances,
            "counts": {o.value: self.counts[o] for o in Outcome},
            "raw_accuracy": self.raw_accuracy,
            "adjusted_accuracy": self.adjusted_accuracy,
            "bleu": self.bleu,
            "rouge_l": self.rouge_l,
            "meteor": self.meteor,
            "pragmatic_listener_accuracy": self.listener_accuracy,
            "instances": [r.to_dict() for r in self.rows],
        }

    def to_json(self, indent: int | None = 2) -> str:
        return json.dumps(self.to_dict(), indent=indent)


def summarize(rows: Sequence[InstanceResult]) -> MetricsReport:
    """Aggregate instance rows.  The result does not depend on row order."""
    rows = sorted(rows, key=lambda r: r.key)
    n = len(rows)
    if not n:
        raise ValueError("cannot summarize an empty dataset")
    counts = {o: 0 for o in Outcome}
    for r in rows:
        counts[r.outcome] += 1

    def mean(attr):
        return math.fsum(getattr(r, attr) for r in rows) / n

    return MetricsReport(
        counts=counts,
        n_instances=n,
        raw_accuracy=counts[Outcome.TRUE] / n,
        adjusted_accuracy=adjusted_accuracy(counts),
        bleu=mean("bleu"),
        rouge_l=mean("rouge_l"),
        meteor=mean("meteor"),
        listener_accuracy=sum(r.listener_correct for r in rows) / n,
        rows=list(rows),
    )


def merge_reports(*reports: MetricsReport) -> MetricsReport:
    return summarize([r for rep in reports for r in rep.rows])


def _load(scene) -> GradedScene:
    if isinstance(scene, GradedScene):
        return scene
    return parse_scene(Path(scene).read_bytes())


def evaluate_instance(
    scene: GradedScene | str | os.PathLike,
    references: Sequence[str],
    cfg: RsaConfig | None = None,
    theta: ThresholdTable | None = None,
    lm: LanguageModel | None = None,
    overlap: str = "coverage",
    key: str | None = None,
) -> InstanceResult:
    """Run align, ordinals, categorize, generate, classify and score one instance.

    Pipeline failures never raise; they yield a ``NO_MATCH`` row with the
    error recorded.
    """
    if key is None:
        key = scene.image_id if isinstance(scene, GradedScene) else str(scene)
    refs = tuple(references)
    try:
        prep = prepare_scene(_load(scene), theta, overlap)
        expr, trace = generate(prep.space, prep.target, prep.prior, lm, cfg)
    except Exception as e:  # noqa: BLE001 - every failure becomes a row
        return InstanceResult(key, Outcome.NO_MATCH, references=refs, error=f"{type(e).__name__}: {e}")

    text = render(expr)
    scores = (0.0, 0.0, 0.0)
    if refs and text:
        scores = (bleu(text, refs), rouge_l(text, refs), meteor_exact(text, refs))
    try:
        posterior = pragmatic_listener(expr, prep.prior, prep.space, lm, cfg)
        correct = posterior.argmax() == prep.target and posterior[prep.target] > 0.5
    except Exception:  # noqa: BLE001
        correct = False
    return InstanceResult(
        key,
        classify(expr, prep.space, prep.target, prep.alignment),
        expression=text,
        references=refs,
        bleu=scores[0],
        rouge_l=scores[1],
        meteor=scores[2],
        listener_correct=correct,
        n_descriptors=len(expr),
        truncated=trace.truncated,
    )


def evaluate_dataset(
    dataset: Sequence[tuple],
    cfg: RsaConfig | None = None,
    theta: ThresholdTable | None = None,
    lm: LanguageModel | None = None,
    overlap: str = "coverage",
    workers: int = 1,
) -> MetricsReport:
    """Evaluate ``(scene, references)`` pairs; scenes may be paths or GradedScene values."""
    if not dataset:
        raise ValueError("dataset is empty")

    def run(i_item):
        i, (scene, refs) = i_item
        key = scene.image_id if isinstance(scene, GradedScene) else str(scene)
        return evaluate_instance(scene, refs, cfg, theta, lm, overlap, key=f"{i:06d}:{key}")

    items = list(enumerate(dataset))
    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as ex:
            rows = list(ex.map(run, items))
    else:
        rows = [run(it) for it in items]
    return summarize(rows)


def load_dataset(path) -> list[tuple[str, list[str]]]:
    """Read a JSONL dataset; relative scene paths resolve against the file's directory."""
    path = Path(path)
    out = []
    with open(path, encoding="utf-8") as f:
        for lineno, line in enumerate(f, 1):
            if not line.strip():
                continue
            try:
                doc = json.loads(line)
                scene = doc["scene"]
                refs = doc.get("references", [])
            except (json.JSONDecodeError, KeyError, TypeError) as e:
                raise ValueError(f"{path}:{lineno}: invalid dataset line ({e})") from None
            if not isinstance(refs, list) or not all(isinstance(r, str) for r in refs):
                raise ValueError(f"{path}:{lineno}: references must be a list of strings")
            p = Path(scene)
            if not p.is_absolute():
                p = path.parent / p
            out.append((str(p), refs))
    return out
