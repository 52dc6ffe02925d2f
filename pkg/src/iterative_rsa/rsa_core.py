"""Iterative RSA: literal listener, pragmatic speaker/listener, and the generator loop.

The speaker emits one descriptor per step.  After each step the listener's
belief over objects is updated by the literal listener, and generation
stops once that belief is sharp enough (entropy at most ``entropy_stop``
bits) or ``max_len`` descriptors have been produced.
"""

from __future__ import annotations

import enum
import json
import math
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .errors import GenerationError, NoUtterableDescriptor
from .ngram_lm import LanguageModel, descriptor_prob
from .semantics import Descriptor, DescriptorKind, DescriptorSpace, Distribution

__all__ = [
    "Mode",
    "RsaConfig",
    "Expression",
    "CandidateScore",
    "StepRecord",
    "GenerationTrace",
    "literal_listener",
    "cost",
    "utility",
    "speaker_scores",
    "pragmatic_speaker",
    "pragmatic_listener",
    "entropy",
    "generate",
    "render",
    "greedy_choice",
]

# Utilities within this distance of the maximum count as tied.
TIE_EPS = 1e-12


class Mode(enum.Enum):
    GREEDY = "greedy"
    SAMPLE = "sample"


@dataclass(frozen=True)
class RsaConfig:
    alpha: float = 1.0
    max_len: int = 4
    entropy_stop: float = 0.1
    beta: float = 0.0
    mode: Mode = Mode.GREEDY
    seed: int = 0
    lm_weight: bool = True

    def __post_init__(self):
        if isinstance(self.mode, str):
            object.__setattr__(self, "mode", Mode(self.mode))
        if not self.alpha >= 0:
            raise ValueError("alpha must be >= 0")
        if int(self.max_len) != self.max_len or self.max_len < 1:
            raise ValueError("max_len must be a positive integer")
        if not self.entropy_stop >= 0:
            raise ValueError("entropy_stop must be >= 0")
        if not self.beta >= 0:
            raise ValueError("beta must be >= 0")


@dataclass(frozen=True)
class Expression:
    descriptors: tuple[Descriptor, ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "descriptors", tuple(self.descriptors))
        keys = [d.key for d in self.descriptors]
        if len(set(keys)) != len(keys):
            raise ValueError("expression repeats a descriptor")

    def __len__(self):
        return len(self.descriptors)

    def __iter__(self):
        return iter(self.descriptors)

    def __contains__(self, d):
        return any(d.key == e.key for e in self.descriptors)

    def append(self, d: Descriptor) -> "Expression":
        return Expression(self.descriptors + (d,))

    @property
    def words(self) -> list[str]:
        """Descriptor surfaces in generation order, as the language model sees them."""
        return [w for d in self.descriptors for w in d.words]

    @property
    def surfaces(self) -> list[str]:
        return [d.surface for d in self.descriptors]

    @property
    def rendered(self) -> str:
        return render(self)


@dataclass(frozen=True)
class CandidateScore:
    descriptor: Descriptor
    p_l0: float
    p_ngram: float
    cost: float
    utility: float
    speaker_prob: float

    def to_dict(self) -> dict:
        return {
            "kind": self.descriptor.kind.value,
            "surface": self.descriptor.surface,
            "p_l0": self.p_l0,
            "p_ngram": self.p_ngram,
            "cost": self.cost,
            "utility": None if self.utility == -math.inf else self.utility,
            "speaker_prob": self.speaker_prob,
        }


@dataclass(frozen=True)
class StepRecord:
    step: int
    candidates: tuple[CandidateScore, ...]
    chosen: Descriptor
    posterior: Distribution
    entropy_before: float
    entropy_after: float

    def to_dict(self) -> dict:
        return {
            "step": self.step,
            "chosen": {"kind": self.chosen.kind.value, "surface": self.chosen.surface},
            "entropy_before": self.entropy_before,
            "entropy_after": self.entropy_after,
            "posterior": self.posterior.as_dict(),
            "candidates": [c.to_dict() for c in self.candidates],
        }


@dataclass
class GenerationTrace:
    target: str
    prior: Distribution
    steps: list[StepRecord] = field(default_factory=list)
    truncated: bool = False
    note: str | None = None

    def __len__(self):
        return len(self.steps)

    def to_dict(self) -> dict:
        return {
            "target": self.target,
            "prior": self.prior.as_dict(),
            "truncated": self.truncated,
            "note": self.note,
            "expression": render(Expression(tuple(s.chosen for s in self.steps)))
            if self.steps else "",
            "steps": [s.to_dict() for s in self.steps],
        }

    def to_json(self, indent: int | None = 2) -> str:
        return json.dumps(self.to_dict(), indent=indent, sort_keys=False)


# -- listener / speaker ----------------------------------------------------


def literal_listener(d: Descriptor, prior: Distribution) -> Distribution:
    """Condition ``prior`` on the literal truth of ``d``."""
    weights = {o: (p if o in d.extension else 0.0) for o, p in prior.items()}
    total = math.fsum(weights.values())
    if not total > 0.0:
        raise GenerationError(f"descriptor {d.surface!r} eliminates all candidates")
    return Distribution({o: w / total for o, w in weights.items()})


def _p_l0(d: Descriptor, target: str, prior: Distribution) -> float:
    if target not in d.extension or prior.get(target, 0.0) <= 0.0:
        return 0.0
    mass = math.fsum(p for o, p in prior.items() if o in d.extension)
    return prior[target] / mass


def cost(d: Descriptor, beta: float) -> float:
    return -beta * len(d.words)


def utility(
    d: Descriptor,
    target: str,
    prior: Distribution,
    history: Expression | Sequence[Descriptor] = (),
    lm: LanguageModel | None = None,
    cfg: RsaConfig | None = None,
) -> float:
    """Speaker utility of ``d``: log(P_L0(target|d) + P_ngram(d|history)) + cost(d)."""
    return _score(d, target, prior, history, lm, cfg or RsaConfig())[3]


def _score(d, target, prior, history, lm, cfg):
    pl0 = _p_l0(d, target, prior)
    png = descriptor_prob(d, history, lm) if cfg.lm_weight else 0.0
    c = cost(d, cfg.beta)
    inner = pl0 + png
    u = math.log(inner) + c if inner > 0.0 else -math.inf
    return pl0, png, c, u


def _prune(candidates, prior: Distribution, history) -> list[Descriptor]:
    support = prior.support
    used = {d.key for d in history}
    return [d for d in candidates if d.key not in used and d.extension & support]


def _softmax(utilities: np.ndarray, alpha: float) -> np.ndarray:
    finite = np.isfinite(utilities)
    if not finite.any():
        raise NoUtterableDescriptor("every candidate has utility -inf")
    if alpha == 0:
        probs = finite.astype(float)
        return probs / probs.sum()
    logits = np.where(finite, alpha * np.where(finite, utilities, 0.0), -np.inf)
    logits = logits - logits[finite].max()
    w = np.exp(logits)
    return w / w.sum()


def speaker_scores(
    target: str,
    prior: Distribution,
    candidates: Sequence[Descriptor],
    history: Expression | Sequence[Descriptor] = (),
    lm: LanguageModel | None = None,
    cfg: RsaConfig | None = None,
) -> list[CandidateScore]:
    """Per-candidate speaker table over the pruned candidate set."""
    cfg = cfg or RsaConfig()
    history = history if isinstance(history, Expression) else Expression(tuple(history))
    pruned = _prune(candidates, prior, history)
    if not pruned:
        raise NoUtterableDescriptor("speaker has no utterable descriptor")
    rows = [_score(d, target, prior, history, lm, cfg) for d in pruned]
    probs = _softmax(np.array([r[3] for r in rows]), cfg.alpha)
    return [
        CandidateScore(d, pl0, png, c, u, float(p))
        for d, (pl0, png, c, u), p in zip(pruned, rows, probs)
    ]


def pragmatic_speaker(
    target: str,
    prior: Distribution,
    candidates: Sequence[Descriptor],
    history: Expression | Sequence[Descriptor] = (),
    lm: LanguageModel | None = None,
    cfg: RsaConfig | None = None,
) -> dict[Descriptor, float]:
    """P_S1(u | target) as a softmax of ``alpha * utility`` over pruned candidates.

    Candidates already in ``history`` or false of every object still in the
    support of ``prior`` are dropped first.
    """
    return {s.descriptor: s.speaker_prob for s in speaker_scores(target, prior, candidates, history, lm, cfg)}


def greedy_choice(scores: Sequence[CandidateScore], alpha: float) -> int:
    """Index of the first candidate whose utility ties the maximum."""
    if alpha == 0:
        return next(i for i, s in enumerate(scores) if s.speaker_prob > 0)
    best = max(s.utility for s in scores)
    return next(i for i, s in enumerate(scores) if s.utility >= best - TIE_EPS)


def pragmatic_listener(
    expression: Expression | Sequence[Descriptor],
    prior: Distribution,
    space: DescriptorSpace,
    lm: LanguageModel | None = None,
    cfg: RsaConfig | None = None,
) -> Distribution:
    """Invert the speaker one descriptor at a time.

    At step t every object in the current support is tried as the speaker's
    target; its belief is reweighted by how likely that speaker was to say
    the t-th descriptor.
    """
    cfg = cfg or RsaConfig()
    descs = tuple(expression)
    if not descs:
        raise ValueError("pragmatic listener needs a non-empty expression")
    belief = prior
    history = Expression()
    for d in descs:
        if not d.extension:
            raise GenerationError(f"descriptor {d.surface!r} has empty extension")
        pool = list(space.descriptors)
        if d.key not in {c.key for c in pool}:
            pool.append(d)
        weights = {}
        for o, p in belief.items():
            if p <= 0.0:
                weights[o] = 0.0
                continue
            try:
                sp = speaker_scores(o, belief, pool, history, lm, cfg)
            except NoUtterableDescriptor:
                weights[o] = 0.0
                continue
            s1 = next((s.speaker_prob for s in sp if s.descriptor.key == d.key), 0.0)
            weights[o] = s1 * p
        if not math.fsum(weights.values()) > 0.0:
            raise GenerationError("expression incompatible with scene")
        belief = Distribution.normalized(weights)
        history = history.append(d)
    return belief


def entropy(p: Distribution | Sequence[float] | np.ndarray) -> float:
    """Shannon entropy in bits, with 0 log 0 = 0."""
    vals = np.fromiter(p.values() if isinstance(p, Distribution) else p, dtype=float)
    nz = vals[vals > 0]
    h = float(-(nz * np.log2(nz)).sum())
    return h if h > 0.0 else 0.0


# -- generation ------------------------------------------------------------


def generate(
    space: DescriptorSpace | Sequence[Descriptor],
    target: str,
    prior: Distribution,
    lm: LanguageModel | None = None,
    cfg: RsaConfig | None = None,
) -> tuple[Expression, GenerationTrace]:
    """Produce a referring expression for ``target`` one descriptor at a time.

    The first step always runs.  Before every later step, generation stops if
    the listener's entropy is at most ``cfg.entropy_stop``.  If the speaker
    runs out of descriptors after at least one step, the partial expression
    is returned with ``trace.truncated`` set; on the first step the error
    propagates.
    """
    cfg = cfg or RsaConfig()
    if prior.get(target, 0.0) <= 0.0:
        raise GenerationError(f"target {target!r} is outside the prior's support")
    candidates = list(space)
    rng = np.random.default_rng(cfg.seed) if cfg.mode is Mode.SAMPLE else None
    expr = Expression()
    trace = GenerationTrace(target=target, prior=prior)
    belief = prior
    h = entropy(belief)
    for t in range(1, cfg.max_len + 1):
        if t > 1 and h <= cfg.entropy_stop:
            break
        try:
            scores = speaker_scores(target, belief, candidates, expr, lm, cfg)
        except NoUtterableDescriptor as e:
            if not len(expr):
                raise
            trace.truncated = True
            trace.note = str(e)
            break
        if rng is None:
            idx = greedy_choice(scores, cfg.alpha)
        else:
            probs = np.array([s.speaker_prob for s in scores])
            idx = int(rng.choice(len(scores), p=probs / probs.sum()))
        u = scores[idx].descriptor
        new_belief = literal_listener(u, belief)
        h_new = entropy(new_belief)
        trace.steps.append(StepRecord(t, tuple(scores), u, new_belief, h, h_new))
        expr = expr.append(u)
        belief, h = new_belief, h_new
    return expr, trace


def render(expression: Expression | Sequence[Descriptor]) -> str:
    """Surface string: ordinals, attributes, type, then relations.

    A definite article is prepended when an ordinal is present.
    """
    descs = list(expression)
    by = {k: [d.surface for d in descs if d.kind is k] for k in DescriptorKind}
    words = by[DescriptorKind.ORDINAL] + by[DescriptorKind.ATTRIBUTE] + by[DescriptorKind.TYPE] + by[DescriptorKind.RELATION]
    if by[DescriptorKind.ORDINAL]:
        words = ["the"] + words
    return " ".join(words)
