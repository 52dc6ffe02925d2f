"""Count-based word n-gram model supplying plausibility scores for descriptors.

Conditional probabilities use add-k smoothing over the training vocabulary
plus an ``<unk>`` slot, so every seen context yields a proper distribution.
Contexts never observed in training back off to their longest observed
suffix.
"""

from __future__ import annotations

import json
from collections import Counter
from typing import Iterable, Protocol, Sequence

__all__ = [
    "LanguageModel",
    "OffModel",
    "NgramModel",
    "train",
    "tokenize",
    "load_corpus",
    "descriptor_prob",
]

BOS = "<s>"
UNK = "<unk>"


def tokenize(text: str) -> list[str]:
    return text.lower().split()


class LanguageModel(Protocol):
    def descriptor_prob(self, words: Sequence[str], history: Sequence[str]) -> float:
        """P(words | history), a value in [0, 1]."""
        ...


class OffModel:
    """Disabled language model: contributes nothing to speaker utility."""

    order = 0

    def descriptor_prob(self, words, history) -> float:
        return 0.0

    def __repr__(self):
        return "OffModel()"


class NgramModel:
    def __init__(self, order: int, counts: dict[tuple[str, ...], Counter], smoothing_k: float = 0.1):
        if order < 1:
            raise ValueError("order must be >= 1")
        if not smoothing_k > 0:
            raise ValueError("smoothing_k must be positive")
        self.order = order
        self.smoothing_k = float(smoothing_k)
        self.counts = {ctx: Counter(c) for ctx, c in counts.items()}
        if () not in self.counts or not sum(self.counts[()].values()):
            raise ValueError("model has no unigram counts")
        self.vocab = frozenset(self.counts[()])
        self._totals = {ctx: sum(c.values()) for ctx, c in self.counts.items()}

    @property
    def n_outcomes(self) -> int:
        """Size of the predicted event space: vocabulary plus ``<unk>``."""
        return len(self.vocab) + 1

    def _context(self, history: Sequence[str]) -> tuple[str, ...]:
        n = self.order - 1
        if n == 0:
            return ()
        padded = [BOS] * n + [w.lower() for w in history]
        return tuple(padded[-n:])

    def backoff_context(self, context: Sequence[str]) -> tuple[str, ...]:
        """Longest suffix of ``context`` that was observed in training."""
        ctx = tuple(context)[-(self.order - 1):] if self.order > 1 else ()
        while ctx and ctx not in self.counts:
            ctx = ctx[1:]
        return ctx

    def prob(self, word: str, context: Sequence[str] = ()) -> float:
        ctx = self.backoff_context(context)
        w = word.lower()
        c = self.counts[ctx].get(w, 0) if w in self.vocab else 0
        return (c + self.smoothing_k) / (self._totals[ctx] + self.smoothing_k * self.n_outcomes)

    def descriptor_prob(self, words: Sequence[str], history: Sequence[str]) -> float:
        hist = list(history)
        p = 1.0
        for w in words:
            p *= self.prob(w, self._context(hist))
            hist.append(w)
        return p

    def to_dict(self) -> dict:
        return {
            "order": self.order,
            "smoothing_k": self.smoothing_k,
            "counts": {" ".join(ctx): dict(sorted(c.items())) for ctx, c in sorted(self.counts.items())},
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=1, sort_keys=True)

    @classmethod
    def from_dict(cls, doc: dict) -> "NgramModel":
        counts = {tuple(k.split()): Counter(v) for k, v in doc["counts"].items()}
        return cls(int(doc["order"]), counts, float(doc["smoothing_k"]))

    @classmethod
    def from_json(cls, text: str) -> "NgramModel":
        return cls.from_dict(json.loads(text))

    def __repr__(self):
        return f"NgramModel(order={self.order}, vocab={len(self.vocab)}, k={self.smoothing_k})"


def train(corpus: Iterable[str | Sequence[str]], n: int = 3, smoothing_k: float = 0.1) -> NgramModel:
    """Count every k-gram (k <= n) in ``corpus`` with start padding.

    Corpus items are either raw expressions (whitespace-tokenized and
    lowercased) or pre-tokenized word lists.  Start symbols only ever occur
    as context; there is no end symbol.
    """
    if n < 1:
        raise ValueError("n must be >= 1")
    counts: dict[tuple[str, ...], Counter] = {}
    n_sent = 0
    for item in corpus:
        words = tokenize(item) if isinstance(item, str) else [w.lower() for w in item]
        if not words:
            continue
        n_sent += 1
        padded = [BOS] * (n - 1) + words
        for i in range(n - 1, len(padded)):
            w = padded[i]
            for k in range(n):
                ctx = tuple(padded[i - k:i])
                counts.setdefault(ctx, Counter())[w] += 1
    if not n_sent:
        raise ValueError("empty corpus; use OffModel for a disabled language model")
    return NgramModel(n, counts, smoothing_k)


def load_corpus(path) -> list[str]:
    with open(path, encoding="utf-8") as f:
        return [line.strip() for line in f if line.strip()]


def descriptor_prob(d, history, model: LanguageModel | None) -> float:
    """P_ngram of descriptor ``d`` given the word sequence of ``history``.

    ``history`` is an :class:`~iterative_rsa.rsa_core.Expression`, a sequence
    of descriptors, or a plain word list.
    """
    if model is None:
        return 0.0
    return model.descriptor_prob(d.words, _history_words(history))


def _history_words(history) -> list[str]:
    if history is None:
        return []
    if hasattr(history, "words"):
        return list(history.words)
    out = []
    for h in history:
        out.extend(h.words if hasattr(h, "words") else [h])
    return out
