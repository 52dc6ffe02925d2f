"""Sentence-level overlap metrics: BLEU, ROUGE-L and exact-match METEOR.

All functions accept either strings (whitespace-tokenized, lowercased) or
token lists, and score a candidate against one or more references.
"""

from __future__ import annotations

import math
from collections import Counter
from functools import lru_cache
from typing import Sequence

__all__ = ["bleu", "rouge_l", "meteor_exact", "lcs_length", "meteor_alignment"]

BLEU_EPS = 1e-9
ROUGE_BETA = 1.2


def _tokens(x) -> list[str]:
    if isinstance(x, str):
        return x.lower().split()
    return [w.lower() for w in x]


def _prepare(candidate, references):
    cand = _tokens(candidate)
    if isinstance(references, str):
        references = [references]
    refs = [_tokens(r) for r in references]
    if not refs:
        raise ValueError("at least one reference is required")
    return cand, refs


def _ngrams(tokens: Sequence[str], n: int) -> Counter:
    return Counter(tuple(tokens[i:i + n]) for i in range(len(tokens) - n + 1))


def bleu(candidate, references, max_n: int = 4) -> float:
    """Sentence BLEU with clipped counts and the closest-length brevity penalty.

    Orders longer than the candidate contribute no n-grams and are left out
    of the geometric mean; a zero precision is replaced by ``BLEU_EPS``.
    """
    cand, refs = _prepare(candidate, references)
    if not cand:
        raise ValueError("empty candidate")
    orders = range(1, min(max_n, len(cand)) + 1)
    log_p = 0.0
    for n in orders:
        c_counts = _ngrams(cand, n)
        max_ref: Counter = Counter()
        for r in refs:
            for g, k in _ngrams(r, n).items():
                max_ref[g] = max(max_ref[g], k)
        clipped = sum(min(k, max_ref[g]) for g, k in c_counts.items())
        p = clipped / sum(c_counts.values())
        log_p += math.log(p if p > 0 else BLEU_EPS)
    c = len(cand)
    r = min((abs(len(x) - c), len(x)) for x in refs)[1]
    bp = math.exp(min(0.0, 1.0 - r / c))
    return bp * math.exp(log_p / len(orders))


def lcs_length(a: Sequence[str], b: Sequence[str]) -> int:
    prev = [0] * (len(b) + 1)
    for x in a:
        cur = [0]
        for j, y in enumerate(b):
            cur.append(prev[j] + 1 if x == y else max(prev[j + 1], cur[j]))
        prev = cur
    return prev[-1]


def rouge_l(candidate, references, beta: float = ROUGE_BETA) -> float:
    """LCS-based F-measure, maximized over references."""
    cand, refs = _prepare(candidate, references)
    best = 0.0
    for ref in refs:
        lcs = lcs_length(cand, ref)
        if lcs == 0:
            continue
        p, r = lcs / len(cand), lcs / len(ref)
        f = (1 + beta ** 2) * p * r / (r + beta ** 2 * p)
        best = max(best, f)
    return best


def meteor_alignment(cand: Sequence[str], ref: Sequence[str]) -> tuple[int, int]:
    """(matches, chunks) for the exact-match alignment with most matches, then fewest chunks."""
    cand, ref = tuple(cand), tuple(ref)
    positions = [tuple(j for j, y in enumerate(ref) if y == x) for x in cand]

    @lru_cache(maxsize=None)
    def best(i: int, used: int, prev: int) -> tuple[int, int]:
        # prev: reference index matched by candidate i-1, or -2 if unmatched
        if i == len(cand):
            return (0, 0)
        m, neg_ch = best(i + 1, used, -2)
        options = [(m, neg_ch)]
        for j in positions[i]:
            if used >> j & 1:
                continue
            m, neg_ch = best(i + 1, used | (1 << j), j)
            new_chunk = 0 if prev >= 0 and j == prev + 1 else 1
            options.append((m + 1, neg_ch - new_chunk))
        return max(options)

    m, neg_ch = best(0, 0, -2)
    return m, -neg_ch


def meteor_exact(candidate, references) -> float:
    """METEOR restricted to exact unigram matches, maximized over references."""
    cand, refs = _prepare(candidate, references)
    best = 0.0
    for ref in refs:
        if not cand or not ref:
            continue
        m, chunks = meteor_alignment(cand, ref)
        if m == 0:
            continue
        p, r = m / len(cand), m / len(ref)
        fmean = 10 * p * r / (r + 9 * p)
        penalty = 0.5 * (chunks / m) ** 3
        best = max(best, fmean * (1 - penalty))
    return best
