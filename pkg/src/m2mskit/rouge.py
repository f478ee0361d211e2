"""ROUGE-N and ROUGE-L over token lists."""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass
from typing import Sequence

from .textcore import Language, tokenize


@dataclass(frozen=True)
class RougeScore:
    precision: float
    recall: float
    f1: float

    @classmethod
    def from_counts(cls, match: int, n_cand: int, n_ref: int) -> "RougeScore":
        if match == 0 or n_cand == 0 or n_ref == 0:
            return ZERO
        # 2pr/(p+r) reduces to 2m/(c+r); the integer form keeps equal
        # ratios bit-identical, which gap selection relies on for tie-breaks
        return cls(match / n_cand, match / n_ref, 2 * match / (n_cand + n_ref))

    def as_dict(self) -> dict[str, float]:
        return {"precision": self.precision, "recall": self.recall, "f1": self.f1}


ZERO = RougeScore(0.0, 0.0, 0.0)


def ngrams(tokens: Sequence[str], n: int) -> Counter:
    return Counter(tuple(tokens[i:i + n]) for i in range(len(tokens) - n + 1))


def rouge_n(candidate: Sequence[str], reference: Sequence[str], n: int) -> RougeScore:
    if n < 1:
        raise ValueError("n must be >= 1")
    if len(candidate) < n or len(reference) < n:
        return ZERO
    cand, ref = ngrams(candidate, n), ngrams(reference, n)
    match = sum(min(c, ref[g]) for g, c in cand.items() if g in ref)
    return RougeScore.from_counts(match, len(candidate) - n + 1, len(reference) - n + 1)


def lcs_length(a: Sequence[str], b: Sequence[str]) -> int:
    if len(a) < len(b):
        a, b = b, a
    prev = [0] * (len(b) + 1)
    for x in a:
        cur = [0]
        for j, y in enumerate(b):
            cur.append(prev[j] + 1 if x == y else max(prev[j + 1], cur[j]))
        prev = cur
    return prev[-1]


def rouge_l(candidate: Sequence[str], reference: Sequence[str]) -> RougeScore:
    if not candidate or not reference:
        return ZERO
    return RougeScore.from_counts(lcs_length(candidate, reference), len(candidate), len(reference))


def rouge1_text(candidate: str, reference: str, lang: str | Language) -> RougeScore:
    return rouge_n(tokenize(candidate, lang), tokenize(reference, lang), 1)
