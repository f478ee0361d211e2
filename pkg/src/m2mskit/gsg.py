"""Gap-sentence selection.

Each sentence is scored by ROUGE-1 F1 against the rest of its document, and
the top-ranked sentences are taken until their token count reaches
``k`` percent of the document length.
"""

from __future__ import annotations

from dataclasses import dataclass

from .rouge import rouge_n
from .textcore import Document


class DegenerateDocument(ValueError):
    pass


@dataclass(frozen=True)
class GapSelection:
    doc_id: str
    gap_indices: tuple[int, ...]
    scores: tuple[float, ...]
    ratio_k: int
    token_budget: int

    def to_record(self) -> dict:
        return {
            "id": self.doc_id,
            "k": self.ratio_k,
            "budget": self.token_budget,
            "gaps": list(self.gap_indices),
            "scores": list(self.scores),
        }


def _check(doc: Document) -> None:
    if len(doc.sentences) < 2:
        raise DegenerateDocument(f"document {doc.id!r} has {len(doc.sentences)} sentence(s); need >= 2")


def sentence_importance(doc: Document, i: int) -> float:
    _check(doc)
    if not 0 <= i < len(doc.sentences):
        raise IndexError(f"sentence index {i} out of range for document {doc.id!r}")
    rest = [tok for j, s in enumerate(doc.sentences) if j != i for tok in s.tokens]
    return rouge_n(doc.sentences[i].tokens, rest, 1).f1


def importance_scores(doc: Document) -> list[float]:
    _check(doc)
    return [sentence_importance(doc, i) for i in range(len(doc.sentences))]


def token_budget(n_tokens: int, k_percent: int) -> int:
    # integer ceil avoids 0.15 * 100 style float overshoot
    return -(-k_percent * n_tokens // 100)


def select_gap_sentences(doc: Document, k_percent: int, rng=None) -> GapSelection:
    """Pick gap sentences for ``doc`` at ``k_percent`` of its token length.

    ``rng`` is accepted for call-site symmetry with the other builders and
    is not consumed; selection is a pure function of ``(doc, k_percent)``.
    """
    _check(doc)
    if k_percent <= 0:
        raise ValueError("k_percent must be positive")
    scores = importance_scores(doc)
    budget = token_budget(doc.n_tokens, k_percent)
    ranked = sorted(range(len(scores)), key=lambda i: (-scores[i], i))
    cap = len(scores) - 1

    chosen: list[int] = []
    total = 0
    for i in ranked:
        if len(chosen) >= cap:
            break
        chosen.append(i)
        total += len(doc.sentences[i].tokens)
        if total >= budget:
            break
    return GapSelection(doc.id, tuple(sorted(chosen)), tuple(scores), k_percent, budget)
