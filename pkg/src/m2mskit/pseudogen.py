"""Builders for the labeled pre-training corpora.

* meta denoising: sentence permutation + text infilling of one document
* cross-lingual denoising: noised source sentence -> clean target sentence
* pseudo many-to-many summarization: document with (partly masked) gap
  sentences -> gap sentences, translated when the target language differs,
  kept only if every gap sentence survives the round-trip check
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field
from enum import Enum

import numpy as np

from .gsg import DegenerateDocument, select_gap_sentences
from .noising import NoiseConfig, permute_sentences, sample_mask_ratio, text_infill
from .providers import ProviderError, TranslationProvider
from .rouge import rouge1_text
from .textcore import Document, Language, detokenize, get_language, lang_tag, tokenize

log = logging.getLogger(__name__)

MASK_SENT = "<mask-sent>"


class Task(str, Enum):
    META_DENOISE = "META_DENOISE"
    XL_DENOISE = "XL_DENOISE"
    PSEUDO_M2MS = "PSEUDO_M2MS"


class MaskMode(str, Enum):
    NONE = "NONE"
    HALF = "HALF"
    ALL = "ALL"


class EmptyInput(ValueError):
    pass


class SameLanguage(ValueError):
    pass


@dataclass(frozen=True)
class PseudoConfig:
    lambda_threshold: float = 0.7
    k_choices: tuple[int, ...] = (5, 10, 15)
    mask_mode: MaskMode = MaskMode.HALF
    noise: NoiseConfig = field(default_factory=NoiseConfig)

    def __post_init__(self) -> None:
        if not 0.0 <= self.lambda_threshold <= 1.0:
            raise ValueError("lambda_threshold must lie in [0, 1]")
        if not self.k_choices:
            raise ValueError("k_choices must be non-empty")
        object.__setattr__(self, "k_choices", tuple(sorted(set(int(k) for k in self.k_choices))))
        object.__setattr__(self, "mask_mode", MaskMode(self.mask_mode))


@dataclass(frozen=True)
class TrainingExample:
    src_text: str
    tgt_text: str
    src_lang: Language
    tgt_lang: Language
    task: Task
    meta: dict = field(default_factory=dict)

    def to_record(self) -> dict:
        return {
            "src_text": self.src_text,
            "tgt_text": self.tgt_text,
            "src_lang": self.src_lang.code,
            "tgt_lang": self.tgt_lang.code,
            "task": self.task.value,
            "meta": self.meta,
        }


@dataclass(frozen=True)
class Discarded:
    doc_id: str
    reason: str
    meta: dict = field(default_factory=dict)


def tagged(lang: Language, body: str) -> str:
    return f"{lang_tag(lang)} {body}" if body else lang_tag(lang)


def build_meta_example(doc: Document, cfg: NoiseConfig, rng: np.random.Generator) -> TrainingExample:
    """Permute sentences, then infill spans over the whole token stream."""
    if not doc.sentences:
        raise EmptyInput(f"document {doc.id!r} is empty")
    permuted = permute_sentences(doc, rng)
    tokens = [t for s in permuted.sentences for t in s.tokens]
    ratio = sample_mask_ratio(cfg, rng)
    noised = text_infill(tokens, ratio, cfg, rng)
    return TrainingExample(
        tagged(doc.lang, detokenize(noised, doc.lang)),
        tagged(doc.lang, doc.text()),
        doc.lang, doc.lang, Task.META_DENOISE,
        {"doc_id": doc.id, "ratio": ratio},
    )


def build_xldn_example(src_sentence: str, tgt_sentence: str, src: str | Language,
                       tgt: str | Language, cfg: NoiseConfig,
                       rng: np.random.Generator) -> TrainingExample:
    src, tgt = get_language(src), get_language(tgt)
    if src == tgt:
        raise SameLanguage(f"source and target are both {src.code}")
    if not src_sentence.strip() or not tgt_sentence.strip():
        raise EmptyInput("both sentences must be non-empty")
    ratio = sample_mask_ratio(cfg, rng)
    noised = text_infill(tokenize(src_sentence, src), ratio, cfg, rng)
    return TrainingExample(
        tagged(src, detokenize(noised, src)),
        tagged(tgt, tgt_sentence.strip()),
        src, tgt, Task.XL_DENOISE, {"ratio": ratio},
    )


def round_trip_check(gap_sentence: str, src: str | Language, tgt: str | Language,
                     provider: TranslationProvider, lam: float) -> tuple[bool, str, float]:
    """Translate forward and back; keep when back-translation ROUGE-1 F1 >= ``lam``."""
    src, tgt = get_language(src), get_language(tgt)
    try:
        forward = provider.translate(gap_sentence, src, tgt)
        back = provider.translate(forward, tgt, src)
    except ProviderError as exc:
        raise ProviderError(f"{exc} [sentence: {gap_sentence!r}]", gap_sentence) from exc
    score = rouge1_text(back, gap_sentence, src).f1
    return score >= lam, forward, score


def _masked_positions(n_gaps: int, mode: MaskMode, rng: np.random.Generator) -> list[int]:
    if mode is MaskMode.NONE:
        return []
    if mode is MaskMode.ALL:
        return list(range(n_gaps))
    picked = rng.choice(n_gaps, size=n_gaps // 2, replace=False)
    return sorted(int(i) for i in picked)


def build_pseudo_m2ms(doc: Document, tgt: str | Language, provider: TranslationProvider,
                      cfg: PseudoConfig, rng: np.random.Generator) -> TrainingExample | Discarded:
    """One pseudo summarization sample for ``doc`` into language ``tgt``.

    Raises :class:`ProviderError` when translation fails; callers decide
    whether that skips the document or aborts.
    """
    tgt = get_language(tgt)
    if len(doc.sentences) < 2:
        raise DegenerateDocument(f"document {doc.id!r} needs >= 2 sentences")
    k = int(rng.choice(cfg.k_choices))
    sel = select_gap_sentences(doc, k)
    gaps = list(sel.gap_indices)
    meta = {"doc_id": doc.id, "k": k, "gap_indices": gaps}

    if tgt == doc.lang:
        targets = [doc.sentences[g].text for g in gaps]
        meta["filter_scores"] = []
    else:
        targets, scores = [], []
        for g in gaps:
            keep, forward, score = round_trip_check(
                doc.sentences[g].text, doc.lang, tgt, provider, cfg.lambda_threshold)
            scores.append(score)
            targets.append(forward)
        meta["filter_scores"] = scores
        failed = [g for g, s in zip(gaps, scores) if s < cfg.lambda_threshold]
        if failed:
            meta["failed_gaps"] = failed
            return Discarded(doc.id, f"round-trip ROUGE-1 below {cfg.lambda_threshold}", meta)

    masked = {gaps[i] for i in _masked_positions(len(gaps), cfg.mask_mode, rng)}
    meta["masked_indices"] = sorted(masked)
    body = [MASK_SENT if i in masked else s.text for i, s in enumerate(doc.sentences)]
    return TrainingExample(
        tagged(doc.lang, doc.lang.joiner.join(body)),
        tagged(tgt, tgt.joiner.join(targets)),
        doc.lang, tgt, Task.PSEUDO_M2MS, meta,
    )
