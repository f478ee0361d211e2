"""Text infilling and sentence permutation noisers.

All functions take an explicit ``numpy.random.Generator``; use
:func:`record_rng` to derive one per record so output does not depend on
worker scheduling.
"""

from __future__ import annotations

import hashlib
import math
from dataclasses import dataclass, replace

import numpy as np

from .textcore import Document

MASK = "<mask>"


@dataclass(frozen=True)
class NoiseConfig:
    mask_ratio_min: float = 0.0
    mask_ratio_max: float = 0.15
    mean_span_length: float = 3.0
    mask_token: str = MASK

    def __post_init__(self) -> None:
        if not 0.0 <= self.mask_ratio_min <= self.mask_ratio_max <= 1.0:
            raise ValueError("need 0 <= mask_ratio_min <= mask_ratio_max <= 1")
        if self.mean_span_length < 1.0:
            raise ValueError("mean_span_length must be >= 1")


def stable_key(key: str) -> int:
    return int.from_bytes(hashlib.blake2b(key.encode("utf-8"), digest_size=8).digest(), "big")


def record_rng(seed: int, key: str, *salt: str) -> np.random.Generator:
    """Generator seeded from ``(seed, key, *salt)`` only."""
    entropy = [int(seed) & 0xFFFFFFFFFFFFFFFF, stable_key(key)] + [stable_key(s) for s in salt]
    return np.random.default_rng(np.random.SeedSequence(entropy))


def sample_mask_ratio(cfg: NoiseConfig, rng: np.random.Generator) -> float:
    if cfg.mask_ratio_min == cfg.mask_ratio_max:
        return cfg.mask_ratio_min
    return float(rng.uniform(cfg.mask_ratio_min, cfg.mask_ratio_max))


def mask_target(n_tokens: int, ratio: float) -> int:
    # round first so that 0.15 * 100 counts as 15, not 15.000000000000002
    return min(n_tokens, math.ceil(round(ratio * n_tokens, 9)))


def infill_mask(n_tokens: int, ratio: float, cfg: NoiseConfig, rng: np.random.Generator) -> np.ndarray:
    """Boolean mask of the original positions chosen for infilling."""
    if not 0.0 <= ratio <= 1.0:
        raise ValueError("ratio must lie in [0, 1]")
    masked = np.zeros(n_tokens, dtype=bool)
    target = mask_target(n_tokens, ratio)
    p = 1.0 / cfg.mean_span_length
    count = 0
    while count < target:
        free = np.flatnonzero(~masked)
        start = int(free[rng.integers(len(free))])
        run_end = start
        while run_end < n_tokens and not masked[run_end]:
            run_end += 1
        length = int(rng.geometric(p))
        # the last span is trimmed to land exactly on the target count
        length = min(length, run_end - start, target - count)
        masked[start:start + length] = True
        count += length
    return masked


def apply_infill(tokens: list[str], masked: np.ndarray, mask_token: str = MASK) -> list[str]:
    out: list[str] = []
    prev = False
    for tok, m in zip(tokens, masked):
        if m:
            if not prev:
                out.append(mask_token)
        else:
            out.append(tok)
        prev = bool(m)
    return out


def text_infill(tokens: list[str], ratio: float, cfg: NoiseConfig, rng: np.random.Generator) -> list[str]:
    """Replace random contiguous spans with one mask token each.

    Spans that end up touching are emitted as a single mask, so each mask in
    the output stands for one maximal masked run.
    """
    if not tokens or ratio == 0:
        return list(tokens)
    return apply_infill(list(tokens), infill_mask(len(tokens), ratio, cfg, rng), cfg.mask_token)


def permute_sentences(doc: Document, rng: np.random.Generator) -> Document:
    if len(doc.sentences) < 2:
        return doc
    order = rng.permutation(len(doc.sentences))
    return replace(doc, sentences=tuple(doc.sentences[i] for i in order))
