"""Leakage-free dataset splitting and temperature sampling over directions.

A *direction* is an ordered ``(src, tgt)`` pair of language codes.  Splits
are assigned per parallel cluster, so a document and all its translations
always land in the same split across every direction.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field
from typing import Iterable, Mapping, Sequence

import numpy as np

from .textcore import Language, get_language

log = logging.getLogger(__name__)

TRAIN, VAL, TEST = "train", "validation", "test"
SPLITS = (TRAIN, VAL, TEST)

Direction = tuple[str, str]


class AllEmpty(ValueError):
    pass


def direction_key(d: Direction) -> str:
    return f"{d[0]}-{d[1]}"


def parse_direction(s: str | Sequence[str]) -> Direction:
    if isinstance(s, str):
        a, _, b = s.partition("-")
    else:
        a, b = s
    return get_language(a).code, get_language(b).code


@dataclass(frozen=True)
class Member:
    doc: str
    summary: str


@dataclass(frozen=True)
class ParallelCluster:
    cluster_id: str
    members: Mapping[str, Member]

    def __post_init__(self) -> None:
        if not self.members:
            raise ValueError(f"cluster {self.cluster_id!r} has no members")

    @classmethod
    def from_record(cls, rec: dict) -> "ParallelCluster":
        members = {
            get_language(lang).code: Member(m["doc"], m["summary"])
            for lang, m in rec["members"].items()
        }
        return cls(str(rec["cluster_id"]), members)

    def to_record(self) -> dict:
        return {
            "cluster_id": self.cluster_id,
            "members": {k: {"doc": m.doc, "summary": m.summary} for k, m in self.members.items()},
        }


@dataclass(frozen=True)
class Example:
    doc: str
    summary: str
    cluster_id: str


@dataclass
class DatasetSplit:
    directions: dict[Direction, dict[str, list[Example]]] = field(default_factory=dict)
    labels: dict[str, str] = field(default_factory=dict)
    shortfalls: list[dict] = field(default_factory=list)

    def counts(self) -> dict[str, dict[str, int]]:
        return {
            direction_key(d): {s: len(parts[s]) for s in SPLITS}
            for d, parts in sorted(self.directions.items())
        }


def _empty_parts() -> dict[str, list[Example]]:
    return {s: [] for s in SPLITS}


def all_directions(langs: Iterable[str]) -> list[Direction]:
    codes = sorted({get_language(x).code for x in langs})
    return [(a, b) for a in codes for b in codes]


def _assign_labels(cluster_ids: list[str], fractions: tuple[float, float, float],
                   seed: int) -> dict[str, str]:
    ids = sorted(cluster_ids)
    order = np.random.default_rng(seed).permutation(len(ids))
    total = sum(fractions)
    n = len(ids)
    n_train = round(n * fractions[0] / total)
    n_val = min(n - n_train, round(n * fractions[1] / total))
    labels = {}
    for rank, idx in enumerate(order):
        labels[ids[idx]] = TRAIN if rank < n_train else VAL if rank < n_train + n_val else TEST
    return labels


def split_m2ms(clusters: Sequence[ParallelCluster],
               targets: Mapping[Direction, tuple[int, int, int]] | tuple[float, float, float],
               zero_shot_languages: Iterable[str | Language] = (),
               seed: int = 0,
               zero_shot_directions: Iterable[Direction] = ()) -> DatasetSplit:
    """Assign one global split label per cluster and materialize every direction.

    ``targets`` is either per-direction ``(train, val, test)`` sizes, whose
    aggregate proportions drive the cluster labelling, or a bare
    ``(train, val, test)`` proportion triple.  Sizes are advisory: shortfalls
    are logged and reported, never raised.
    """
    ids = [c.cluster_id for c in clusters]
    if len(set(ids)) != len(ids):
        raise ValueError("duplicate cluster_id in input")

    if isinstance(targets, Mapping):
        per_dir = {parse_direction(d): tuple(v) for d, v in targets.items()}
        fractions = tuple(float(sum(v[i] for v in per_dir.values())) for i in range(3))
    else:
        per_dir = {}
        fractions = tuple(float(x) for x in targets)
    if len(fractions) != 3 or min(fractions) < 0 or sum(fractions) <= 0:
        raise ValueError("targets must give non-negative train/val/test proportions")

    zs_langs = {get_language(x).code for x in zero_shot_languages}
    zs_dirs = {parse_direction(d) for d in zero_shot_directions}
    labels = _assign_labels(ids, fractions, seed)

    langs = sorted({lang for c in clusters for lang in c.members} | {x for d in per_dir for x in d})
    split = DatasetSplit({d: _empty_parts() for d in all_directions(langs)}, labels)
    for c in sorted(clusters, key=lambda c: c.cluster_id):
        label = labels[c.cluster_id]
        for a in sorted(c.members):
            for b in sorted(c.members):
                if label == TRAIN and (a in zs_langs or b in zs_langs or (a, b) in zs_dirs):
                    continue
                split.directions[(a, b)][label].append(
                    Example(c.members[a].doc, c.members[b].summary, c.cluster_id))

    for d, want in sorted(per_dir.items()):
        have = split.directions.get(d, _empty_parts())
        for s, n in zip(SPLITS, want):
            zero_shot = s == TRAIN and (d[0] in zs_langs or d[1] in zs_langs or d in zs_dirs)
            if len(have[s]) < n and not zero_shot:
                short = {"direction": direction_key(d), "split": s, "target": n, "available": len(have[s])}
                split.shortfalls.append(short)
                log.warning("insufficient data for %s %s: wanted %d, got %d",
                            short["direction"], s, n, short["available"])
    return split


def leakage_violations(split: DatasetSplit) -> list[dict]:
    """Exhaustive scan of every (direction, split) pair against every other.

    A cluster in some direction's test set may not appear in any train or
    validation set, and a validation cluster may not appear in any train or
    test set.  Returns one record per offending (cluster, location) pair.
    """
    forbidden = {TEST: (TRAIN, VAL), VAL: (TRAIN, TEST), TRAIN: ()}
    found = []
    items = [(d, s, {e.cluster_id for e in parts[s]})
             for d, parts in split.directions.items() for s in SPLITS]
    for d1, s1, ids1 in items:
        for d2, s2, ids2 in items:
            if s2 in forbidden[s1]:
                for cid in sorted(ids1 & ids2):
                    found.append({"cluster_id": cid, "held_out": f"{direction_key(d1)}/{s1}",
                                  "leaked_into": f"{direction_key(d2)}/{s2}"})
    return found


# CrossSum re-splitting

ZERO_SHOT_BELOW = 1000
MONO_CAP = 10000


def crosssum_split(direction_examples: Mapping[Direction, Mapping[str, Sequence] | Sequence],
                   seed: int = 0) -> dict[Direction, dict[str, list]]:
    """Apply the CrossSum re-splitting rules per direction.

    Values are either ``{"train": [...], "validation": [...], "test": [...]}``
    (provided splits) or a flat example list treated as an unsplit pool.

    * fewer than 1000 examples: zero-shot, split evenly into validation and
      test with the odd one going to test
    * monolingual with at least 10000: truncate to 10000, split 8:1:1
    * otherwise the provided splits are kept
    """
    out = {}
    for raw_d, value in sorted(direction_examples.items(), key=lambda kv: str(kv[0])):
        d = parse_direction(raw_d)
        if isinstance(value, Mapping):
            provided = {s: list(value.get(s, [])) for s in SPLITS}
        else:
            provided = {TRAIN: list(value), VAL: [], TEST: []}
        pool = provided[TRAIN] + provided[VAL] + provided[TEST]
        n = len(pool)
        rng = np.random.default_rng([seed, *(ord(ch) for ch in direction_key(d))])
        if n < ZERO_SHOT_BELOW:
            shuffled = [pool[i] for i in rng.permutation(n)]
            half = n // 2
            out[d] = {TRAIN: [], VAL: shuffled[:half], TEST: shuffled[half:]}
        elif d[0] == d[1] and n >= MONO_CAP:
            shuffled = [pool[i] for i in rng.permutation(n)][:MONO_CAP]
            n_train, n_val = MONO_CAP * 8 // 10, MONO_CAP // 10
            out[d] = {TRAIN: shuffled[:n_train], VAL: shuffled[n_train:n_train + n_val],
                      TEST: shuffled[n_train + n_val:]}
        else:
            out[d] = provided
    return out


# temperature sampling

@dataclass(frozen=True)
class SamplerConfig:
    alpha: float = 0.5
    direction_counts: Mapping[str, int] = field(default_factory=dict)

    def __post_init__(self) -> None:
        if self.alpha <= 0:
            raise ValueError("alpha must be positive")
        if any(c < 0 for c in self.direction_counts.values()):
            raise ValueError("direction counts must be non-negative")


def direction_weights(cfg: SamplerConfig) -> dict[str, float]:
    """p(D) = |D|^alpha / sum over D' of |D'|^alpha."""
    powered = {d: (c ** cfg.alpha if c > 0 else 0.0) for d, c in cfg.direction_counts.items()}
    total = math.fsum(powered.values())
    if total <= 0:
        raise AllEmpty("every direction has zero examples")
    return {d: v / total for d, v in powered.items()}


def sample_direction(weights: Mapping[str, float], rng: np.random.Generator) -> str:
    keys = sorted(k for k, w in weights.items() if w > 0)
    if not keys:
        raise AllEmpty("no direction has positive weight")
    cum = np.cumsum([weights[k] for k in keys])
    u = rng.random() * cum[-1]
    return keys[min(int(np.searchsorted(cum, u, side="right")), len(keys) - 1)]
