"""Per-direction ROUGE / correct-language-rate evaluation and report writers."""

from __future__ import annotations

import json
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass
from typing import Iterable, Sequence

from ..rouge import rouge_l, rouge_n
from ..textcore import Language, get_language, languages, tokenize
from .langid import correct_language_rate


class EmptyPairs(ValueError):
    pass


@dataclass(frozen=True)
class DirectionReport:
    src: str
    tgt: str
    n: int
    rouge1: float
    rouge2: float
    rougeL: float
    correct_lang_rate: float

    @property
    def direction(self) -> tuple[str, str]:
        return self.src, self.tgt

    def to_record(self) -> dict:
        return {"direction": f"{self.src}-{self.tgt}", **asdict(self)}


def _score_pair(pair: tuple[str, str], lang: Language) -> tuple[float, float, float]:
    cand, ref = tokenize(pair[0], lang), tokenize(pair[1], lang)
    return rouge_n(cand, ref, 1).f1, rouge_n(cand, ref, 2).f1, rouge_l(cand, ref).f1


def evaluate_direction(pairs: Sequence[tuple[str, str]], tgt: str | Language,
                       src: str | Language | None = None, jobs: int = 1) -> DirectionReport:
    """Mean ROUGE-1/2/L F1 and correct-language rate for one direction."""
    if not pairs:
        raise EmptyPairs("no (candidate, reference) pairs")
    tgt = get_language(tgt)
    if jobs > 1:
        with ThreadPoolExecutor(jobs) as pool:
            scores = list(pool.map(lambda p: _score_pair(p, tgt), pairs))
    else:
        scores = [_score_pair(p, tgt) for p in pairs]
    n = len(scores)
    means = [math.fsum(s[i] for s in scores) / n for i in range(3)]
    rate = correct_language_rate([c for c, _ in pairs], tgt)
    src_code = get_language(src).code if src is not None else "?"
    return DirectionReport(src_code, tgt.code, n, *means, rate)


def evaluate_predictions(records: Iterable[dict], jobs: int = 1) -> list[DirectionReport]:
    """Group prediction records by ``direction`` ("en-zh") and evaluate each group."""
    groups: dict[tuple[str, str], list[tuple[str, str]]] = {}
    for rec in records:
        a, _, b = rec["direction"].partition("-")
        key = (get_language(a).code, get_language(b).code)
        groups.setdefault(key, []).append((rec["candidate"], rec["reference"]))
    return [evaluate_direction(pairs, d[1], d[0], jobs) for d, pairs in sorted(groups.items())]


def format_rate_row(system: str, src: str, tgt: str, rate: float) -> str:
    """One correct-language-rate line, e.g. ``mBART (M2MS) En⇒Fr 99.9``."""
    a, b = get_language(src).tag.strip("<>"), get_language(tgt).tag.strip("<>")
    return f"{system} {a}⇒{b} {rate:.1f}"


def _grid_langs(reports: Sequence[DirectionReport]) -> list[str]:
    used = {r.src for r in reports} | {r.tgt for r in reports}
    return [lang.code for lang in languages() if lang.code in used]


def report_json(reports: Sequence[DirectionReport]) -> str:
    langs = _grid_langs(reports)
    by_dir = {(r.src, r.tgt): r for r in reports}
    grid = {
        a: {b: (by_dir[(a, b)].to_record() if (a, b) in by_dir else None) for b in langs}
        for a in langs
    }
    return json.dumps({"languages": langs, "grid": grid,
                       "directions": [r.to_record() for r in reports]},
                      ensure_ascii=False, indent=2) + "\n"


def report_tsv(reports: Sequence[DirectionReport]) -> str:
    """Source languages as rows, target languages as columns; cells are R1/R2/RL/rate."""
    langs = _grid_langs(reports)
    by_dir = {(r.src, r.tgt): r for r in reports}
    lines = ["src\\tgt\t" + "\t".join(langs)]
    for a in langs:
        cells = []
        for b in langs:
            r = by_dir.get((a, b))
            cells.append("-" if r is None else
                         f"{100 * r.rouge1:.1f} / {100 * r.rouge2:.1f} / {100 * r.rougeL:.1f} / {r.correct_lang_rate:.1f}")
        lines.append(a + "\t" + "\t".join(cells))
    return "\n".join(lines) + "\n"
