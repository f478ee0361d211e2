"""Two-tier language identification over the six supported languages.

Tier one counts characters of the uniquely-scripted languages (Devanagari
for Hindi, Han for Chinese, Thai); a script covering at least half of the
non-whitespace characters decides.  Otherwise the text is matched against
character-trigram profiles of the Latin-script languages by cosine
similarity.
"""

from __future__ import annotations

import json
import math
import unicodedata
from collections import Counter
from functools import lru_cache
from importlib import resources
from pathlib import Path
from typing import Iterable, Mapping

from ..textcore import Language, get_language

PAD = "_"


class EmptyText(ValueError):
    pass


class Unclassifiable(ValueError):
    pass


def _in_ranges(cp: int, ranges: tuple[tuple[int, int], ...]) -> bool:
    return any(lo <= cp <= hi for lo, hi in ranges)


# checked in this order when two scripts tie
SCRIPT_RANGES: tuple[tuple[str, tuple[tuple[int, int], ...]], ...] = (
    ("hi", ((0x0900, 0x097F), (0xA8E0, 0xA8FF))),
    ("zh", ((0x4E00, 0x9FFF), (0x3400, 0x4DBF), (0xF900, 0xFAFF),
            (0x20000, 0x2A6DF), (0x2A700, 0x2EBEF), (0x30000, 0x3134F))),
    ("th", ((0x0E00, 0x0E7F),)),
)


def script_counts(text: str) -> dict[str, int]:
    counts = dict.fromkeys((code for code, _ in SCRIPT_RANGES), 0)
    for ch in text:
        cp = ord(ch)
        for code, ranges in SCRIPT_RANGES:
            if _in_ranges(cp, ranges):
                counts[code] += 1
                break
    return counts


def words_of(text: str) -> list[str]:
    """Lowercased letter runs; digits and punctuation act as separators."""
    text = unicodedata.normalize("NFC", text).replace("İ", "i").lower()
    out, cur = [], []
    for ch in text:
        if ch.isalpha() or ch in "'’" and cur:
            cur.append(ch)
        elif cur:
            out.append("".join(cur).strip("'’"))
            cur = []
    if cur:
        out.append("".join(cur).strip("'’"))
    return [w for w in out if w]


def trigrams(words: Iterable[str]) -> Counter:
    grams: Counter = Counter()
    for w in words:
        padded = f"{PAD}{w}{PAD}"
        for i in range(len(padded) - 2):
            grams[padded[i:i + 3]] += 1
    return grams


def cosine(a: Mapping[str, float], b: Mapping[str, float]) -> float:
    if len(a) > len(b):
        a, b = b, a
    dot = sum(v * b.get(k, 0) for k, v in a.items())
    if dot == 0:
        return 0.0
    na = math.sqrt(sum(v * v for v in a.values()))
    nb = math.sqrt(sum(v * v for v in b.values()))
    return dot / (na * nb)


# profile files

def seed_words(path: Path) -> list[str]:
    return list(dict.fromkeys(words_of(path.read_text(encoding="utf-8"))))


def write_profile(grams: Counter, path: Path) -> None:
    rows = sorted(grams.items(), key=lambda kv: (-kv[1], kv[0]))
    path.write_text("".join(f"{g}\t{c}\n" for g, c in rows), encoding="utf-8")


def read_profile(text: str) -> dict[str, int]:
    prof = {}
    for line in text.splitlines():
        if line:
            g, c = line.rsplit("\t", 1)
            prof[g] = int(c)
    return prof


def data_dir() -> Path:
    return Path(str(resources.files("m2mskit") / "data" / "langid"))


def regen_profiles(seed_dir: Path | None = None, out_dir: Path | None = None) -> dict[str, int]:
    """Rebuild ``profiles/<code>.tsv`` and ``manifest.json`` from the seed lists."""
    base = data_dir()
    seed_dir = Path(seed_dir) if seed_dir else base / "seeds"
    out_dir = Path(out_dir) if out_dir else base
    priority = json.loads((base / "manifest.json").read_text())["priority"]
    (out_dir / "profiles").mkdir(parents=True, exist_ok=True)
    sizes = {}
    for code in priority:
        grams = trigrams(seed_words(seed_dir / f"{code}.txt"))
        write_profile(grams, out_dir / "profiles" / f"{code}.tsv")
        sizes[code] = len(grams)
    manifest = {"priority": priority, "profiles": {c: f"profiles/{c}.tsv" for c in priority},
                "trigram_counts": sizes}
    (out_dir / "manifest.json").write_text(json.dumps(manifest, indent=2) + "\n")
    return sizes


class LanguageIdentifier:
    def __init__(self, profiles: Mapping[str, Mapping[str, int]], priority: list[str],
                 script_threshold: float = 0.5):
        self.profiles = {code: dict(profiles[code]) for code in priority}
        self.priority = list(priority)
        self.script_threshold = script_threshold

    @classmethod
    def from_dir(cls, directory: Path) -> "LanguageIdentifier":
        manifest = json.loads((directory / "manifest.json").read_text())
        profiles = {
            code: read_profile((directory / rel).read_text(encoding="utf-8"))
            for code, rel in manifest["profiles"].items()
        }
        return cls(profiles, manifest["priority"])

    def similarities(self, text: str) -> dict[str, float]:
        grams = trigrams(words_of(text))
        return {code: cosine(grams, self.profiles[code]) for code in self.priority}

    def detect(self, text: str) -> Language:
        chars = [ch for ch in text if not ch.isspace()]
        if not chars:
            raise EmptyText("text is empty after stripping whitespace")
        counts = script_counts("".join(chars))
        best = max(counts, key=lambda c: counts[c])  # first wins on ties
        if counts[best] >= self.script_threshold * len(chars):
            return get_language(best)
        sims = self.similarities(text)
        top = max(sims.values())
        if top <= 0:
            raise Unclassifiable(f"no trigram profile matches {text[:40]!r}")
        return get_language(next(c for c in self.priority if sims[c] == top))


@lru_cache(maxsize=1)
def default_identifier() -> LanguageIdentifier:
    return LanguageIdentifier.from_dir(data_dir())


def detect_language(text: str) -> Language:
    return default_identifier().detect(text)


def correct_language_rate(candidates: list[str], expected: str | Language,
                          identifier: LanguageIdentifier | None = None) -> float:
    """Percentage of candidates detected as ``expected``.

    Empty or unclassifiable candidates count as incorrect.
    """
    if not candidates:
        raise ValueError("candidates must be non-empty")
    expected = get_language(expected)
    ident = identifier or default_identifier()
    hits = 0
    for c in candidates:
        try:
            hits += ident.detect(c) == expected
        except (EmptyText, Unclassifiable):
            pass
    return 100.0 * hits / len(candidates)
