"""Language registry, sentence segmentation, tokenization and the document model.

Every other module works on :class:`Document` objects built here.  Languages
are registered once at import time; the registry is treated as immutable
afterwards (``register_language`` exists for extension before any worker
starts).
"""

from __future__ import annotations

import re
import unicodedata
from dataclasses import dataclass, field

WORD = "word"
CHAR = "char"


class UnsupportedLanguage(ValueError):
    pass


@dataclass(frozen=True)
class Language:
    code: str
    tag: str
    mode: str
    terminators: str = ".!?"
    # terminators that end a sentence even without trailing whitespace
    hard_terminators: str = ""
    newline_only: bool = False
    joiner: str = " "

    def __str__(self) -> str:
        return self.code

    def __repr__(self) -> str:
        return f"Language({self.code!r})"


_REGISTRY: dict[str, Language] = {}


def register_language(lang: Language) -> Language:
    if lang.mode not in (WORD, CHAR):
        raise ValueError(f"unknown tokenization mode {lang.mode!r}")
    for other in _REGISTRY.values():
        if other.tag == lang.tag and other.code != lang.code:
            raise ValueError(f"tag {lang.tag} already used by {other.code}")
    _REGISTRY[lang.code] = lang
    return lang


EN = register_language(Language("en", "<En>", WORD))
FR = register_language(Language("fr", "<Fr>", WORD))
# danda (U+0964) and double danda are the native Devanagari full stops
HI = register_language(Language("hi", "<Hi>", WORD, terminators=".!?।॥"))
ZH = register_language(
    Language("zh", "<Zh>", CHAR, terminators=".!?。！？",
             hard_terminators="。！？", joiner="")
)
TH = register_language(Language("th", "<Th>", CHAR, newline_only=True, joiner="\n"))
TR = register_language(Language("tr", "<Tr>", WORD))


def get_language(lang: str | Language) -> Language:
    if isinstance(lang, Language):
        if _REGISTRY.get(lang.code) != lang:
            raise UnsupportedLanguage(lang.code)
        return lang
    try:
        return _REGISTRY[lang.lower()]
    except (KeyError, AttributeError):
        raise UnsupportedLanguage(str(lang)) from None


def languages() -> list[Language]:
    return list(_REGISTRY.values())


def lang_tag(lang: str | Language) -> str:
    return get_language(lang).tag


def language_from_tag(tag: str) -> Language:
    for lang in _REGISTRY.values():
        if lang.tag == tag:
            return lang
    raise UnsupportedLanguage(tag)


# closing quotes/brackets that stay attached to the sentence they close
_CLOSERS = "\"')]}»”’」』）"


def segment_spans(text: str, lang: str | Language) -> list[tuple[int, int]]:
    """Return ``(start, end)`` offsets of each sentence in ``text``.

    Offsets exclude the whitespace separators between sentences, so
    ``text[start:end]`` is the sentence exactly as written.
    """
    lang = get_language(lang)
    spans: list[tuple[int, int]] = []

    def emit(start: int, end: int) -> None:
        chunk = text[start:end]
        stripped = chunk.strip()
        if stripped:
            lead = len(chunk) - len(chunk.lstrip())
            spans.append((start + lead, start + lead + len(stripped)))

    if lang.newline_only:
        pos = 0
        for m in re.finditer(r"\r\n|\n|\r", text):
            emit(pos, m.start())
            pos = m.end()
        emit(pos, len(text))
        return spans

    n = len(text)
    start = 0
    i = 0
    while i < n:
        ch = text[i]
        if ch in lang.terminators:
            j = i
            while j < n and text[j] in lang.terminators:
                j += 1
            while j < n and text[j] in _CLOSERS:
                j += 1
            hard = any(c in lang.hard_terminators for c in text[i:j])
            if j == n or text[j].isspace() or hard:
                emit(start, j)
                start = j
            i = j
        else:
            i += 1
    emit(start, n)
    return spans


def segment_sentences(text: str, lang: str | Language) -> list[str]:
    return [text[s:e] for s, e in segment_spans(text, lang)]


def _is_punct(ch: str) -> bool:
    return unicodedata.category(ch)[0] in "PS"


def _lower(text: str, lang: Language) -> str:
    if lang.code == "tr":
        # Turkish dotted/dotless i
        text = text.replace("I", "ı").replace("İ", "i")
    return text.lower()


def tokenize(sentence: str, lang: str | Language) -> list[str]:
    """Split a sentence into ROUGE-ready tokens.

    Word-mode languages split on whitespace and peel leading/trailing
    punctuation off as single-character tokens; character-mode languages
    emit one token per non-whitespace character.  Cased scripts are
    lowercased.
    """
    lang = get_language(lang)
    text = _lower(unicodedata.normalize("NFC", sentence), lang)
    if lang.mode == CHAR:
        return [ch for ch in text if not ch.isspace()]

    tokens: list[str] = []
    for chunk in text.split():
        i, j = 0, len(chunk)
        while i < j and _is_punct(chunk[i]):
            i += 1
        while j > i and _is_punct(chunk[j - 1]):
            j -= 1
        tokens.extend(chunk[:i])
        if i < j:
            tokens.append(chunk[i:j])
        tokens.extend(chunk[j:])
    return tokens


def detokenize(tokens: list[str], lang: str | Language) -> str:
    lang = get_language(lang)
    if lang.mode == CHAR:
        return "".join(tokens)
    return " ".join(tokens)


@dataclass(frozen=True)
class Sentence:
    text: str
    tokens: tuple[str, ...]


@dataclass(frozen=True)
class Document:
    id: str
    lang: Language
    sentences: tuple[Sentence, ...] = field(default_factory=tuple)

    @classmethod
    def from_text(cls, doc_id: str, lang: str | Language, text: str) -> "Document":
        lang = get_language(lang)
        return cls.from_sentences(doc_id, lang, segment_sentences(text, lang))

    @classmethod
    def from_sentences(cls, doc_id: str, lang: str | Language, sentences: list[str]) -> "Document":
        lang = get_language(lang)
        sents = []
        for s in sentences:
            toks = tokenize(s, lang)
            if toks:
                sents.append(Sentence(s, tuple(toks)))
        return cls(doc_id, lang, tuple(sents))

    @property
    def texts(self) -> list[str]:
        return [s.text for s in self.sentences]

    @property
    def n_tokens(self) -> int:
        return sum(len(s.tokens) for s in self.sentences)

    def text(self) -> str:
        return self.lang.joiner.join(self.texts)

    def to_record(self) -> dict:
        return {"id": self.id, "lang": self.lang.code, "sentences": self.texts}

    @classmethod
    def from_record(cls, rec: dict) -> "Document":
        if "sentences" in rec:
            return cls.from_sentences(str(rec["id"]), rec["lang"], list(rec["sentences"]))
        return cls.from_text(str(rec["id"]), rec["lang"], rec["text"])
