"""Translation providers: a deterministic dictionary mock and an HTTP client."""

from __future__ import annotations

import json
import logging
import time
from typing import Iterable, Mapping, Protocol

import requests

from .textcore import Language, get_language

log = logging.getLogger(__name__)

URL_ENV = "M2MS_PROVIDER_URL"


class ProviderError(RuntimeError):
    def __init__(self, message: str, text: str | None = None):
        super().__init__(message)
        self.text = text


class TranslationProvider(Protocol):
    def translate(self, text: str, src: Language, tgt: Language) -> str: ...

    def supports(self, src: Language, tgt: Language) -> bool: ...


def _pair_key(src: str | Language, tgt: str | Language) -> str:
    return f"{get_language(src).code}-{get_language(tgt).code}"


class MockProvider:
    """Token-wise dictionary translation.

    ``dictionaries`` maps ``"src-tgt"`` to a token table.  Tokens missing
    from the table pass through unchanged, and ``src == tgt`` is identity.
    With ``pairs=None`` every pair is supported.
    """

    def __init__(self, dictionaries: Mapping[str, Mapping[str, str]] | None = None,
                 pairs: Iterable[str] | None = None):
        self.dictionaries = {k: dict(v) for k, v in (dictionaries or {}).items()}
        self.pairs = None if pairs is None else set(pairs)

    @classmethod
    def symmetric(cls, dictionaries: Mapping[str, Mapping[str, str]]) -> "MockProvider":
        tables = {k: dict(v) for k, v in dictionaries.items()}
        for key, table in dictionaries.items():
            a, b = key.split("-")
            rev = tables.setdefault(f"{b}-{a}", {})
            for s, t in table.items():
                rev.setdefault(t, s)
        return cls(tables)

    def supports(self, src: Language, tgt: Language) -> bool:
        return self.pairs is None or src == tgt or _pair_key(src, tgt) in self.pairs

    def translate(self, text: str, src: Language, tgt: Language) -> str:
        src, tgt = get_language(src), get_language(tgt)
        if not self.supports(src, tgt):
            raise ProviderError(f"unsupported pair {src.code}->{tgt.code}", text)
        if src == tgt:
            return text
        table = self.dictionaries.get(_pair_key(src, tgt), {})
        return " ".join(table.get(tok, tok) for tok in text.split())


class HttpProvider:
    """Client for ``POST {url}/translate`` returning ``{"text": ...}``.

    Connection errors, timeouts and 5xx responses are retried with
    exponential backoff; anything else fails immediately.
    """

    def __init__(self, url: str, *, max_attempts: int = 3, backoff: float = 0.5,
                 timeout: float = 30.0, session: requests.Session | None = None):
        if not url:
            raise ValueError(f"provider URL missing (set {URL_ENV})")
        self.url = url.rstrip("/") + "/translate"
        self.max_attempts = max_attempts
        self.backoff = backoff
        self.timeout = timeout
        self.session = session or requests.Session()

    def supports(self, src: Language, tgt: Language) -> bool:
        return True

    def translate(self, text: str, src: Language, tgt: Language) -> str:
        src, tgt = get_language(src), get_language(tgt)
        if src == tgt:
            return text
        body = {"text": text, "src": src.code, "tgt": tgt.code}
        last = "no attempt made"
        for attempt in range(self.max_attempts):
            if attempt:
                time.sleep(self.backoff * 2 ** (attempt - 1))
            try:
                resp = self.session.post(self.url, json=body, timeout=self.timeout)
            except (requests.ConnectionError, requests.Timeout) as exc:
                last = f"transport error: {exc}"
                log.warning("translate attempt %d/%d failed: %s", attempt + 1, self.max_attempts, last)
                continue
            if resp.status_code >= 500:
                last = f"HTTP {resp.status_code}"
                log.warning("translate attempt %d/%d failed: %s", attempt + 1, self.max_attempts, last)
                continue
            if resp.status_code != 200:
                raise ProviderError(f"HTTP {resp.status_code} from provider", text)
            try:
                out = resp.json()["text"]
            except (ValueError, KeyError, TypeError, json.JSONDecodeError):
                raise ProviderError("malformed provider response", text) from None
            if not isinstance(out, str):
                raise ProviderError("malformed provider response", text)
            return out
        raise ProviderError(f"gave up after {self.max_attempts} attempts ({last})", text)
