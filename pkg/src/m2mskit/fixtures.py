"""Synthetic multilingual fixtures for tests, demos and smoke runs.

Every language shares one concept inventory, so a sentence in one language
has an exact word-for-word counterpart in every other and
:func:`mock_dictionaries` round-trips without loss.
"""

from __future__ import annotations

import json
import random
from pathlib import Path

from .corpusops import Member, ParallelCluster
from .textcore import get_language

_HI = ("है और का की के में यह वह से को पर एक नहीं हम आप मैं तुम था थी थे किया करना होना "
       "जाना आना देखना कहना घर पानी खाना दिन रात समय लोग आदमी औरत बच्चा शहर गाँव देश "
       "दुनिया किताब स्कूल काम पैसा बड़ा छोटा अच्छा बुरा नया पुराना सुंदर लाल नीला हरा "
       "सफेद काला पेड़ फूल नदी पहाड़ सड़क बाज़ार").split()
_TH = ("ฉัน คุณ เขา เรา บ้าน น้ำ อาหาร วัน คืน เวลา คน ผู้ชาย ผู้หญิง เด็ก เมือง หมู่บ้าน "
       "ประเทศ โลก หนังสือ โรงเรียน งาน เงิน ใหญ่ เล็ก ดี เลว ใหม่ เก่า สวย แดง ฟ้า เขียว "
       "ขาว ดำ ต้นไม้ ดอกไม้ แม่น้ำ ภูเขา ไป มา กิน ดื่ม ดู พูด อ่าน เขียน ทำ รัก รู้ เห็น "
       "ให้ ได้ อยู่ มี เป็น และ หรือ แต่ ใน บน กับ จาก").split()
_ZH = ("我们 你们 他们 房子 水 食物 白天 晚上 时间 人 男人 女人 孩子 城市 村庄 国家 世界 书 "
       "学校 工作 钱 大 小 好 坏 新 旧 美丽 红色 蓝色 绿色 白色 黑色 树 花 河 山 去 来 吃 喝 "
       "看 说 读 写 做 爱 知道 看见 给 得到 在 有 是 和 或者 但是 里面 上面 跟 从 路 市场").split()


def _latin(code: str) -> list[str]:
    from .evalkit.langid import data_dir, seed_words
    words = seed_words(data_dir() / "seeds" / f"{code}.txt")
    return [w for w in words if "'" not in w and "-" not in w]


def vocabularies(size: int = 60) -> dict[str, list[str]]:
    vocab = {"en": _latin("en"), "fr": _latin("fr"), "tr": _latin("tr"),
             "hi": list(dict.fromkeys(_HI)), "th": list(dict.fromkeys(_TH)),
             "zh": list(dict.fromkeys(_ZH))}
    out = {}
    for code, words in vocab.items():
        if len(words) < size:
            raise ValueError(f"only {len(words)} words available for {code}")
        out[code] = words[:size]
    return out


def render(concepts: list[int], code: str, vocab: dict[str, list[str]]) -> str:
    words = [vocab[code][c] for c in concepts]
    if code == "zh":
        return "".join(words) + "。"
    if code == "th":
        return " ".join(words)
    if code == "hi":
        return " ".join(words) + " ।"
    text = " ".join(words)
    return text[0].upper() + text[1:] + "."


def render_document(sentences: list[list[int]], code: str, vocab: dict[str, list[str]]) -> str:
    return get_language(code).joiner.join(render(s, code, vocab) for s in sentences)


def _concept_sentences(rng: random.Random, n_sent: int, size: int) -> list[list[int]]:
    return [[rng.randrange(size) for _ in range(rng.randint(4, 10))] for _ in range(n_sent)]


def synthetic_clusters(n: int, seed: int = 0, langs: tuple[str, ...] = ("en", "fr", "hi", "zh", "th", "tr"),
                       pivot: str = "en", min_members: int = 2, vocab_size: int = 60) -> list[ParallelCluster]:
    """``n`` parallel clusters; each holds the pivot language plus a random subset of the rest."""
    rng = random.Random(seed)
    vocab = vocabularies(vocab_size)
    others = [x for x in langs if x != pivot]
    clusters = []
    for i in range(n):
        k = rng.randint(max(0, min_members - 1), len(others))
        present = [pivot] + sorted(rng.sample(others, k))
        doc = _concept_sentences(rng, rng.randint(3, 8), vocab_size)
        summary = _concept_sentences(rng, rng.randint(1, 2), vocab_size)
        members = {code: Member(render_document(doc, code, vocab), render_document(summary, code, vocab))
                   for code in present}
        clusters.append(ParallelCluster(f"c{i:05d}", members))
    return clusters


def synthetic_documents(n: int, seed: int = 0, langs: tuple[str, ...] = ("en", "fr", "tr"),
                        vocab_size: int = 60) -> list[dict]:
    rng = random.Random(seed)
    vocab = vocabularies(vocab_size)
    docs = []
    for i in range(n):
        code = langs[i % len(langs)]
        sents = _concept_sentences(rng, rng.randint(2, 8), vocab_size)
        docs.append({"id": f"d{i:05d}", "lang": code, "text": render_document(sents, code, vocab)})
    return docs


def mock_dictionaries(langs: tuple[str, ...] = ("en", "fr", "hi", "zh", "th", "tr"),
                      vocab_size: int = 60) -> dict[str, dict[str, str]]:
    """Word-for-word tables between every ordered pair of ``langs``.

    Matching is on whitespace tokens, so the capitalised first word of a
    Latin sentence and tokens carrying punctuation pass through untouched.
    """
    vocab = vocabularies(vocab_size)
    return {f"{a}-{b}": dict(zip(vocab[a], vocab[b])) for a in langs for b in langs if a != b}


def write_jsonl(records, path: Path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        for rec in records:
            fh.write(json.dumps(rec, ensure_ascii=False) + "\n")
