"""Acceptance suite: one check per criterion, each printing a PASS/FAIL line.

Run under pytest (``pytest tests/test_acceptance.py -v``) or directly with
``python3 tests/test_acceptance.py``.
"""

from __future__ import annotations

import json
import os
import random
import re
import sys
import tempfile
import time
import warnings
import zlib
from collections import Counter
from contextlib import contextmanager
from pathlib import Path

import numpy as np
import pytest
from scipy.stats import chisquare

sys.path.insert(0, str(Path(__file__).parent))

from oracles import gap_oracle, rouge_l_exact, rouge_n_exact  # noqa: E402

from m2mskit.cli import main as cli_main  # noqa: E402
from m2mskit.corpusops import (  # noqa: E402
    SPLITS,
    TEST,
    TRAIN,
    VAL,
    SamplerConfig,
    crosssum_split,
    direction_weights,
    leakage_violations,
    sample_direction,
    split_m2ms,
)
from m2mskit.evalkit import DegenerateRank, centroid_drift, correct_language_rate, detect_language, pca_project  # noqa: E402
from m2mskit.evalkit.langid import data_dir, seed_words  # noqa: E402
from m2mskit.fixtures import _HI, _TH, _ZH, mock_dictionaries, synthetic_clusters, synthetic_documents, write_jsonl  # noqa: E402
from m2mskit.gsg import select_gap_sentences  # noqa: E402
from m2mskit.noising import NoiseConfig, apply_infill, infill_mask, record_rng  # noqa: E402
from m2mskit.providers import MockProvider  # noqa: E402
from m2mskit.pseudogen import MASK_SENT, Discarded, PseudoConfig, build_pseudo_m2ms, round_trip_check  # noqa: E402
from m2mskit.rouge import rouge1_text, rouge_l, rouge_n  # noqa: E402
from m2mskit.textcore import Document, get_language, lang_tag  # noqa: E402

CRITERIA: dict[int, tuple[str, callable]] = {}


def criterion(num: int, title: str):
    def deco(fn):
        CRITERIA[num] = (title, fn)
        return fn
    return deco


@contextmanager
def chdir(path: Path):
    old = os.getcwd()
    os.chdir(path)
    try:
        yield
    finally:
        os.chdir(old)


@criterion(1, "ROUGE matches oracles on 10,000 random pairs")
def check_rouge_oracle(tmp: Path):
    rng = random.Random(0)
    pairs = []
    for _ in range(10_000):
        alphabet = "abcdef"[:rng.randint(1, 6)]
        pairs.append(([rng.choice(alphabet) for _ in range(rng.randint(0, 12))],
                      [rng.choice(alphabet) for _ in range(rng.randint(0, 12))]))
    t0 = time.perf_counter()
    got = [(rouge_n(c, r, 1), rouge_n(c, r, 2), rouge_l(c, r)) for c, r in pairs]
    elapsed = time.perf_counter() - t0
    worst = 0.0
    for (c, r), scores in zip(pairs, got):
        expected = (rouge_n_exact(c, r, 1), rouge_n_exact(c, r, 2), rouge_l_exact(c, r))
        for s, e in zip(scores, expected):
            for a, b in zip((s.precision, s.recall, s.f1), e):
                worst = max(worst, abs(a - float(b)))
    ok = worst < 1e-9 and elapsed < 10
    return ok, f"max |delta| {worst:.2e}, runtime {elapsed:.2f}s"


@criterion(2, "canonical ROUGE values")
def check_rouge_canonical(tmp: Path):
    values = {
        "R1 'the cat sat'/'the cat'": (rouge1_text("the cat sat", "the cat", "en").f1, 0.8),
        "RL 'a b c d'/'a c b d'": (rouge_l("a b c d".split(), "a c b d".split()).f1, 0.75),
        "identity": (rouge_n("x y z".split(), "x y z".split(), 1).f1, 1.0),
        "identity RL": (rouge_l("x y z".split(), "x y z".split()).f1, 1.0),
        "disjoint": (rouge_n("a b".split(), "c d".split(), 1).f1, 0.0),
        "disjoint RL": (rouge_l("a b".split(), "c d".split()).f1, 0.0),
    }
    bad = {k: v for k, v in values.items() if abs(v[0] - v[1]) > 1e-12}
    return not bad, "all exact" if not bad else f"mismatches {bad}"


@criterion(3, "gap-sentence selection matches oracle on 1,000 documents x 3 ratios")
def check_gsg(tmp: Path):
    rng = random.Random(1)
    vocab = [f"w{i}" for i in range(8)]
    docs = []
    for _ in range(1000):
        n = rng.randint(2, 8)
        total = rng.randint(n, 40)
        cuts = sorted(rng.sample(range(1, total), n - 1))
        lengths = [b - a for a, b in zip([0] + cuts, cuts + [total])]
        docs.append([[rng.choice(vocab) for _ in range(m)] for m in lengths])
    mismatches, elapsed = 0, 0.0
    for sents in docs:
        doc = Document.from_sentences("d", "en", [" ".join(s) for s in sents])
        for k in (5, 10, 15):
            t0 = time.perf_counter()
            sel = select_gap_sentences(doc, k)
            elapsed += time.perf_counter() - t0
            gaps, _, budget = gap_oracle(sents, k)
            if list(sel.gap_indices) != gaps or sel.token_budget != budget:
                mismatches += 1
    return mismatches == 0 and elapsed < 30, f"{mismatches} mismatches of 3000, runtime {elapsed:.2f}s"


@criterion(4, "text infilling ratio, span disjointness and determinism")
def check_infill(tmp: Path):
    cfg = NoiseConfig()
    tokens = [f"t{i}" for i in range(100)]
    fractions, problems = [], []
    for seed in range(1000):
        runs = [infill_mask(100, 0.15, cfg, np.random.default_rng(seed)) for _ in range(3)]
        if not all(np.array_equal(runs[0], r) for r in runs[1:]):
            problems.append(f"seed {seed} not deterministic")
        mask = runs[0]
        fractions.append(mask.sum() / 100)
        out = apply_infill(tokens, mask)
        # each maximal masked run becomes exactly one mask and survivors keep order
        n_runs = int(mask[0]) + int(np.sum(mask[1:] & ~mask[:-1]))
        if out.count("<mask>") != n_runs:
            problems.append(f"seed {seed}: mask tokens do not match masked runs")
        if any(a == b == "<mask>" for a, b in zip(out, out[1:])):
            problems.append(f"seed {seed}: adjacent masks")
        if [t for t in out if t != "<mask>"] != [t for t, m in zip(tokens, mask) if not m]:
            problems.append(f"seed {seed}: survivors altered")
    lo, hi = min(fractions), max(fractions)
    ok = not problems and 0.15 <= lo and hi <= 0.18
    return ok, f"masked fraction range [{lo:.2f}, {hi:.2f}]" + (f"; {problems[:3]}" if problems else "")


def _docs(n: int, seed: int, langs=("en", "fr", "tr")) -> list[Document]:
    docs = [Document.from_record(r) for r in synthetic_documents(n, seed=seed, langs=langs)]
    return [d for d in docs if len(d.sentences) >= 2]


@criterion(5, "round-trip filter discard behaviour")
def check_round_trip(tmp: Path):
    docs = _docs(200, seed=11)
    identity = MockProvider()
    cfg = PseudoConfig(lambda_threshold=0.7)
    ident_discards = sum(isinstance(build_pseudo_m2ms(d, "zh", identity, cfg, record_rng(0, d.id)), Discarded)
                         for d in docs)

    sentences = [[f"s{i}w{j}" for j in range(10)] for i in range(200)]
    back = {w: ("garbled" if j < 5 else w) for sent in sentences for j, w in enumerate(sent)}
    corrupting = MockProvider({"en-fr": {}, "fr-en": back})
    corrupt_kept = sum(round_trip_check(" ".join(s), "en", "fr", corrupting, 0.7)[0] for s in sentences)

    vocab = sorted({t for d in docs for s in d.sentences for t in s.text.split()})
    partial = MockProvider({"en-fr": {}, "fr-en": {w: ("garbled" if zlib.crc32(w.encode()) % 4 == 0 else w)
                                                   for w in vocab}})
    en_docs = [d for d in docs if d.lang.code == "en"]
    rates = []
    for lam in (0.0, 0.3, 0.5, 0.7, 0.9, 1.0):
        c = PseudoConfig(lambda_threshold=lam)
        n = sum(isinstance(build_pseudo_m2ms(d, "fr", partial, c, record_rng(0, d.id)), Discarded)
                for d in en_docs)
        rates.append(n / len(en_docs))
    monotone = all(a <= b for a, b in zip(rates, rates[1:]))
    ok = ident_discards == 0 and corrupt_kept == 0 and monotone
    return ok, (f"identity discards {ident_discards}/{len(docs)}, corrupting kept {corrupt_kept}/200, "
                f"rates over lambda {[round(r, 3) for r in rates]}")


TAG = re.compile(r"<[A-Z][a-z]>")


@criterion(6, "pseudo-sample format on a 200-document bilingual fixture")
def check_pseudo_format(tmp: Path):
    provider = MockProvider(mock_dictionaries(("en", "fr")))
    docs = _docs(200, seed=21, langs=("en", "fr"))
    problems, n, n_half_cases = [], 0, Counter()
    # the default ratios mostly pick one gap; larger ones exercise the halving
    for d, cfg in [(d, c) for c in (PseudoConfig(), PseudoConfig(k_choices=(30, 50))) for d in docs]:
        tgt = get_language("fr" if d.lang.code == "en" else "en")
        ex = build_pseudo_m2ms(d, tgt, provider, cfg, record_rng(6, d.id))
        if isinstance(ex, Discarded):
            continue
        n += 1
        gaps = ex.meta["gap_indices"]
        n_half_cases[len(gaps)] += 1
        src_tag, tgt_tag = lang_tag(d.lang), lang_tag(tgt)
        if not (ex.src_text.startswith(src_tag + " ") and ex.tgt_text.startswith(tgt_tag + " ")):
            problems.append(f"{d.id}: leading tags")
        if len(TAG.findall(ex.src_text)) != 1 or len(TAG.findall(ex.tgt_text)) != 1:
            problems.append(f"{d.id}: extra tags")
        if (ex.src_lang, ex.tgt_lang) != (d.lang, tgt):
            problems.append(f"{d.id}: language fields")
        if ex.src_text.count(MASK_SENT) != len(gaps) // 2:
            problems.append(f"{d.id}: half-mode mask count")
        expected = tgt.joiner.join(provider.translate(d.sentences[g].text, d.lang, tgt) for g in gaps)
        if gaps != sorted(gaps) or ex.tgt_text != f"{tgt_tag} {expected}":
            problems.append(f"{d.id}: target order")
    ok = not problems and n >= 300 and max(n_half_cases) >= 3
    return ok, (f"{n} examples checked, gap-count histogram {dict(sorted(n_half_cases.items()))}"
                + (f"; {problems[:3]}" if problems else ""))


@criterion(7, "split leakage scan over 20 seeds with Tr zero-shot")
def check_split(tmp: Path):
    clusters = synthetic_clusters(1000, seed=0)
    langs = sorted({code for c in clusters for code in c.members})
    total_violations, tr_train, mixed = 0, 0, 0
    for seed in range(20):
        split = split_m2ms(clusters, (0.8, 0.1, 0.1), {"tr"}, seed)
        total_violations += len(leakage_violations(split))
        # independent restatement: a cluster never appears under two different split names
        where: dict[str, set] = {}
        for (a, b), parts in split.directions.items():
            for s in SPLITS:
                for ex in parts[s]:
                    where.setdefault(ex.cluster_id, set()).add(s)
                if s == TRAIN and "tr" in (a, b):
                    tr_train += len(parts[s])
        mixed += sum(1 for v in where.values() if len(v & {VAL, TEST}) and len(v) > 1)
    ok = total_violations == 0 and mixed == 0 and tr_train == 0 and len(langs) == 6
    return ok, f"languages {langs}; violations {total_violations}; mixed clusters {mixed}; Tr train {tr_train}"


@criterion(8, "CrossSum split rules")
def check_crosssum(tmp: Path):
    out = crosssum_split({("fr", "hi"): list(range(999)), ("en", "en"): list(range(12000))}, seed=0)
    zs = tuple(len(out[("fr", "hi")][s]) for s in SPLITS)
    mono = tuple(len(out[("en", "en")][s]) for s in SPLITS)
    return zs == (0, 499, 500) and mono == (8000, 1000, 1000), f"999 -> {zs}; 12000 -> {mono}"


@criterion(9, "temperature sampler weights and draws")
def check_sampler(tmp: Path):
    w = direction_weights(SamplerConfig(0.5, {"en-zh": 100, "en-fr": 400}))
    exact = w == {"en-zh": 1 / 3, "en-fr": 2 / 3}
    rng = np.random.default_rng(2024)
    draws = Counter(sample_direction(w, rng) for _ in range(100_000))
    freq = {k: draws[k] / 100_000 for k in w}
    within = all(abs(freq[k] - w[k]) <= 0.01 for k in w)
    p = chisquare([draws[k] for k in w], [w[k] * 100_000 for k in w]).pvalue
    ok = exact and within and p > 0.01
    return ok, f"weights {w}; frequencies {freq}; chi-square p {p:.3f}"


@criterion(10, "language identification accuracy and correct-language rate")
def check_langid(tmp: Path):
    rng = random.Random(10)
    joiners = {"hi": " ", "zh": "", "th": ""}
    words = {"hi": _HI, "zh": _ZH, "th": _TH}
    script_ok = 0
    for code in ("hi", "zh", "th"):
        for _ in range(100):
            text = joiners[code].join(rng.choice(words[code]) for _ in range(rng.randint(1, 8)))
            script_ok += detect_language(text).code == code
    latin_ok = 0
    for code in ("en", "fr", "tr"):
        seeds = seed_words(data_dir() / "seeds" / f"{code}.txt")
        for _ in range(100):
            sent = " ".join(rng.choice(seeds) for _ in range(rng.randint(6, 12)))
            latin_ok += detect_language(sent.capitalize() + ".").code == code
    hand = [
        (["สวัสดี"] * 7 + ["你好"] * 3, "th", 70.0),
        (["你好"] * 3 + ["नमस्ते"] + ["", "  "], "zh", 50.0),
        (["the house is very big and old"] * 4 + ["la maison est très grande"], "en", 80.0),
    ]
    hand_ok = all(abs(correct_language_rate(c, lang) - rate) < 1e-9 for c, lang, rate in hand)
    ok = script_ok == 300 and latin_ok / 300 >= 0.95 and hand_ok
    return ok, f"script {script_ok}/300; latin {latin_ok}/300 ({latin_ok / 3:.1f}%); hand counts {hand_ok}"


@criterion(11, "PCA projection and centroid drift")
def check_pca(tmp: Path):
    rng = np.random.default_rng(11)
    worst, ordered = 0.0, True
    for _ in range(200):
        x = rng.standard_normal((6, 3))
        centered = x - x.mean(axis=0)
        vals, vecs = np.linalg.eigh(centered.T @ centered / 5)
        vecs = vecs[:, np.argsort(vals)[::-1][:2]]
        for j in range(2):
            if vecs[np.argmax(np.abs(vecs[:, j])), j] < 0:
                vecs[:, j] *= -1
        with warnings.catch_warnings():
            warnings.simplefilter("error", DegenerateRank)
            got = pca_project(x)
        worst = max(worst, float(np.max(np.abs(got - centered @ vecs))))
        var = got.var(axis=0)
        ordered &= bool(var[0] >= var[1] - 1e-12)
    pts = np.array([[0, 0], [0, 0], [3, 4], [3, 4]], dtype=float)
    d1 = centroid_drift(pts, ["tr", "tr", "en", "en"], "tr")
    d0 = centroid_drift(np.array([[1.0, 2], [1, 2]]), ["tr", "en"], "tr")
    ok = worst < 1e-6 and ordered and d1 == 5.0 and d0 == 0.0
    return ok, f"max |delta| {worst:.2e}; variances ordered {ordered}; drift {d1} and {d0}"


def _pipeline(work: Path, jobs: int) -> float:
    clusters = synthetic_clusters(50, seed=12)
    write_jsonl([c.to_record() for c in clusters], work / "clusters.jsonl")
    write_jsonl([{"id": f"{c.cluster_id}-{lang}", "lang": lang, "text": m.doc}
                 for c in clusters for lang, m in sorted(c.members.items())], work / "docs.jsonl")
    cfg = {"global_seed": 12, "provider": {"kind": "mock", "dictionaries": mock_dictionaries()},
           "split": {"zero_shot_languages": ["tr"]}}
    (work / "config.json").write_text(json.dumps(cfg, ensure_ascii=False), encoding="utf-8")
    common = ["--config", "config.json", "--jobs", str(jobs)]
    t0 = time.perf_counter()
    with chdir(work):
        steps = [
            ["segment", "--in", "docs.jsonl", "--out", "seg.jsonl"],
            ["split", "--in", "clusters.jsonl", "--out", "split"],
            ["make-m2ms", "--in", "seg.jsonl", "--out", "m2ms.jsonl"],
        ]
        for step in steps:
            if cli_main(step + common) != 0:
                raise RuntimeError(f"step {step[0]} failed")
        preds = []
        for f in sorted(Path("split").glob("*.jsonl")):
            for line in f.read_text(encoding="utf-8").splitlines():
                r = json.loads(line)
                if r["split"] == TEST:
                    preds.append({"id": f"{r['cluster_id']}:{f.stem}", "direction": f.stem,
                                  "candidate": r["summary"], "reference": r["summary"]})
        write_jsonl(preds, Path("preds.jsonl"))
        if cli_main(["eval", "--in", "preds.jsonl", "--out", "report.json"] + common) != 0:
            raise RuntimeError("step eval failed")
    return time.perf_counter() - t0


@criterion(12, "end-to-end CLI pipeline, fast and identical across --jobs 1/8")
def check_end_to_end(tmp: Path):
    a, b = tmp / "jobs1", tmp / "jobs8"
    a.mkdir()
    b.mkdir()
    ta = _pipeline(a, 1)
    tb = _pipeline(b, 8)
    files_a = sorted(p.relative_to(a) for p in a.rglob("*") if p.is_file())
    files_b = sorted(p.relative_to(b) for p in b.rglob("*") if p.is_file())
    differ = [str(p) for p in files_a if (a / p).read_bytes() != (b / p).read_bytes()] if files_a == files_b else ["file sets"]
    report = json.loads((a / "report.json").read_text())
    scores = [cell["rouge1"] for row in report["grid"].values() for cell in row.values() if cell]
    ok = not differ and ta < 60 and tb < 60 and scores and all(s == 1.0 for s in scores)
    return ok, (f"{len(files_a)} files, differing {differ or 'none'}; runtimes {ta:.2f}s / {tb:.2f}s; "
                f"{len(scores)} directions scored")


@pytest.mark.parametrize("num", sorted(CRITERIA))
def test_criterion(num, tmp_path, capsys):
    title, fn = CRITERIA[num]
    try:
        ok, detail = fn(tmp_path)
    except Exception as exc:  # report, then let pytest show the traceback
        with capsys.disabled():
            print(f"\nFAIL criterion {num:2d}: {title} -- raised {type(exc).__name__}: {exc}")
        raise
    with capsys.disabled():
        print(f"\n{'PASS' if ok else 'FAIL'} criterion {num:2d}: {title} -- {detail}")
    assert ok, detail


if __name__ == "__main__":
    failed = 0
    for num in sorted(CRITERIA):
        title, fn = CRITERIA[num]
        with tempfile.TemporaryDirectory() as d:
            try:
                ok, detail = fn(Path(d))
            except Exception as exc:
                ok, detail = False, f"raised {type(exc).__name__}: {exc}"
        failed += not ok
        print(f"{'PASS' if ok else 'FAIL'} criterion {num:2d}: {title} -- {detail}")
    sys.exit(1 if failed else 0)
