"""``m2mskit`` command line: one subcommand per pipeline stage.

Every subcommand reads JSONL from ``--in`` and writes to ``--out``; a
manifest with the config digest, seed, input digests and per-stage counts is
written next to the output.  Exit status: 0 success, 1 input error, 2 provider
failure after retries.
"""

from __future__ import annotations

import argparse
import hashlib
import json
import logging
import sys
from concurrent.futures import ThreadPoolExecutor
from dataclasses import replace
from pathlib import Path
from typing import Callable, Iterable

from . import __version__
from .config import ConfigError, RunConfig
from .corpusops import (SPLITS, AllEmpty, ParallelCluster, SamplerConfig, crosssum_split,
                        direction_key, direction_weights, leakage_violations, parse_direction,
                        split_m2ms)
from .evalkit.embeddings import drift_analysis, load_embedding_set
from .evalkit.langid import EmptyText, Unclassifiable, default_identifier, regen_profiles
from .evalkit.report import evaluate_predictions, report_json, report_tsv
from .gsg import DegenerateDocument, select_gap_sentences
from .noising import record_rng
from .providers import ProviderError
from .pseudogen import (Discarded, build_meta_example, build_pseudo_m2ms, build_xldn_example)
from .textcore import Document, UnsupportedLanguage, get_language

log = logging.getLogger("m2mskit")

EXIT_OK, EXIT_INPUT, EXIT_PROVIDER = 0, 1, 2

COMMANDS = ("segment", "gsg", "noise-meta", "make-xldn", "make-m2ms", "split", "crosssum-split",
            "sample-plan", "eval", "langid", "drift", "regen-profiles")


class InputError(Exception):
    pass


# io helpers

def read_jsonl(path: Path) -> list[dict]:
    records = []
    try:
        with open(path, encoding="utf-8") as fh:
            for lineno, line in enumerate(fh, 1):
                if line.strip():
                    try:
                        records.append(json.loads(line))
                    except json.JSONDecodeError as exc:
                        raise InputError(f"{path}:{lineno}: {exc}") from None
    except OSError as exc:
        raise InputError(str(exc)) from None
    return records


def dumps(rec) -> str:
    return json.dumps(rec, ensure_ascii=False, sort_keys=True)


def write_jsonl(records: Iterable[dict], path: Path) -> int:
    path.parent.mkdir(parents=True, exist_ok=True)
    n = 0
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        for rec in records:
            fh.write(dumps(rec) + "\n")
            n += 1
    return n


def file_digest(path: Path) -> str:
    h = hashlib.sha256()
    if path.is_dir():
        for p in sorted(path.rglob("*")):
            if p.is_file():
                h.update(str(p.relative_to(path)).encode())
                h.update(p.read_bytes())
    else:
        h.update(path.read_bytes())
    return h.hexdigest()


def ordered_map(fn: Callable, items: list, jobs: int) -> list:
    """Map preserving input order regardless of completion order."""
    if jobs <= 1:
        return [fn(x) for x in items]
    with ThreadPoolExecutor(max_workers=jobs) as pool:
        return list(pool.map(fn, items))


class Run:
    def __init__(self, args: argparse.Namespace, cfg: RunConfig):
        self.args = args
        self.cfg = cfg
        self.seed = args.seed if args.seed is not None else cfg.global_seed
        self.jobs = max(1, args.jobs)
        inp = args.inp or cfg.paths.input
        out = args.out or cfg.paths.output
        self.inp = Path(inp) if inp else None
        self.out = Path(out) if out else None
        self.counts: dict = {}
        self.extra: dict = {}
        self.manifest_name = "manifest.json"

    def need_in(self) -> Path:
        if self.inp is None:
            raise InputError("--in is required")
        if not self.inp.exists():
            raise InputError(f"input not found: {self.inp}")
        return self.inp

    def need_out(self) -> Path:
        if self.out is None:
            raise InputError("--out is required")
        return self.out

    def manifest_path(self) -> Path:
        out = self.need_out()
        if out.suffix == "":
            return out / self.manifest_name
        return out.with_name(out.name + ".manifest.json")

    def write_manifest(self) -> None:
        manifest = {
            "command": self.args.command,
            "version": __version__,
            "config_sha256": self.cfg.digest(),
            "seed": self.seed,
            "inputs": {str(self.inp): file_digest(self.inp)} if self.inp and self.inp.exists() else {},
            "counts": self.counts,
            **self.extra,
        }
        path = self.manifest_path()
        path.parent.mkdir(parents=True, exist_ok=True)
        path.write_text(json.dumps(manifest, ensure_ascii=False, sort_keys=True, indent=2) + "\n",
                        encoding="utf-8")


def _doc(rec: dict) -> Document:
    try:
        return Document.from_record(rec)
    except KeyError as exc:
        raise InputError(f"record {rec.get('id')!r} lacks field {exc}") from None


# subcommands

def cmd_segment(run: Run) -> int:
    docs = [_doc(r) for r in read_jsonl(run.need_in())]
    n = write_jsonl((d.to_record() for d in docs), run.need_out())
    run.counts = {"input": len(docs), "written": n,
                  "sentences": sum(len(d.sentences) for d in docs)}
    return EXIT_OK


def cmd_gsg(run: Run) -> int:
    docs = [_doc(r) for r in read_jsonl(run.need_in())]
    choices = run.cfg.pseudo.k_choices

    def one(doc: Document):
        if len(doc.sentences) < 2:
            return None
        k = run.args.k or int(record_rng(run.seed, doc.id, "k").choice(choices))
        return select_gap_sentences(doc, k).to_record()

    results = ordered_map(one, docs, run.jobs)
    kept = [r for r in results if r is not None]
    write_jsonl(kept, run.need_out())
    run.counts = {"input": len(docs), "kept": len(kept), "discarded": 0,
                  "skipped": len(docs) - len(kept)}
    return EXIT_OK


def cmd_noise_meta(run: Run) -> int:
    docs = [_doc(r) for r in read_jsonl(run.need_in())]

    def one(doc: Document):
        if not doc.sentences:
            return None
        return build_meta_example(doc, run.cfg.noise, record_rng(run.seed, doc.id, "meta")).to_record()

    results = ordered_map(one, docs, run.jobs)
    kept = [r for r in results if r is not None]
    write_jsonl(kept, run.need_out())
    run.counts = {"input": len(docs), "kept": len(kept), "discarded": 0,
                  "skipped": len(docs) - len(kept)}
    return EXIT_OK


def cmd_make_xldn(run: Run) -> int:
    recs = read_jsonl(run.need_in())

    def one(rec: dict):
        try:
            key = str(rec["id"])
            ex = build_xldn_example(rec["src"], rec["tgt"], rec["src_lang"], rec["tgt_lang"],
                                    run.cfg.noise, record_rng(run.seed, key, "xldn"))
        except KeyError as exc:
            raise InputError(f"pair record lacks field {exc}") from None
        except ValueError as exc:
            if isinstance(exc, UnsupportedLanguage):
                raise
            return ("skip", f"{rec.get('id')}: {exc}")
        rec_out = ex.to_record()
        rec_out["meta"]["id"] = key
        return ("keep", rec_out)

    results = ordered_map(one, recs, run.jobs)
    kept = [r for tag, r in results if tag == "keep"]
    write_jsonl(kept, run.need_out())
    run.counts = {"input": len(recs), "kept": len(kept), "discarded": 0,
                  "skipped": len(recs) - len(kept)}
    return EXIT_OK


def cmd_make_m2ms(run: Run) -> int:
    recs = read_jsonl(run.need_in())
    docs = [_doc(r) for r in recs]
    pcfg = run.cfg.provider
    if run.args.provider:
        pcfg = replace(pcfg, kind=run.args.provider)
    provider = pcfg.build()
    cfg = run.cfg.pseudo
    if run.args.lam is not None:
        cfg = replace(cfg, lambda_threshold=run.args.lam)
    target_langs = [get_language(x) for x in run.cfg.languages]

    def one(item):
        rec, doc = item
        if len(doc.sentences) < 2:
            return ("skipped", "degenerate", doc.id)
        if rec.get("tgt"):
            tgt = get_language(rec["tgt"])
        else:
            tgt = target_langs[int(record_rng(run.seed, doc.id, "tgt").integers(len(target_langs)))]
        try:
            res = build_pseudo_m2ms(doc, tgt, provider, cfg, record_rng(run.seed, doc.id, "m2ms"))
        except ProviderError as exc:
            log.warning("skipping %s: %s", doc.id, exc)
            return ("skipped", "provider", doc.id)
        except DegenerateDocument:
            return ("skipped", "degenerate", doc.id)
        if isinstance(res, Discarded):
            return ("discarded", res.reason, doc.id)
        return ("kept", res.to_record(), doc.id)

    results = ordered_map(one, list(zip(recs, docs)), run.jobs)
    kept = [r[1] for r in results if r[0] == "kept"]
    write_jsonl(kept, run.need_out())
    provider_failures = sum(1 for r in results if r[0] == "skipped" and r[1] == "provider")
    run.counts = {
        "input": len(docs),
        "kept": len(kept),
        "discarded": sum(1 for r in results if r[0] == "discarded"),
        "skipped": sum(1 for r in results if r[0] == "skipped"),
        "skipped_provider": provider_failures,
    }
    run.extra["lambda_threshold"] = cfg.lambda_threshold
    return EXIT_PROVIDER if provider_failures else EXIT_OK


def _write_split_dir(out: Path, directions: dict, make_rec: Callable) -> dict:
    out.mkdir(parents=True, exist_ok=True)
    counts = {}
    for d, parts in sorted(directions.items()):
        rows = [make_rec(d, s, ex) for s in SPLITS for ex in parts[s]]
        write_jsonl(rows, out / f"{direction_key(d)}.jsonl")
        counts[direction_key(d)] = {s: len(parts[s]) for s in SPLITS}
    return counts


def cmd_split(run: Run) -> int:
    try:
        clusters = [ParallelCluster.from_record(r) for r in read_jsonl(run.need_in())]
    except (KeyError, TypeError) as exc:
        raise InputError(f"malformed cluster record: {exc}") from None
    sc = run.cfg.split
    targets = ({parse_direction(k): tuple(v) for k, v in sc.targets.items()}
               if sc.targets else (sc.train, sc.validation, sc.test))
    result = split_m2ms(clusters, targets, sc.zero_shot_languages, run.seed,
                        [parse_direction(d) for d in sc.zero_shot_directions])
    out = run.need_out()

    def rec(d, s, ex):
        return {"split": s, "cluster_id": ex.cluster_id, "src_lang": d[0], "tgt_lang": d[1],
                "doc": ex.doc, "summary": ex.summary}

    run.counts = {"clusters": len(clusters),
                  "labels": {s: sum(1 for v in result.labels.values() if v == s) for s in SPLITS},
                  "directions": _write_split_dir(out, result.directions, rec)}
    violations = leakage_violations(result)
    run.extra["leakage_scan"] = {"violations": len(violations), "examples": violations[:10]}
    run.extra["shortfalls"] = result.shortfalls
    return EXIT_OK


def cmd_crosssum_split(run: Run) -> int:
    grouped: dict = {}
    for r in read_jsonl(run.need_in()):
        try:
            d = parse_direction(r["direction"])
        except KeyError:
            raise InputError("crosssum record lacks 'direction'") from None
        slot = grouped.setdefault(d, {s: [] for s in SPLITS})
        s = r.get("split", "train")
        s = "validation" if s in ("val", "dev") else s
        if s not in slot:
            raise InputError(f"unknown split {s!r}")
        slot[s].append(r)
    result = crosssum_split(grouped, run.seed)

    def rec(d, s, ex):
        return {**ex, "direction": direction_key(d), "split": s}

    run.counts = {"directions": _write_split_dir(run.need_out(), result, rec)}
    run.extra["zero_shot"] = sorted(direction_key(d) for d, p in result.items() if not p["train"])
    return EXIT_OK


def cmd_sample_plan(run: Run) -> int:
    counts = dict(run.cfg.sampler.direction_counts)
    if run.inp is not None:
        for r in read_jsonl(run.need_in()):
            try:
                counts[direction_key(parse_direction(r["direction"]))] = int(r["count"])
            except KeyError as exc:
                raise InputError(f"sample-plan record lacks {exc}") from None
    try:
        weights = direction_weights(SamplerConfig(run.cfg.sampler.alpha, counts))
    except AllEmpty as exc:
        raise InputError(str(exc)) from None
    rows = [{"direction": d, "count": counts[d], "probability": weights[d]} for d in sorted(weights)]
    write_jsonl(rows, run.need_out())
    run.counts = {"directions": len(rows)}
    run.extra["alpha"] = run.cfg.sampler.alpha
    return EXIT_OK


def cmd_eval(run: Run) -> int:
    recs = read_jsonl(run.need_in())
    if not recs:
        raise InputError("no predictions")
    try:
        reports = evaluate_predictions(recs, run.jobs)
    except KeyError as exc:
        raise InputError(f"prediction record lacks {exc}") from None
    out = run.need_out()
    out.parent.mkdir(parents=True, exist_ok=True)
    out.write_text(report_json(reports), encoding="utf-8")
    out.with_suffix(".tsv").write_text(report_tsv(reports), encoding="utf-8")
    run.counts = {"predictions": len(recs), "directions": len(reports)}
    return EXIT_OK


def cmd_langid(run: Run) -> int:
    recs = read_jsonl(run.need_in())
    ident = default_identifier()

    def one(rec: dict) -> dict:
        try:
            return {"id": rec.get("id"), "lang": ident.detect(rec["text"]).code}
        except (EmptyText, Unclassifiable) as exc:
            return {"id": rec.get("id"), "lang": None, "error": type(exc).__name__}

    rows = ordered_map(one, recs, run.jobs)
    write_jsonl(rows, run.need_out())
    run.counts = {"input": len(recs), "unresolved": sum(1 for r in rows if r["lang"] is None)}
    return EXIT_OK


def cmd_drift(run: Run) -> int:
    src = run.need_in()
    files = {get_language(p.stem).code: p for p in sorted(src.iterdir())
             if p.suffix in (".tsv", ".txt")} if src.is_dir() else {}
    if not files:
        raise InputError(f"{src}: expected a directory of <lang>.tsv embedding files")
    focal = get_language(run.args.focal).code
    result = drift_analysis(load_embedding_set(files), focal)
    out = run.need_out()
    out.parent.mkdir(parents=True, exist_ok=True)
    out.write_text(json.dumps(result, ensure_ascii=False, indent=2) + "\n", encoding="utf-8")
    run.counts = result["n_points"]
    return EXIT_OK


def cmd_regen_profiles(run: Run) -> int:
    # the profile directory already owns manifest.json
    run.manifest_name = "run.manifest.json"
    run.counts = regen_profiles(run.inp, run.out)
    return EXIT_OK


HANDLERS: dict[str, Callable[[Run], int]] = {
    "segment": cmd_segment,
    "gsg": cmd_gsg,
    "noise-meta": cmd_noise_meta,
    "make-xldn": cmd_make_xldn,
    "make-m2ms": cmd_make_m2ms,
    "split": cmd_split,
    "crosssum-split": cmd_crosssum_split,
    "sample-plan": cmd_sample_plan,
    "eval": cmd_eval,
    "langid": cmd_langid,
    "drift": cmd_drift,
    "regen-profiles": cmd_regen_profiles,
}


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", type=Path, help="run config JSON")
    common.add_argument("--in", dest="inp", help="input JSONL (or directory)")
    common.add_argument("--out", help="output path")
    common.add_argument("--seed", type=int, help="overrides global_seed from the config")
    common.add_argument("--jobs", type=int, default=1, help="worker threads")
    common.add_argument("--provider", choices=("mock", "http"), help="translation provider")
    common.add_argument("-v", "--verbose", action="store_true")

    parser = argparse.ArgumentParser(prog="m2mskit", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", metavar="COMMAND")
    helps = {
        "segment": "split raw documents into sentences",
        "gsg": "select gap sentences per document",
        "noise-meta": "build sentence-permutation + infilling denoising examples",
        "make-xldn": "build cross-lingual denoising examples from sentence pairs",
        "make-m2ms": "build pseudo many-to-many summarization samples",
        "split": "leakage-free re-split of parallel clusters",
        "crosssum-split": "apply the CrossSum re-splitting rules",
        "sample-plan": "per-direction sampling probabilities |D|^alpha",
        "eval": "ROUGE + correct-language-rate report per direction",
        "langid": "detect the language of each record",
        "drift": "PCA centroid drift of per-language word embeddings",
        "regen-profiles": "rebuild trigram profiles from the seed word lists",
    }
    for name in COMMANDS:
        p = sub.add_parser(name, parents=[common], help=helps[name])
        if name == "gsg":
            p.add_argument("--k", type=int, help="fixed k percent instead of drawing from k_choices")
        if name == "make-m2ms":
            p.add_argument("--lambda", dest="lam", type=float, help="round-trip threshold override")
        if name == "drift":
            p.add_argument("--focal", default="tr", help="language whose centroid is compared")
    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_INPUT if exc.code else EXIT_OK
    if not args.command:
        parser.print_usage(sys.stderr)
        return EXIT_INPUT
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        cfg = RunConfig.load(args.config) if args.config else RunConfig()
        run = Run(args, cfg)
        status = HANDLERS[args.command](run)
        if run.out is not None:
            run.write_manifest()
        return status
    except (InputError, ConfigError, UnsupportedLanguage, OSError) as exc:
        print(f"m2mskit {args.command}: error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except ProviderError as exc:
        print(f"m2mskit {args.command}: provider failure: {exc}", file=sys.stderr)
        return EXIT_PROVIDER


if __name__ == "__main__":
    sys.exit(main())
