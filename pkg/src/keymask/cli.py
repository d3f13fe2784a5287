"""Command-line front end: extract -> filter -> mask -> stats -> report.

Configuration comes from a JSON file (--config) with every value overridable
by a flag, so a single serializable document pins a reproducible run:

    {
      "corpus":     {"path": "corpus.jsonl", "format": "jsonl", "text_field": "text"},
      "vocab":      "vocab.txt",
      "embedding":  {"static_table": "vectors.txt"},
                    // or {"remote_url": "http://...", "timeout": 10, "max_retries": 3}
      "extraction": {"top_k": 10, "diversity": 0.8, "min_word_len": 2, "stopwords": null},
      "masking":    {"mode": "keyword", "select_prob": null, "seed": 13, "max_len": 512},
      "output_dir": "out"
    }

Every subcommand writes machine-readable errors to stderr as single-line
JSON and exits non-zero. KEYMASK_THREADS sets the default worker count.
"""

from __future__ import annotations

import argparse
import csv
import json
import os
import sys
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path

from .corpus import Document, Vocabulary, load_corpus
from .embeddings import EmbeddingProvider, RemoteEmbeddingProvider, StaticTableProvider
from .errors import ConfigError, KeymaskError
from .keyword_extract import (
    ExtractionParams,
    extract_document_keywords,
    load_default_stopwords,
    load_stopwords,
)
from .keyword_filter import (
    KeywordHistogram,
    apply_min_count,
    build_histogram,
    knee_candidates,
    read_keyword_list,
    write_freq_curve,
    write_keyword_list,
)
from .masking import MaskingConfig, _chunks, emit_dataset
from .stats import cohens_kappa, load_predictions, load_ratings, paired_bootstrap


def _default_threads() -> int:
    raw = os.environ.get("KEYMASK_THREADS", "1")
    try:
        value = int(raw)
    except ValueError:
        raise ConfigError(f"KEYMASK_THREADS must be an integer, got {raw!r}")
    if value < 1:
        raise ConfigError(f"KEYMASK_THREADS must be positive, got {value}")
    return value


@dataclass
class PipelineConfig:
    """Merged view of the config file and command-line overrides."""

    corpus_path: str | None = None
    corpus_format: str = "jsonl"
    text_field: str = "text"
    vocab: str | None = None
    static_table: str | None = None
    remote_url: str | None = None
    remote_timeout: float = 10.0
    remote_max_retries: int = 3
    extraction: dict = field(default_factory=dict)
    masking: dict = field(default_factory=dict)
    output_dir: str = "."

    @classmethod
    def build(cls, args: argparse.Namespace) -> "PipelineConfig":
        raw = {}
        config_path = getattr(args, "config", None)
        if config_path:
            try:
                with open(config_path, encoding="utf-8") as f:
                    raw = json.load(f)
            except OSError as exc:
                raise ConfigError(f"cannot read config file {config_path}: {exc}")
            except json.JSONDecodeError as exc:
                raise ConfigError(f"config file {config_path} is not valid JSON: {exc}")
            if not isinstance(raw, dict):
                raise ConfigError("config file must hold a JSON object")

        corpus = raw.get("corpus", {}) or {}
        embedding = raw.get("embedding", {}) or {}
        cfg = cls(
            corpus_path=corpus.get("path"),
            corpus_format=corpus.get("format", "jsonl"),
            text_field=corpus.get("text_field", "text"),
            vocab=raw.get("vocab"),
            static_table=embedding.get("static_table"),
            remote_url=embedding.get("remote_url"),
            remote_timeout=embedding.get("timeout", 10.0),
            remote_max_retries=embedding.get("max_retries", 3),
            extraction=dict(raw.get("extraction", {}) or {}),
            masking=dict(raw.get("masking", {}) or {}),
            output_dir=raw.get("output_dir", "."),
        )

        def override(attr: str, flag: str):
            value = getattr(args, flag, None)
            if value is not None:
                setattr(cfg, attr, value)

        override("corpus_path", "corpus")
        override("corpus_format", "format")
        override("text_field", "text_field")
        override("vocab", "vocab")
        override("static_table", "static_table")
        override("remote_url", "remote_url")
        override("remote_timeout", "timeout")
        override("remote_max_retries", "max_retries")
        override("output_dir", "output_dir")
        for key in ("top_k", "diversity", "min_word_len", "stopwords"):
            value = getattr(args, key, None)
            if value is not None:
                cfg.extraction[key] = value
        for key in ("mode", "select_prob", "seed", "max_len"):
            value = getattr(args, key, None)
            if value is not None:
                cfg.masking[key] = value

        if cfg.static_table is not None and cfg.remote_url is not None:
            raise ConfigError("exactly one embedding backend may be configured, got both")
        return cfg

    def out_dir(self) -> Path:
        path = Path(self.output_dir)
        try:
            path.mkdir(parents=True, exist_ok=True)
        except OSError as exc:
            raise ConfigError(f"output directory {path} is not writable: {exc}")
        return path

    def require_corpus(self):
        if not self.corpus_path:
            raise ConfigError("no corpus configured (corpus.path or --corpus)")
        return load_corpus(self.corpus_path, format=self.corpus_format, text_field=self.text_field)

    def require_vocab(self) -> Vocabulary:
        if not self.vocab:
            raise ConfigError("no vocabulary configured (vocab or --vocab)")
        return Vocabulary.from_file(self.vocab)

    def require_provider(self) -> EmbeddingProvider:
        if self.static_table is not None:
            return StaticTableProvider.from_file(self.static_table)
        if self.remote_url is not None:
            return RemoteEmbeddingProvider(
                self.remote_url,
                timeout=self.remote_timeout,
                max_retries=self.remote_max_retries,
            )
        raise ConfigError("no embedding backend configured (embedding.static_table or embedding.remote_url)")

    def extraction_params(self) -> ExtractionParams:
        opts = dict(self.extraction)
        stopwords_path = opts.pop("stopwords", None)
        stopword_set = load_stopwords(stopwords_path) if stopwords_path else load_default_stopwords()
        unknown = set(opts) - {"top_k", "diversity", "min_word_len"}
        if unknown:
            raise ConfigError(f"unknown extraction options: {sorted(unknown)}")
        return ExtractionParams(stopword_set=stopword_set, **opts)

    def masking_config(self) -> MaskingConfig:
        opts = dict(self.masking)
        unknown = set(opts) - {"mode", "select_prob", "seed", "max_len", "mask_rate", "random_rate", "keep_rate"}
        if unknown:
            raise ConfigError(f"unknown masking options: {sorted(unknown)}")
        try:
            return MaskingConfig(**opts)
        except ValueError as exc:
            raise ConfigError(str(exc))


def _emit(payload: dict) -> None:
    print(json.dumps(payload, ensure_ascii=False))


def cmd_extract(args: argparse.Namespace) -> int:
    cfg = PipelineConfig.build(args)
    provider = cfg.require_provider()
    params = cfg.extraction_params()
    corpus = cfg.require_corpus()
    out_path = Path(args.out) if args.out else cfg.out_dir() / "keywords_by_doc.jsonl"
    threads = args.threads

    def one(doc: Document) -> str:
        keywords = extract_document_keywords(doc, provider, params)
        return json.dumps({"doc_id": doc.id, "keywords": keywords}, separators=(",", ":"), ensure_ascii=False)

    documents = 0
    started = time.perf_counter()
    with open(out_path, "w", encoding="utf-8", newline="\n") as f:
        if threads <= 1:
            for doc in corpus:
                f.write(one(doc) + "\n")
                documents += 1
        else:
            with ThreadPoolExecutor(max_workers=threads) as pool:
                for chunk in _chunks(corpus, 256):
                    for line in pool.map(one, chunk):  # ordered
                        f.write(line + "\n")
                        documents += 1
    elapsed = time.perf_counter() - started
    _emit({"documents": documents, "extraction_seconds": round(elapsed, 3), "out": str(out_path)})
    return 0


def _read_keywords_by_doc(path: str | Path) -> KeywordHistogram:
    from .errors import CorpusFormatError

    per_doc = []
    with open(path, encoding="utf-8") as f:
        for lineno, line in enumerate(f, start=1):
            if not line.strip():
                continue
            try:
                record = json.loads(line)
            except json.JSONDecodeError as exc:
                raise CorpusFormatError(f"invalid JSON: {exc.msg}", path=path, line=lineno)
            if not isinstance(record, dict) or "keywords" not in record:
                raise CorpusFormatError('expected {"doc_id", "keywords"} object', path=path, line=lineno)
            keywords = record["keywords"]
            if not isinstance(keywords, list) or not all(isinstance(k, str) for k in keywords):
                raise CorpusFormatError('"keywords" must be a list of strings', path=path, line=lineno)
            per_doc.append(keywords)
    return build_histogram(per_doc)


def cmd_filter(args: argparse.Namespace) -> int:
    if (args.min_count is None) == (not args.auto):
        raise ConfigError("pass exactly one of --min-count or --auto")
    hist = _read_keywords_by_doc(args.keywords_file)
    out_dir = Path(args.output_dir or ".")
    out_dir.mkdir(parents=True, exist_ok=True)

    curve_path = out_dir / "freq_curve.csv"
    write_freq_curve(hist, curve_path, last_n=args.last_n)

    payload: dict = {
        "distinct_keywords": len(hist.counts),
        "total_documents": hist.total_documents,
        "freq_curve": str(curve_path),
    }
    files = []
    if args.auto:
        if not hist.counts:
            raise ConfigError("cannot pick a threshold from an empty keyword histogram")
        cands = knee_candidates(hist)
        for value in cands.values:
            kw = apply_min_count(hist, value)
            path = out_dir / f"keywords.min{value}.tsv"
            write_keyword_list(kw, path)
            files.append({"min_count": value, "kept": len(kw.surfaces), "path": str(path)})
        payload.update(
            {
                "threshold_candidates": cands.values,
                "threshold_center": cands.center,
                "degenerate_spectrum": cands.degenerate,
            }
        )
    else:
        kw = apply_min_count(hist, args.min_count)
        path = out_dir / f"keywords.min{args.min_count}.tsv"
        write_keyword_list(kw, path)
        files.append({"min_count": args.min_count, "kept": len(kw.surfaces), "path": str(path)})
    payload["keyword_lists"] = files
    _emit(payload)
    return 0


def cmd_mask(args: argparse.Namespace) -> int:
    cfg = PipelineConfig.build(args)
    if args.random:
        if args.mode == "keyword":
            raise ConfigError("--random conflicts with --mode keyword")
        cfg.masking["mode"] = "random"
    mask_cfg = cfg.masking_config()
    vocab = cfg.require_vocab()
    corpus = cfg.require_corpus()

    keywords = None
    if mask_cfg.mode == "keyword":
        if not args.keyword_list:
            raise ConfigError("keyword mode requires --keyword-list (or pass --random)")
        keywords = read_keyword_list(args.keyword_list)
    elif args.keyword_list:
        raise ConfigError("--keyword-list conflicts with random mode")

    out_path = Path(args.out) if args.out else cfg.out_dir() / "dataset.jsonl"
    sidecar = Path(args.sidecar) if args.sidecar else out_path.with_name(out_path.stem + ".meta.json")
    summary = emit_dataset(
        corpus,
        vocab,
        keywords,
        mask_cfg,
        out_path,
        sidecar_path=sidecar,
        vocab_file=cfg.vocab,
        threads=args.threads,
    )
    payload = summary.as_dict()
    payload["out"] = str(out_path)
    payload["sidecar"] = str(sidecar)
    _emit(payload)
    return 0


def cmd_stats_bootstrap(args: argparse.Namespace) -> int:
    a = load_predictions(args.a)
    b = load_predictions(args.b)
    result = paired_bootstrap(
        a, b, metric=args.metric, n_resamples=args.n, seed=args.seed, threads=args.threads
    )
    payload = result.as_dict()
    if args.out:
        with open(args.out, "w", encoding="utf-8", newline="\n") as f:
            json.dump(payload, f, indent=2)
            f.write("\n")
        payload["out"] = args.out
    _emit(payload)
    return 0


def cmd_stats_kappa(args: argparse.Namespace) -> int:
    ratings_a, ratings_b = load_ratings(args.ratings)
    categories = args.categories.split(",") if args.categories else None
    result = cohens_kappa(ratings_a, ratings_b, categories=categories)
    payload = result.as_dict()
    if args.out:
        with open(args.out, "w", encoding="utf-8", newline="\n") as f:
            json.dump(payload, f, indent=2)
            f.write("\n")
        payload["out"] = args.out
    _emit(payload)
    return 0


def cmd_report(args: argparse.Namespace) -> int:
    from .errors import CorpusFormatError

    in_path = Path(args.freq_curve)
    out_path = Path(args.out) if args.out else in_path.with_name("freq_curve_annotated.csv")
    rows = []
    with open(in_path, encoding="utf-8", newline="") as f:
        reader = csv.reader(f)
        header = next(reader, None)
        if header != ["rank", "surface", "count"]:
            raise CorpusFormatError(
                f"expected header rank,surface,count; got {header}", path=in_path, line=1
            )
        for lineno, row in enumerate(reader, start=2):
            if len(row) != 3:
                raise CorpusFormatError(f"expected 3 columns, got {len(row)}", path=in_path, line=lineno)
            try:
                count = int(row[2])
            except ValueError:
                raise CorpusFormatError(f"count is not an integer: {row[2]!r}", path=in_path, line=lineno)
            rows.append((row[0], row[1], count))
    with open(out_path, "w", encoding="utf-8", newline="") as f:
        writer = csv.writer(f, lineterminator="\n")
        writer.writerow(["rank", "surface", "count", "kept"])
        for rank, surface, count in rows:
            writer.writerow([rank, surface, count, int(count >= args.min_count)])
    _emit({"rows": len(rows), "min_count": args.min_count, "out": str(out_path)})
    return 0


class _Parser(argparse.ArgumentParser):
    """argparse that reports usage problems the same way runtime errors are
    reported: single-line JSON on stderr, non-zero exit."""

    def error(self, message: str):
        print(json.dumps({"error": "UsageError", "message": message}), file=sys.stderr)
        raise SystemExit(2)


def _add_config_flags(p: argparse.ArgumentParser, *, embedding: bool, masking: bool):
    p.add_argument("--config", help="JSON config file; flags override its values")
    p.add_argument("--corpus", help="corpus file path")
    p.add_argument("--format", choices=["jsonl", "csv"], help="corpus format")
    p.add_argument("--text-field", dest="text_field", help="field/column holding the document text")
    p.add_argument("--output-dir", dest="output_dir", help="directory for default output files")
    if embedding:
        p.add_argument("--static-table", dest="static_table", help="static embedding table file")
        p.add_argument("--remote-url", dest="remote_url", help="remote embedding service base URL")
        p.add_argument("--timeout", type=float, help="remote request timeout in seconds")
        p.add_argument("--max-retries", dest="max_retries", type=int, help="remote retry budget")
        p.add_argument("--top-k", dest="top_k", type=int, help="max keywords per document")
        p.add_argument("--diversity", type=float, help="MMR diversity weight in [0,1]")
        p.add_argument("--min-word-len", dest="min_word_len", type=int, help="min candidate length")
        p.add_argument("--stopwords", help="stopword file overriding the built-in list")
    if masking:
        p.add_argument("--vocab", help="vocabulary file, one token per line")
        p.add_argument("--mode", choices=["keyword", "random"], help="masking mode")
        p.add_argument("--select-prob", dest="select_prob", type=float, help="per-word selection probability")
        p.add_argument("--seed", type=int, help="masking seed")
        p.add_argument("--max-len", dest="max_len", type=int, help="max sequence length")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="keymask", description="Corpus keyword-masking pipeline.")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("extract", help="extract keywords per document")
    _add_config_flags(p, embedding=True, masking=False)
    p.add_argument("--out", help="output JSONL path (default: <output-dir>/keywords_by_doc.jsonl)")
    p.add_argument("--threads", type=int, default=_default_threads(), help="worker threads")
    p.set_defaults(func=cmd_extract)

    p = sub.add_parser("filter", help="build the keyword list from per-document keywords")
    p.add_argument("--keywords-file", dest="keywords_file", required=True, help="extract output JSONL")
    p.add_argument("--min-count", dest="min_count", type=int, help="explicit cut-off")
    p.add_argument("--auto", action="store_true", help="propose three cut-offs from the count spectrum")
    p.add_argument("--last-n", dest="last_n", type=int, default=50, help="frequency-curve tail length")
    p.add_argument("--output-dir", dest="output_dir", help="directory for output files")
    p.set_defaults(func=cmd_filter)

    p = sub.add_parser("mask", help="emit a masked dataset")
    _add_config_flags(p, embedding=False, masking=True)
    p.add_argument("--keyword-list", dest="keyword_list", help="keyword TSV from the filter step")
    p.add_argument("--random", action="store_true", help="random-word masking baseline")
    p.add_argument("--out", help="dataset JSONL path (default: <output-dir>/dataset.jsonl)")
    p.add_argument("--sidecar", help="sidecar metadata path (default: alongside --out)")
    p.add_argument("--threads", type=int, default=_default_threads(), help="worker threads")
    p.set_defaults(func=cmd_mask)

    p = sub.add_parser("stats", help="evaluation statistics")
    stats_sub = p.add_subparsers(dest="stats_command", required=True, parser_class=_Parser)

    pb = stats_sub.add_parser("bootstrap", help="paired bootstrap significance test")
    pb.add_argument("--a", required=True, help="predictions CSV for system a (doc_id,gold,pred)")
    pb.add_argument("--b", required=True, help="predictions CSV for system b")
    pb.add_argument("--metric", choices=["accuracy", "f1"], default="accuracy")
    pb.add_argument("--n", type=int, default=1000, help="number of resamples")
    pb.add_argument("--seed", type=int, default=0)
    pb.add_argument("--threads", type=int, default=_default_threads())
    pb.add_argument("--out", help="also write the result JSON here")
    pb.set_defaults(func=cmd_stats_bootstrap)

    pk = stats_sub.add_parser("kappa", help="Cohen's kappa with agreement band")
    pk.add_argument("--ratings", required=True, help="ratings CSV (item_id,rater_a,rater_b)")
    pk.add_argument("--categories", help="comma-separated category set to validate against")
    pk.add_argument("--out", help="also write the result JSON here")
    pk.set_defaults(func=cmd_stats_kappa)

    p = sub.add_parser("report", help="annotate a frequency curve with the cut-off")
    p.add_argument("--freq-curve", dest="freq_curve", required=True, help="freq_curve.csv from filter")
    p.add_argument("--min-count", dest="min_count", type=int, required=True, help="cut-off to annotate")
    p.add_argument("--out", help="annotated CSV path (default: freq_curve_annotated.csv alongside input)")
    p.set_defaults(func=cmd_report)

    return parser


def main(argv=None) -> int:
    try:
        parser = build_parser()
        args = parser.parse_args(argv)
        return args.func(args)
    except SystemExit:
        raise
    except KeymaskError as exc:
        print(json.dumps({"error": type(exc).__name__, "message": str(exc)}), file=sys.stderr)
        return 1
    except Exception as exc:  # contract: every failure is single-line JSON on stderr
        print(json.dumps({"error": type(exc).__name__, "message": str(exc)}), file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
