"""Whole-word masking collators and dataset emission.

Masking decisions are made per word and applied to all of that word's subword
tokens jointly: a selected word draws one action (mask / random-replace /
keep), and only the random action then draws per subword. Labels carry the
original token id at every subword position of a selected word and the ignore
marker -100 everywhere else, so unselected and special positions contribute
nothing to the downstream loss.

Every document's randomness is a Philox substream keyed by (seed, doc_id),
which makes emitted files byte-identical regardless of thread count or
processing order.
"""

from __future__ import annotations

import json
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from functools import lru_cache
from itertools import islice
from pathlib import Path
from typing import Iterable, Iterator, Sequence

import numpy as np

from .corpus import Document, TokenizedDocument, Vocabulary, tokenize_document
from .keyword_filter import KeywordList
from .rng import substream

IGNORE_LABEL = -100
KEYWORD_SELECT_PROB = 0.75
RANDOM_SELECT_PROB = 0.15

_EMIT_CHUNK = 1024  # documents mapped per worker-pool round; bounds memory


@dataclass
class MaskingConfig:
    mode: str = "keyword"  # "keyword" or "random"
    select_prob: float | None = None  # default 0.75 (keyword) / 0.15 (random)
    mask_rate: float = 0.8
    random_rate: float = 0.1
    keep_rate: float = 0.1
    seed: int = 0
    max_len: int = 512

    def __post_init__(self):
        if self.mode not in ("keyword", "random"):
            raise ValueError(f"mode must be 'keyword' or 'random', got {self.mode!r}")
        if self.select_prob is None:
            self.select_prob = KEYWORD_SELECT_PROB if self.mode == "keyword" else RANDOM_SELECT_PROB
        if not 0.0 < self.select_prob <= 1.0:
            raise ValueError(f"select_prob must lie in (0, 1], got {self.select_prob}")
        rates = (self.mask_rate, self.random_rate, self.keep_rate)
        if any(r < 0 for r in rates):
            raise ValueError(f"action rates must be non-negative, got {rates}")
        if abs(sum(rates) - 1.0) > 1e-12:
            raise ValueError(f"mask_rate + random_rate + keep_rate must equal 1, got {sum(rates)}")
        if self.max_len < 2:
            raise ValueError(f"max_len must be >= 2, got {self.max_len}")
        self.seed = int(self.seed) & 0xFFFFFFFFFFFFFFFF

    def scheduler_hint(self) -> str:
        # Trainer-side learning-rate schedule recorded for the dataset consumer:
        # constant alongside the high-probability keyword collator, linear for
        # the standard random baseline.
        return "constant" if self.mode == "keyword" else "linear"


@dataclass
class MaskedExample:
    doc_id: str
    input_ids: list[int]
    labels: list[int]


@dataclass
class EmissionSummary:
    documents: int = 0
    tokens_total: int = 0
    words_eligible: int = 0
    words_selected: int = 0
    labels_total: int = 0
    actions: dict[str, int] = field(default_factory=lambda: {"mask": 0, "random": 0, "keep": 0})

    def as_dict(self) -> dict:
        return {
            "documents": self.documents,
            "tokens_total": self.tokens_total,
            "words_eligible": self.words_eligible,
            "words_selected": self.words_selected,
            "labels_total": self.labels_total,
            "actions": dict(self.actions),
        }


def find_keyword_words(tdoc: TokenizedDocument, keywords: KeywordList | set[str]) -> list[int]:
    """Indices of words whose surface is in the keyword set (exact lowercase
    match, no stemming), ascending, one entry per occurrence."""
    surfaces = keywords.surfaces if isinstance(keywords, KeywordList) else keywords
    return [i for i, span in enumerate(tdoc.words) if span.surface in surfaces]


@lru_cache(maxsize=8)
def _replacement_ids(vocab: Vocabulary) -> np.ndarray:
    """Vocabulary ids eligible as random replacements: everything non-special."""
    return np.array(sorted(set(range(len(vocab))) - set(vocab.special_ids)), dtype=np.int64)


def _apply_mask(
    tdoc: TokenizedDocument,
    eligible_words: Sequence[int],
    cfg: MaskingConfig,
    vocab: Vocabulary,
) -> tuple[MaskedExample, list[tuple[int, str]]]:
    """Collator core; also returns (word index, action) per selected word so
    summaries count the draws themselves, not a lossy reconstruction (random
    replacement can coincidentally reproduce the original ids)."""
    n_words = len(tdoc.words)
    for w in eligible_words:
        if not 0 <= w < n_words:
            raise IndexError(f"eligible word index {w} out of range for {n_words} words")
    input_ids = list(tdoc.input_ids)
    labels = [IGNORE_LABEL] * len(input_ids)
    rng = substream(cfg.seed, tdoc.doc_id)
    replacements = _replacement_ids(vocab)
    decisions: list[tuple[int, str]] = []
    for w in sorted(eligible_words):
        if rng.random() >= cfg.select_prob:
            continue
        start, end = tdoc.word_token_ranges[w]
        labels[start:end] = tdoc.input_ids[start:end]
        action = rng.random()
        if action < cfg.mask_rate:
            input_ids[start:end] = [vocab.mask_id] * (end - start)
            decisions.append((w, "mask"))
        elif action < cfg.mask_rate + cfg.random_rate:
            picks = rng.integers(0, len(replacements), size=end - start)
            input_ids[start:end] = [int(replacements[p]) for p in picks]
            decisions.append((w, "random"))
        else:
            decisions.append((w, "keep"))
    example = MaskedExample(doc_id=tdoc.doc_id, input_ids=input_ids, labels=labels)
    return example, decisions


def mask_example(
    tdoc: TokenizedDocument,
    eligible_words: Sequence[int],
    cfg: MaskingConfig,
    vocab: Vocabulary,
) -> MaskedExample:
    """Apply the collator to one tokenized document.

    Per eligible word, in ascending index order, one Bernoulli(select_prob)
    draw decides selection; a selected word draws its action once:
    mask_rate -> all subwords become the mask token, random_rate -> each
    subword is independently replaced by a uniform non-special vocabulary id,
    keep_rate -> subwords stay. Labels at all subword positions of selected
    words hold the original ids; every other position is -100.
    """
    example, _ = _apply_mask(tdoc, eligible_words, cfg, vocab)
    return example


def _mask_document(
    doc: Document,
    vocab: Vocabulary,
    keywords: KeywordList | set[str] | None,
    cfg: MaskingConfig,
) -> tuple[str, int, int, int, int, dict[str, int]]:
    """Worker: mask one document, return its JSONL line plus exact tallies."""
    tdoc = tokenize_document(doc, vocab, cfg.max_len)
    if cfg.mode == "keyword":
        eligible = find_keyword_words(tdoc, keywords)
    else:
        eligible = list(range(len(tdoc.words)))
    example, decisions = _apply_mask(tdoc, eligible, cfg, vocab)

    actions = {"mask": 0, "random": 0, "keep": 0}
    labels_total = 0
    for w, action in decisions:
        start, end = tdoc.word_token_ranges[w]
        labels_total += end - start
        actions[action] += 1
    line = json.dumps(
        {"doc_id": example.doc_id, "input_ids": example.input_ids, "labels": example.labels},
        separators=(",", ":"),
        ensure_ascii=False,
    )
    return line, len(example.input_ids), len(eligible), len(decisions), labels_total, actions


def _chunks(iterable: Iterable, size: int) -> Iterator[list]:
    it = iter(iterable)
    while chunk := list(islice(it, size)):
        yield chunk


def emit_dataset(
    corpus: Iterable[Document],
    vocab: Vocabulary,
    keywords: KeywordList | set[str] | None,
    cfg: MaskingConfig,
    out_path: str | Path,
    sidecar_path: str | Path | None = None,
    vocab_file: str | None = None,
    threads: int = 1,
) -> EmissionSummary:
    """Materialize one masked epoch as JSONL, one line per document in corpus
    order, plus a sidecar metadata JSON for the consumer.

    Documents with zero eligible words are still emitted (all labels -100) so
    corpus alignment is preserved. Masking may run across threads; the output
    is byte-identical for any thread count because each document's randomness
    derives only from (seed, doc_id) and lines are written in corpus order.
    """
    if cfg.mode == "keyword" and keywords is None:
        raise ValueError("keyword mode requires a keyword list")
    if cfg.mode == "random" and keywords is not None:
        raise ValueError("random mode does not take a keyword list")
    out_path = Path(out_path)
    if sidecar_path is None:
        sidecar_path = out_path.with_name(out_path.stem + ".meta.json")

    summary = EmissionSummary()

    def tally(result):
        line, n_tokens, n_eligible, n_selected, n_labels, actions = result
        summary.documents += 1
        summary.tokens_total += n_tokens
        summary.words_eligible += n_eligible
        summary.words_selected += n_selected
        summary.labels_total += n_labels
        for k, v in actions.items():
            summary.actions[k] += v
        return line

    with open(out_path, "w", encoding="utf-8", newline="\n") as f:
        if threads <= 1:
            for doc in corpus:
                f.write(tally(_mask_document(doc, vocab, keywords, cfg)) + "\n")
        else:
            with ThreadPoolExecutor(max_workers=threads) as pool:
                for chunk in _chunks(corpus, _EMIT_CHUNK):
                    results = pool.map(lambda d: _mask_document(d, vocab, keywords, cfg), chunk)
                    for result in results:  # map preserves corpus order
                        f.write(tally(result) + "\n")

    metadata = {
        "mode": cfg.mode,
        "select_prob": cfg.select_prob,
        "mask_rate": cfg.mask_rate,
        "random_rate": cfg.random_rate,
        "keep_rate": cfg.keep_rate,
        "seed": cfg.seed,
        "vocab_file": vocab_file if vocab_file is not None else (vocab.path or ""),
        "scheduler_hint": cfg.scheduler_hint(),
    }
    with open(sidecar_path, "w", encoding="utf-8", newline="\n") as f:
        json.dump(metadata, f, indent=2)
        f.write("\n")
    return summary
