"""Corpus loading, word segmentation, and subword tokenization.

Words are the masking unit, subword ids are the wire unit, so every document
keeps its word -> subword alignment all the way through the pipeline.
"""

from __future__ import annotations

import csv
import json
import re
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Iterator

from .errors import CorpusFormatError

# Maximal runs of letters/digits (unicode-aware); underscore counts as a boundary.
_WORD_RE = re.compile(r"[^\W_]+", re.UNICODE)

SPECIAL_TOKENS = ("[PAD]", "[UNK]", "[CLS]", "[SEP]", "[MASK]")
CONTINUATION_PREFIX = "##"


@dataclass(frozen=True)
class Document:
    id: str
    text: str


@dataclass
class WordSpan:
    """One word of a document: lowercased surface, offsets into the original
    text (code points), and the subword ids once tokenized."""

    surface: str
    start: int
    end: int
    token_ids: list[int] = field(default_factory=list)


class Vocabulary:
    """Token -> id map with the five special tokens resolved by name.

    Ids are dense and 0-based; subword continuation pieces carry the "##"
    prefix. Immutable after construction, safe to share across threads.
    """

    def __init__(self, tokens: Iterable[str], path: str | None = None):
        self.path = path
        self.stoi: dict[str, int] = {}
        self.itos: list[str] = []
        for i, token in enumerate(tokens):
            if token in self.stoi:
                raise CorpusFormatError(f"duplicate vocabulary token {token!r}", path, i + 1)
            self.stoi[token] = i
            self.itos.append(token)
        missing = [t for t in SPECIAL_TOKENS if t not in self.stoi]
        if missing:
            raise CorpusFormatError(f"vocabulary is missing special tokens {missing}", path)
        self.pad_id = self.stoi["[PAD]"]
        self.unk_id = self.stoi["[UNK]"]
        self.cls_id = self.stoi["[CLS]"]
        self.sep_id = self.stoi["[SEP]"]
        self.mask_id = self.stoi["[MASK]"]
        self.special_ids = frozenset(
            (self.pad_id, self.unk_id, self.cls_id, self.sep_id, self.mask_id)
        )

    def __len__(self) -> int:
        return len(self.itos)

    @classmethod
    def from_file(cls, path: str | Path) -> "Vocabulary":
        """Plain-text vocabulary: one token per line, id = 0-based line number."""
        with open(path, encoding="utf-8") as f:
            tokens = [line.rstrip("\n") for line in f]
        if tokens and tokens[-1] == "":
            tokens.pop()  # trailing newline, not an empty token
        if not tokens:
            raise CorpusFormatError("empty vocabulary file", str(path))
        return cls(tokens, path=str(path))


@dataclass
class TokenizedDocument:
    """cls + word subwords + sep, with per-word token positions retained."""

    doc_id: str
    input_ids: list[int]
    words: list[WordSpan]  # only the words kept after truncation
    word_token_ranges: list[tuple[int, int]]  # [start, end) into input_ids, per word


def load_corpus(path: str | Path, format: str = "jsonl", text_field: str = "text") -> Iterator[Document]:
    """Stream Documents from a JSONL or CSV file.

    Missing ids are synthesized as "<filename>:<line_number>" (1-based physical
    line). Duplicate explicit ids and malformed lines raise CorpusFormatError.
    """
    path = Path(path)
    if format == "jsonl":
        yield from _load_jsonl(path, text_field)
    elif format == "csv":
        yield from _load_csv(path, text_field)
    else:
        raise CorpusFormatError(f"unknown corpus format {format!r} (expected jsonl or csv)")


def _load_jsonl(path: Path, text_field: str) -> Iterator[Document]:
    seen_ids: set[str] = set()
    with open(path, encoding="utf-8") as f:
        for lineno, line in enumerate(f, start=1):
            if not line.strip():
                continue
            try:
                obj = json.loads(line)
            except json.JSONDecodeError as e:
                raise CorpusFormatError(f"invalid JSON ({e.msg})", path.name, lineno) from e
            if not isinstance(obj, dict):
                raise CorpusFormatError("line is not a JSON object", path.name, lineno)
            if text_field not in obj:
                raise CorpusFormatError(f"missing field {text_field!r}", path.name, lineno)
            text = obj[text_field]
            if not isinstance(text, str):
                raise CorpusFormatError(f"field {text_field!r} is not a string", path.name, lineno)
            doc_id = obj.get("id")
            if doc_id is not None:
                doc_id = str(doc_id)
                if doc_id in seen_ids:
                    raise CorpusFormatError(f"duplicate document id {doc_id!r}", path.name, lineno)
                seen_ids.add(doc_id)
            else:
                doc_id = f"{path.name}:{lineno}"
            yield Document(id=doc_id, text=text)


def _load_csv(path: Path, text_field: str) -> Iterator[Document]:
    seen_ids: set[str] = set()
    with open(path, encoding="utf-8", newline="") as f:
        reader = csv.DictReader(f)
        if reader.fieldnames is None or text_field not in reader.fieldnames:
            raise CorpusFormatError(
                f"text column {text_field!r} not found (columns: {reader.fieldnames})", path.name
            )
        has_id = "id" in reader.fieldnames
        for row in reader:
            lineno = reader.line_num
            text = row.get(text_field)
            if text is None:
                raise CorpusFormatError(f"row is missing column {text_field!r}", path.name, lineno)
            doc_id = row.get("id") if has_id else None
            if doc_id:
                if doc_id in seen_ids:
                    raise CorpusFormatError(f"duplicate document id {doc_id!r}", path.name, lineno)
                seen_ids.add(doc_id)
            else:
                doc_id = f"{path.name}:{lineno}"
            yield Document(id=doc_id, text=text)


def segment_words(text: str) -> list[WordSpan]:
    """Split text into lowercased words on whitespace/punctuation boundaries.

    Offsets index the original (uncased) text, so
    text[span.start:span.end].lower() == span.surface. Purely non-alphanumeric
    runs never match and are dropped. token_ids are left unfilled.
    """
    return [
        WordSpan(surface=m.group(0).lower(), start=m.start(), end=m.end())
        for m in _WORD_RE.finditer(text)
    ]


def tokenize_word(word: str, vocab: Vocabulary) -> list[int]:
    """Greedy longest-match-first subword split of one lowercased word.

    Pieces after the first must carry the continuation prefix. If at any step
    no vocabulary entry matches, the whole word maps to [unk_id].
    """
    ids: list[int] = []
    pos = 0
    n = len(word)
    while pos < n:
        end = n
        piece_id = None
        while end > pos:
            piece = word[pos:end]
            if pos > 0:
                piece = CONTINUATION_PREFIX + piece
            found = vocab.stoi.get(piece)
            if found is not None:
                piece_id = found
                break
            end -= 1
        if piece_id is None:
            return [vocab.unk_id]
        ids.append(piece_id)
        pos = end
    return ids


def tokenize_document(doc: Document, vocab: Vocabulary, max_len: int = 512) -> TokenizedDocument:
    """Tokenize a document to cls + subwords + sep, truncating at whole-word
    boundaries so len(input_ids) <= max_len. Words that do not fit entirely
    are dropped along with everything after them."""
    if max_len < 2:
        raise ValueError(f"max_len must be >= 2, got {max_len}")
    budget = max_len - 2
    input_ids = [vocab.cls_id]
    kept: list[WordSpan] = []
    ranges: list[tuple[int, int]] = []
    used = 0
    for span in segment_words(doc.text):
        token_ids = tokenize_word(span.surface, vocab)
        if used + len(token_ids) > budget:
            break
        span.token_ids = token_ids
        start = len(input_ids)
        input_ids.extend(token_ids)
        ranges.append((start, start + len(token_ids)))
        kept.append(span)
        used += len(token_ids)
    input_ids.append(vocab.sep_id)
    return TokenizedDocument(doc_id=doc.id, input_ids=input_ids, words=kept, word_token_ranges=ranges)
