"""Reader for the masked-dataset wire format.

A dataset is JSONL, one record per document:

    {"doc_id": str, "input_ids": [int, ...], "labels": [int, ...]}

with equal-length id/label lists and -100 marking positions excluded
from the loss. A sidecar JSON next to it records the masking settings,
the vocabulary file, and a scheduler hint ("constant" or "linear").
Every schema complaint names the offending file and line.
"""

import json
from dataclasses import dataclass
from pathlib import Path

import numpy as np
import torch

IGNORE_INDEX = -100
PAD_TOKEN = "[PAD]"

SIDECAR_FIELDS = {
    "mode": str,
    "select_prob": (int, float),
    "mask_rate": (int, float),
    "random_rate": (int, float),
    "keep_rate": (int, float),
    "seed": int,
    "vocab_file": str,
    "scheduler_hint": str,
}
SCHEDULER_HINTS = ("constant", "linear")


class DatasetFormatError(ValueError):
    def __init__(self, message, path=None, line=None):
        self.path = str(path) if path is not None else None
        self.line = line
        prefix = ""
        if self.path is not None:
            prefix = self.path
            if line is not None:
                prefix += f": line {line}"
            prefix += ": "
        super().__init__(prefix + message)


@dataclass(frozen=True)
class Sidecar:
    mode: str
    select_prob: float
    mask_rate: float
    random_rate: float
    keep_rate: float
    seed: int
    vocab_file: str
    scheduler_hint: str

    @classmethod
    def from_file(cls, path: Path) -> "Sidecar":
        try:
            with open(path, encoding="utf-8") as f:
                raw = json.load(f)
        except json.JSONDecodeError as exc:
            raise DatasetFormatError(f"not valid JSON: {exc}", path=path) from exc
        if not isinstance(raw, dict):
            raise DatasetFormatError("sidecar must be a JSON object", path=path)
        values = {}
        for name, expected in SIDECAR_FIELDS.items():
            if name not in raw:
                raise DatasetFormatError(f"missing field {name!r}", path=path)
            value = raw[name]
            if not isinstance(value, expected) or isinstance(value, bool):
                raise DatasetFormatError(
                    f"field {name!r} has wrong type {type(value).__name__}", path=path
                )
            values[name] = value
        if values["scheduler_hint"] not in SCHEDULER_HINTS:
            raise DatasetFormatError(
                f"scheduler_hint must be one of {SCHEDULER_HINTS}, "
                f"got {values['scheduler_hint']!r}",
                path=path,
            )
        values["select_prob"] = float(values["select_prob"])
        for rate in ("mask_rate", "random_rate", "keep_rate"):
            values[rate] = float(values[rate])
        return cls(**values)


def read_vocab(path: Path) -> tuple[int, int]:
    """Return (vocab_size, pad_id) from a token-per-line vocabulary file."""
    tokens = []
    with open(path, encoding="utf-8") as f:
        for line in f:
            token = line.rstrip("\n")
            if token:
                tokens.append(token)
    if not tokens:
        raise DatasetFormatError("vocabulary file is empty", path=path)
    try:
        pad_id = tokens.index(PAD_TOKEN)
    except ValueError:
        raise DatasetFormatError(f"vocabulary has no {PAD_TOKEN} token", path=path) from None
    return len(tokens), pad_id


@dataclass(frozen=True)
class Example:
    doc_id: str
    input_ids: list[int]
    labels: list[int]


@dataclass(frozen=True)
class Batch:
    input_ids: torch.Tensor  # long [B, T]
    labels: torch.Tensor  # long [B, T], IGNORE_INDEX at padded positions
    attention_mask: torch.Tensor  # bool [B, T], True at real tokens


def _check_int_list(value, name, line, path, vocab_size, allow_ignore):
    if not isinstance(value, list):
        raise DatasetFormatError(f"{name} must be a list", path=path, line=line)
    for item in value:
        if not isinstance(item, int) or isinstance(item, bool):
            raise DatasetFormatError(
                f"{name} contains a non-integer value {item!r}", path=path, line=line
            )
        if allow_ignore and item == IGNORE_INDEX:
            continue
        if not 0 <= item < vocab_size:
            raise DatasetFormatError(
                f"{name} value {item} outside vocabulary of size {vocab_size}",
                path=path,
                line=line,
            )


class MaskedDataset:
    """Parsed dataset plus the totals needed to audit an emission."""

    def __init__(self, examples, sidecar, vocab_size, pad_id):
        self.examples = examples
        self.sidecar = sidecar
        self.vocab_size = vocab_size
        self.pad_id = pad_id
        self.token_count = sum(len(ex.input_ids) for ex in examples)
        self.label_count = sum(
            1 for ex in examples for lab in ex.labels if lab != IGNORE_INDEX
        )

    def __len__(self):
        return len(self.examples)

    def batches(self, batch_size: int, shuffle_seed=None):
        """Yield padded batches; a fixed shuffle_seed gives a fixed order."""
        order = np.arange(len(self.examples))
        if shuffle_seed is not None:
            order = np.random.default_rng(shuffle_seed).permutation(order)
        for start in range(0, len(order), batch_size):
            chunk = [self.examples[i] for i in order[start : start + batch_size]]
            width = max(len(ex.input_ids) for ex in chunk)
            ids = torch.full((len(chunk), width), self.pad_id, dtype=torch.long)
            labels = torch.full((len(chunk), width), IGNORE_INDEX, dtype=torch.long)
            mask = torch.zeros((len(chunk), width), dtype=torch.bool)
            for row, ex in enumerate(chunk):
                n = len(ex.input_ids)
                ids[row, :n] = torch.tensor(ex.input_ids, dtype=torch.long)
                labels[row, :n] = torch.tensor(ex.labels, dtype=torch.long)
                mask[row, :n] = True
            yield Batch(input_ids=ids, labels=labels, attention_mask=mask)


def _resolve_vocab_path(vocab_file: str, sidecar_path: Path) -> Path:
    candidate = Path(vocab_file)
    if candidate.is_file():
        return candidate
    sibling = sidecar_path.parent / vocab_file
    if sibling.is_file():
        return sibling
    raise DatasetFormatError(
        f"vocabulary file {vocab_file!r} not found (also tried {sibling})",
        path=sidecar_path,
    )


def load_masked_dataset(path, sidecar_path, vocab_path=None) -> MaskedDataset:
    path = Path(path)
    sidecar = Sidecar.from_file(Path(sidecar_path))
    if vocab_path is None:
        vocab_path = _resolve_vocab_path(sidecar.vocab_file, Path(sidecar_path))
    vocab_size, pad_id = read_vocab(Path(vocab_path))

    examples = []
    seen_ids = set()
    with open(path, encoding="utf-8") as f:
        for lineno, line in enumerate(f, start=1):
            if not line.strip():
                raise DatasetFormatError("blank line", path=path, line=lineno)
            try:
                record = json.loads(line)
            except json.JSONDecodeError as exc:
                raise DatasetFormatError(
                    f"not valid JSON: {exc.msg}", path=path, line=lineno
                ) from exc
            if not isinstance(record, dict):
                raise DatasetFormatError("record must be an object", path=path, line=lineno)
            for key in ("doc_id", "input_ids", "labels"):
                if key not in record:
                    raise DatasetFormatError(f"missing field {key!r}", path=path, line=lineno)
            doc_id = record["doc_id"]
            if not isinstance(doc_id, str) or not doc_id:
                raise DatasetFormatError(
                    "doc_id must be a non-empty string", path=path, line=lineno
                )
            if doc_id in seen_ids:
                raise DatasetFormatError(
                    f"duplicate doc_id {doc_id!r}", path=path, line=lineno
                )
            seen_ids.add(doc_id)
            _check_int_list(
                record["input_ids"], "input_ids", lineno, path, vocab_size, allow_ignore=False
            )
            _check_int_list(
                record["labels"], "labels", lineno, path, vocab_size, allow_ignore=True
            )
            if len(record["input_ids"]) != len(record["labels"]):
                raise DatasetFormatError(
                    f"input_ids has {len(record['input_ids'])} entries but labels has "
                    f"{len(record['labels'])}",
                    path=path,
                    line=lineno,
                )
            examples.append(
                Example(doc_id=doc_id, input_ids=record["input_ids"], labels=record["labels"])
            )
    return MaskedDataset(examples, sidecar, vocab_size, pad_id)
