"""Shared fixtures: a dataset emitted by the upstream CLI, plus raw writers.

The emission runs `python3 -m keymask mask` in a subprocess so these tests
touch the producer only through its command line and output files.
"""

import json
import random
import subprocess
import sys

import pytest

SPECIALS = ["[PAD]", "[UNK]", "[CLS]", "[SEP]", "[MASK]"]
CONTENT = ["cardiac", "kidney", "seizure", "vaccine", "dialysis", "cortex", "stent"]
FILLER = ["the", "of", "and", "with"]
VOCAB_TOKENS = SPECIALS + sorted(FILLER) + sorted(CONTENT) + ["##itis", "card"]
KEYWORDS = ["cardiac", "kidney", "seizure", "vaccine"]


def write_dataset(path, records):
    with open(path, "w", encoding="utf-8") as f:
        for record in records:
            f.write(json.dumps(record, separators=(",", ":")) + "\n")
    return path


def write_sidecar(path, **overrides):
    payload = {
        "mode": "keyword",
        "select_prob": 0.75,
        "mask_rate": 0.8,
        "random_rate": 0.1,
        "keep_rate": 0.1,
        "seed": 0,
        "vocab_file": overrides.pop("vocab_file", "vocab.txt"),
        "scheduler_hint": "constant",
    }
    payload.update(overrides)
    with open(path, "w", encoding="utf-8") as f:
        json.dump(payload, f, indent=2)
    return path


def write_vocab(path, tokens=None):
    with open(path, "w", encoding="utf-8") as f:
        f.write("\n".join(tokens if tokens is not None else VOCAB_TOKENS) + "\n")
    return path


@pytest.fixture(scope="session")
def emitted(tmp_path_factory):
    """Run the producer CLI on a toy corpus; return paths plus its summary."""
    root = tmp_path_factory.mktemp("wire")
    rng = random.Random(4242)
    with open(root / "corpus.jsonl", "w", encoding="utf-8") as f:
        for i in range(80):
            words = rng.choices(CONTENT + FILLER, k=rng.randint(5, 14))
            f.write(json.dumps({"id": f"doc-{i:03d}", "text": " ".join(words)}) + "\n")
    vocab = write_vocab(root / "vocab.txt")
    with open(root / "keywords.tsv", "w", encoding="utf-8") as f:
        for word in KEYWORDS:
            f.write(f"{word}\t10\n")
    config = root / "config.json"
    config.write_text(
        json.dumps(
            {
                "corpus": {"path": str(root / "corpus.jsonl"), "format": "jsonl"},
                "vocab": str(vocab),
                "masking": {"mode": "keyword", "seed": 321},
            }
        ),
        encoding="utf-8",
    )
    proc = subprocess.run(
        [
            sys.executable,
            "-m",
            "keymask",
            "mask",
            "--config",
            str(config),
            "--keyword-list",
            str(root / "keywords.tsv"),
            "--output-dir",
            str(root),
        ],
        capture_output=True,
        text=True,
        check=True,
    )
    summary = json.loads(proc.stdout.strip().splitlines()[-1])
    return {
        "dataset": root / "dataset.jsonl",
        "sidecar": root / "dataset.meta.json",
        "vocab": vocab,
        "summary": summary,
    }
