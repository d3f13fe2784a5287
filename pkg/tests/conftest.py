import json

import numpy as np
import pytest

from keymask.corpus import SPECIAL_TOKENS, Vocabulary
from keymask.embeddings import StaticTableProvider

TOY_TOKENS = list(SPECIAL_TOKENS) + [
    "play",
    "##ing",
    "##ed",
    "run",
    "walk",
    "health",
    "public",
    "corona",
    "##virus",
    "vac",
    "##cine",
    "##s",
    "the",
    "and",
    "of",
    "covid",
    "19",
    "spreads",
    "mask",
    "##er",
]


@pytest.fixture
def toy_vocab() -> Vocabulary:
    return Vocabulary(TOY_TOKENS)


@pytest.fixture
def toy_vocab_file(tmp_path):
    path = tmp_path / "vocab.txt"
    path.write_text("\n".join(TOY_TOKENS) + "\n", encoding="utf-8")
    return path


def make_table(words: dict[str, list[float]]) -> StaticTableProvider:
    return StaticTableProvider({w: np.array(v, dtype=np.float64) for w, v in words.items()})


@pytest.fixture
def simple_provider() -> StaticTableProvider:
    # Four well-separated directions plus a document-axis vector.
    return make_table(
        {
            "alpha": [1.0, 0.0, 0.0, 0.0],
            "beta": [0.0, 1.0, 0.0, 0.0],
            "gamma": [0.0, 0.0, 1.0, 0.0],
            "delta": [0.0, 0.0, 0.0, 1.0],
            "mixed": [1.0, 1.0, 0.0, 0.0],
        }
    )


def write_jsonl(path, rows):
    with open(path, "w", encoding="utf-8") as f:
        for row in rows:
            f.write(json.dumps(row, ensure_ascii=False) + "\n")
    return path
