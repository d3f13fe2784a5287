#!/usr/bin/env python3
"""Generate a small synthetic corpus plus the files the pipeline needs.

Writes into --out-dir:
  corpus.jsonl      documents with id/text fields
  embeddings.txt    static word-vector table covering the content words
  vocab.txt         wordpiece vocabulary (specials first)
  config.json       ready-to-use pipeline config pointing at the above

The corpus mimics a narrow clinical domain: each document samples words
from one or two topic clusters, so extraction has real structure to find
and the frequency curve has an actual knee.
"""

import argparse
import json
import random
import sys
from pathlib import Path

import numpy as np

SPECIALS = ["[PAD]", "[UNK]", "[CLS]", "[SEP]", "[MASK]"]

TOPICS = {
    "cardio": ["cardiac", "arrhythmia", "stent", "angina", "ischemia", "valve"],
    "viro": ["virus", "antibody", "vaccines", "titer", "serology", "strain"],
    "neuro": ["seizure", "cortex", "lesion", "migraine", "synapse", "axon"],
    "renal": ["kidney", "dialysis", "creatinine", "nephron", "uremia", "filtrate"],
}

FUNCTION_WORDS = ["the", "of", "and", "in", "with", "was", "for", "on"]

# words the toy vocab splits into pieces, to exercise whole-word masking
PIECED = {
    "vaccines": ["vac", "##cine", "##s"],
    "arrhythmia": ["ar", "##rhythm", "##ia"],
    "creatinine": ["cre", "##ati", "##nine"],
}


def build_vocab_tokens():
    tokens = list(SPECIALS) + sorted(FUNCTION_WORDS)
    pieces = set()
    for word in sorted(w for topic in TOPICS.values() for w in topic):
        if word in PIECED:
            pieces.update(PIECED[word])
        else:
            pieces.add(word)
    return tokens + sorted(pieces)


def sample_document(rng, topic_names):
    k = rng.choice([1, 1, 2])  # most docs are single-topic
    chosen = rng.sample(topic_names, k)
    words = []
    for _ in range(rng.randint(8, 20)):
        if rng.random() < 0.35:
            words.append(rng.choice(FUNCTION_WORDS))
        else:
            words.append(rng.choice(TOPICS[rng.choice(chosen)]))
    return " ".join(words)


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--out-dir", required=True)
    ap.add_argument("--n-docs", type=int, default=200)
    ap.add_argument("--dim", type=int, default=16)
    ap.add_argument("--seed", type=int, default=13)
    args = ap.parse_args(argv)

    out = Path(args.out_dir)
    out.mkdir(parents=True, exist_ok=True)
    rng = random.Random(args.seed)
    vec_rng = np.random.default_rng(args.seed)

    topic_names = sorted(TOPICS)
    with open(out / "corpus.jsonl", "w", encoding="utf-8") as f:
        for i in range(args.n_docs):
            doc = {"id": f"toy-{i:04d}", "text": sample_document(rng, topic_names)}
            f.write(json.dumps(doc, ensure_ascii=False) + "\n")

    # cluster structure: topic centroid plus small per-word noise
    with open(out / "embeddings.txt", "w", encoding="utf-8") as f:
        for topic in topic_names:
            centroid = vec_rng.normal(size=args.dim)
            centroid /= np.linalg.norm(centroid)
            for word in TOPICS[topic]:
                vec = centroid + 0.25 * vec_rng.normal(size=args.dim)
                f.write(word + " " + " ".join(f"{v:.6f}" for v in vec) + "\n")

    with open(out / "vocab.txt", "w", encoding="utf-8") as f:
        f.write("\n".join(build_vocab_tokens()) + "\n")

    config = {
        "corpus": {"path": str(out / "corpus.jsonl"), "format": "jsonl"},
        "vocab": str(out / "vocab.txt"),
        "embedding": {"static_table": str(out / "embeddings.txt")},
        "extraction": {"top_k": 10, "diversity": 0.8},
        "masking": {"mode": "keyword", "select_prob": 0.75, "seed": args.seed},
    }
    with open(out / "config.json", "w", encoding="utf-8") as f:
        json.dump(config, f, indent=2)
        f.write("\n")

    print(f"wrote {args.n_docs} documents and supporting files under {out}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
