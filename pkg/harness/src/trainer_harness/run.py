"""Toy pipeline: MLM continuation on an emitted dataset, then fine-tuning.

The fine-tuning task is synthetic on purpose: sequences drawn from the
same vocabulary, labeled "pos" when a marker token is present. It exists
to prove the encoder and the wire format survive a full train/eval loop,
not to demonstrate any effect; nothing here compares masking modes.

Outputs under --out-dir:
  metrics.json       {"pretrain_loss_curve", "finetune_accuracy", "finetune_f1"}
  predictions.csv    doc_id,gold,pred rows for the synthetic test split
"""

import argparse
import csv
import json
import sys
from collections import Counter
from pathlib import Path

import numpy as np
import torch

from .config import HarnessConfig
from .data import load_masked_dataset
from .model import (
    MLMModel,
    SequenceClassifier,
    TinyEncoder,
    make_scheduler,
    masked_lm_loss,
)

CLASS_NAMES = ("neg", "pos")
SEQ_LEN = 12
N_TRAIN = 192
N_TEST = 64


def accuracy(gold, pred):
    return sum(g == p for g, p in zip(gold, pred)) / len(gold)


def macro_f1(gold, pred):
    labels = sorted(set(gold) | set(pred))
    tp, fp, fn = Counter(), Counter(), Counter()
    for g, p in zip(gold, pred):
        if g == p:
            tp[g] += 1
        else:
            fp[p] += 1
            fn[g] += 1
    scores = []
    for label in labels:
        denom = 2 * tp[label] + fp[label] + fn[label]
        scores.append(2 * tp[label] / denom if denom else 0.0)
    return sum(scores) / len(scores)


def make_synthetic_task(vocab_size, pad_id, seed):
    """Balanced marker-detection data: label pos iff the marker id occurs."""
    rng = np.random.default_rng([seed, 9091])
    candidates = [i for i in range(vocab_size) if i != pad_id]
    marker = int(rng.choice(candidates))
    background = [i for i in candidates if i != marker]

    def sample_split(n):
        ids = torch.empty((n, SEQ_LEN), dtype=torch.long)
        labels = torch.empty(n, dtype=torch.long)
        for row in range(n):
            seq = rng.choice(background, size=SEQ_LEN)
            has_marker = row % 2 == 0
            if has_marker:
                seq[rng.integers(0, SEQ_LEN)] = marker
            ids[row] = torch.from_numpy(seq.astype(np.int64))
            labels[row] = int(has_marker)
        order = torch.from_numpy(rng.permutation(n))
        return ids[order], labels[order]

    return sample_split(N_TRAIN), sample_split(N_TEST)


def _pretrain(cfg, dataset, encoder):
    model = MLMModel(encoder, dataset.vocab_size)
    model.train()
    optimizer = torch.optim.AdamW(
        model.parameters(), lr=cfg.learning_rate, weight_decay=cfg.weight_decay
    )
    n_batches = max(1, -(-len(dataset) // cfg.batch_size))
    scheduler = make_scheduler(
        optimizer, dataset.sidecar.scheduler_hint, cfg.epochs_pretrain * n_batches
    )
    curve = []
    for epoch in range(cfg.epochs_pretrain):
        total, count = 0.0, 0
        for batch in dataset.batches(cfg.batch_size, shuffle_seed=(cfg.seed, epoch)):
            optimizer.zero_grad()
            logits = model(batch.input_ids, batch.attention_mask)
            loss = masked_lm_loss(logits, batch.labels)
            loss.backward()
            optimizer.step()
            scheduler.step()
            total += loss.detach().item()
            count += 1
        curve.append(total / max(count, 1))
    return curve


def _finetune(cfg, dataset, encoder):
    (train_ids, train_labels), (test_ids, test_labels) = make_synthetic_task(
        dataset.vocab_size, dataset.pad_id, cfg.seed
    )
    model = SequenceClassifier(encoder, len(CLASS_NAMES))
    optimizer = torch.optim.AdamW(
        model.parameters(), lr=cfg.learning_rate, weight_decay=cfg.weight_decay
    )
    full_mask = torch.ones_like(train_ids, dtype=torch.bool)
    model.train()
    for _ in range(cfg.epochs_finetune):
        for start in range(0, len(train_ids), cfg.batch_size):
            stop = start + cfg.batch_size
            optimizer.zero_grad()
            logits = model(train_ids[start:stop], full_mask[start:stop])
            loss = torch.nn.functional.cross_entropy(logits, train_labels[start:stop])
            loss.backward()
            optimizer.step()

    model.eval()
    with torch.no_grad():
        logits = model(test_ids, torch.ones_like(test_ids, dtype=torch.bool))
        predicted = logits.argmax(dim=-1)
    gold = [CLASS_NAMES[int(v)] for v in test_labels]
    pred = [CLASS_NAMES[int(v)] for v in predicted]
    return gold, pred


def run_toy_pipeline(cfg: HarnessConfig) -> dict:
    torch.manual_seed(cfg.seed)
    torch.set_num_threads(1)

    dataset = load_masked_dataset(cfg.dataset, cfg.sidecar)
    encoder = TinyEncoder(
        dataset.vocab_size,
        hidden_size=cfg.hidden_size,
        num_layers=cfg.num_layers,
        num_heads=cfg.num_heads,
        max_positions=cfg.max_positions,
    )
    curve = _pretrain(cfg, dataset, encoder)
    gold, pred = _finetune(cfg, dataset, encoder)

    metrics = {
        "pretrain_loss_curve": curve,
        "finetune_accuracy": accuracy(gold, pred),
        "finetune_f1": macro_f1(gold, pred),
    }
    cfg.out_dir.mkdir(parents=True, exist_ok=True)
    with open(cfg.out_dir / "metrics.json", "w", encoding="utf-8") as f:
        json.dump(metrics, f, indent=2)
        f.write("\n")
    with open(cfg.out_dir / "predictions.csv", "w", encoding="utf-8", newline="") as f:
        writer = csv.writer(f, lineterminator="\n")
        writer.writerow(["doc_id", "gold", "pred"])
        for i, (g, p) in enumerate(zip(gold, pred)):
            writer.writerow([f"synthetic-{i:04d}", g, p])
    return metrics


def main(argv=None) -> int:
    ap = argparse.ArgumentParser(description="Toy MLM continuation + fine-tuning run")
    ap.add_argument("--dataset", required=True, help="masked dataset JSONL")
    ap.add_argument("--sidecar", required=True, help="sidecar metadata JSON")
    ap.add_argument("--out-dir", default=".")
    ap.add_argument("--seed", type=int, default=0)
    ap.add_argument("--epochs-pretrain", type=int, default=2)
    ap.add_argument("--epochs-finetune", type=int, default=4)
    ap.add_argument("--batch-size", type=int, default=16)
    ap.add_argument("--learning-rate", type=float, default=2e-5)
    ap.add_argument("--weight-decay", type=float, default=0.01)
    args = ap.parse_args(argv)
    try:
        cfg = HarnessConfig(
            dataset=args.dataset,
            sidecar=args.sidecar,
            out_dir=args.out_dir,
            seed=args.seed,
            epochs_pretrain=args.epochs_pretrain,
            epochs_finetune=args.epochs_finetune,
            batch_size=args.batch_size,
            learning_rate=args.learning_rate,
            weight_decay=args.weight_decay,
        )
        metrics = run_toy_pipeline(cfg)
    except Exception as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    print(json.dumps({"metrics": metrics, "out_dir": str(cfg.out_dir)}))
    return 0


if __name__ == "__main__":
    sys.exit(main())
