"""End-to-end checks against the producer's actual CLI output.

Mirrors the PASS/FAIL line convention of the upstream test suite:
  1. wire-format round trip with exact count agreement
  2. all-ignored batch contributes zero loss terms
  3. toy pipeline under the runtime budget and seed-deterministic
"""

import json
import subprocess
import sys
import time
from functools import wraps

import torch

from trainer_harness.config import HarnessConfig
from trainer_harness.data import IGNORE_INDEX, load_masked_dataset
from trainer_harness.model import masked_lm_loss
from trainer_harness.run import run_toy_pipeline


def acceptance(name):
    def decorate(fn):
        @wraps(fn)
        def wrapper(*args, **kwargs):
            try:
                result = fn(*args, **kwargs)
            except BaseException:
                print(f"\nACCEPTANCE FAIL: {name}")
                raise
            print(f"\nACCEPTANCE PASS: {name}")
            return result

        return wrapper

    return decorate


@acceptance("wire round trip: loader totals equal the producer's emission summary")
def test_round_trip_counts(emitted):
    ds = load_masked_dataset(emitted["dataset"], emitted["sidecar"])
    summary = emitted["summary"]
    assert len(ds) == summary["documents"]
    assert ds.token_count == summary["tokens_total"]
    assert ds.label_count == summary["labels_total"]
    batch_labels = sum(
        int((b.labels != IGNORE_INDEX).sum()) for b in ds.batches(batch_size=16)
    )
    assert batch_labels == summary["labels_total"]  # padding adds no labels


@acceptance("all-ignored batch contributes zero loss terms")
def test_all_ignored_batch_zero_loss(emitted):
    ds = load_masked_dataset(emitted["dataset"], emitted["sidecar"])
    batch = next(ds.batches(batch_size=8))
    labels = torch.full_like(batch.labels, IGNORE_INDEX)
    torch.manual_seed(0)
    logits = torch.randn(*labels.shape, ds.vocab_size)
    assert masked_lm_loss(logits, labels).item() == 0.0


@acceptance("toy pipeline: runtime under 10 minutes, metrics seed-deterministic")
def test_toy_pipeline_runtime_and_determinism(emitted, tmp_path):
    def run(out_name):
        cfg = HarnessConfig(
            dataset=emitted["dataset"],
            sidecar=emitted["sidecar"],
            out_dir=tmp_path / out_name,
            seed=17,
        )
        return run_toy_pipeline(cfg)

    started = time.perf_counter()
    metrics = run("a")
    elapsed = time.perf_counter() - started
    assert elapsed < 600.0, f"pipeline took {elapsed:.0f}s"

    assert len(metrics["pretrain_loss_curve"]) == 2
    assert all(v > 0 for v in metrics["pretrain_loss_curve"])
    assert 0.0 <= metrics["finetune_accuracy"] <= 1.0
    assert 0.0 <= metrics["finetune_f1"] <= 1.0

    run("b")
    first = (tmp_path / "a" / "metrics.json").read_bytes()
    second = (tmp_path / "b" / "metrics.json").read_bytes()
    assert first == second

    # the predictions file feeds straight into the producer's stats command
    proc = subprocess.run(
        [
            sys.executable,
            "-m",
            "keymask",
            "stats",
            "bootstrap",
            "--a",
            str(tmp_path / "a" / "predictions.csv"),
            "--b",
            str(tmp_path / "b" / "predictions.csv"),
            "--metric",
            "f1",
        ],
        capture_output=True,
        text=True,
        check=True,
    )
    assert json.loads(proc.stdout)["p_value"] == 1.0
