"""Evaluation statistics: accuracy, macro F1, paired bootstrap, Cohen's kappa.

Conventions that matter for cross-implementation comparisons:
  * macro F1 averages per-label F1 unweighted; a label with zero gold and
    zero predicted instances contributes F1 = 0 (the strictest convention,
    recorded in the JSON output as "zero_support_f1": 0.0).
  * the bootstrap p-value is one-sided with "delta <= 0 counts against
    system a", so identical systems score exactly 1.0.
"""

from __future__ import annotations

import csv
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from pathlib import Path
from typing import Callable, Sequence

import numpy as np

from .errors import CorpusFormatError
from .rng import substream

BOOTSTRAP_METRICS = ("accuracy", "f1")

AGREEMENT_BANDS = ("poor", "slight", "fair", "moderate", "substantial", "near_perfect")


@dataclass
class PredictionSet:
    doc_ids: list[str]
    gold: list[str]
    pred: list[str]

    def __post_init__(self):
        if not (len(self.doc_ids) == len(self.gold) == len(self.pred)):
            raise ValueError(
                "doc_ids, gold, and pred must be aligned: "
                f"{len(self.doc_ids)}/{len(self.gold)}/{len(self.pred)}"
            )

    def __len__(self) -> int:
        return len(self.doc_ids)


@dataclass
class BootstrapResult:
    p_value: float
    n_resamples: int
    metric_name: str
    observed_delta: float
    seed: int

    def as_dict(self) -> dict:
        return {
            "p_value": self.p_value,
            "n_resamples": self.n_resamples,
            "metric_name": self.metric_name,
            "observed_delta": self.observed_delta,
            "seed": self.seed,
            "hypothesis": "one_sided: delta <= 0 counts against system a",
            "zero_support_f1": 0.0,
        }


@dataclass
class KappaResult:
    kappa: float
    p_o: float
    p_e: float
    band: str

    def as_dict(self) -> dict:
        return {
            "kappa": self.kappa,
            "observed_agreement": self.p_o,
            "expected_agreement": self.p_e,
            "band": self.band,
        }


def load_predictions(path: str | Path) -> PredictionSet:
    """Read a predictions CSV with header doc_id,gold,pred."""
    path = Path(path)
    doc_ids, gold, pred = [], [], []
    with open(path, encoding="utf-8", newline="") as f:
        reader = csv.DictReader(f)
        required = {"doc_id", "gold", "pred"}
        if reader.fieldnames is None or not required.issubset(reader.fieldnames):
            raise CorpusFormatError(
                f"predictions file must have columns doc_id,gold,pred; got {reader.fieldnames}",
                path=path,
                line=1,
            )
        for row in reader:
            if row["doc_id"] is None or row["gold"] is None or row["pred"] is None:
                raise CorpusFormatError("short row", path=path, line=reader.line_num)
            doc_ids.append(row["doc_id"])
            gold.append(row["gold"])
            pred.append(row["pred"])
    if not doc_ids:
        raise CorpusFormatError("predictions file holds no rows", path=path)
    return PredictionSet(doc_ids=doc_ids, gold=gold, pred=pred)


def load_ratings(path: str | Path) -> tuple[list[str], list[str]]:
    """Read a two-rater CSV with header item_id,rater_a,rater_b."""
    path = Path(path)
    a, b = [], []
    with open(path, encoding="utf-8", newline="") as f:
        reader = csv.DictReader(f)
        required = {"item_id", "rater_a", "rater_b"}
        if reader.fieldnames is None or not required.issubset(reader.fieldnames):
            raise CorpusFormatError(
                f"ratings file must have columns item_id,rater_a,rater_b; got {reader.fieldnames}",
                path=path,
                line=1,
            )
        for row in reader:
            if row["rater_a"] is None or row["rater_b"] is None:
                raise CorpusFormatError("short row", path=path, line=reader.line_num)
            a.append(row["rater_a"])
            b.append(row["rater_b"])
    if not a:
        raise CorpusFormatError("ratings file holds no rows", path=path)
    return a, b


def accuracy(ps: PredictionSet) -> float:
    if len(ps) == 0:
        raise ValueError("accuracy of an empty prediction set is undefined")
    correct = sum(1 for g, p in zip(ps.gold, ps.pred) if g == p)
    return correct / len(ps)


def macro_f1(ps: PredictionSet, label_set: Sequence[str]) -> float:
    """Unweighted mean of per-label F1 over label_set.

    A label absent from both gold and pred contributes 0, which keeps the
    score comparable across runs that share a label set.
    """
    if len(ps) == 0:
        raise ValueError("macro F1 of an empty prediction set is undefined")
    labels = list(dict.fromkeys(label_set))
    if not labels:
        raise ValueError("label set must be non-empty")
    gold = np.asarray(ps.gold, dtype=object)
    pred = np.asarray(ps.pred, dtype=object)
    return _macro_f1_arrays(gold, pred, labels)


def _macro_f1_arrays(gold: np.ndarray, pred: np.ndarray, labels: Sequence[str]) -> float:
    total = 0.0
    for label in labels:
        tp = int(np.sum((pred == label) & (gold == label)))
        fp = int(np.sum((pred == label) & (gold != label)))
        fn = int(np.sum((pred != label) & (gold == label)))
        denom = 2 * tp + fp + fn
        total += (2 * tp / denom) if denom else 0.0
    return total / len(labels)


def _metric_fn(metric_name: str, labels: Sequence[str]) -> Callable[[np.ndarray, np.ndarray], float]:
    if metric_name == "accuracy":
        return lambda gold, pred: float(np.mean(gold == pred))
    if metric_name == "f1":
        return lambda gold, pred: _macro_f1_arrays(gold, pred, labels)
    raise ValueError(f"metric must be one of {BOOTSTRAP_METRICS}, got {metric_name!r}")


def paired_bootstrap(
    a: PredictionSet,
    b: PredictionSet,
    metric: str = "accuracy",
    n_resamples: int = 1000,
    seed: int = 0,
    threads: int = 1,
) -> BootstrapResult:
    """One-sided paired bootstrap test of system a against system b.

    Both sets must be aligned: same doc_ids, same gold labels, same order.
    Each resample draws len(a) document indices uniformly with replacement
    from its own (seed, resample index) random substream, so the p-value is
    identical for any thread count. delta = metric(a) - metric(b) on the
    resampled documents; p_value = fraction of resamples with delta <= 0.
    """
    if len(a) == 0:
        raise ValueError("cannot bootstrap empty prediction sets")
    if a.doc_ids != b.doc_ids or a.gold != b.gold:
        raise ValueError("prediction sets are not aligned on doc_ids and gold labels")
    if n_resamples < 1:
        raise ValueError(f"n_resamples must be positive, got {n_resamples}")

    # Label set for f1 is frozen over the full data before resampling, so
    # every resample is scored against the same averaging denominator.
    labels = sorted(set(a.gold) | set(a.pred) | set(b.pred))
    fn = _metric_fn(metric, labels)

    gold = np.asarray(a.gold, dtype=object)
    pred_a = np.asarray(a.pred, dtype=object)
    pred_b = np.asarray(b.pred, dtype=object)
    n = len(gold)
    observed = fn(gold, pred_a) - fn(gold, pred_b)

    def one_resample(i: int) -> bool:
        idx = substream(seed, "bootstrap", i).integers(0, n, size=n)
        delta = fn(gold[idx], pred_a[idx]) - fn(gold[idx], pred_b[idx])
        return delta <= 0.0

    if threads <= 1:
        against = sum(one_resample(i) for i in range(n_resamples))
    else:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            against = sum(pool.map(one_resample, range(n_resamples)))

    return BootstrapResult(
        p_value=against / n_resamples,
        n_resamples=n_resamples,
        metric_name=metric,
        observed_delta=observed,
        seed=seed,
    )


def cohens_kappa(
    ratings_a: Sequence[str],
    ratings_b: Sequence[str],
    categories: Sequence[str] | None = None,
) -> KappaResult:
    """Unweighted Cohen's kappa for two raters over a finite category set.

    When categories is given, any rating outside it is an error; otherwise
    the set is the union of observed ratings.
    """
    if len(ratings_a) != len(ratings_b):
        raise ValueError(f"rating lists differ in length: {len(ratings_a)} vs {len(ratings_b)}")
    if not ratings_a:
        raise ValueError("cannot compute kappa on zero items")
    if categories is not None:
        allowed = set(categories)
        for r in list(ratings_a) + list(ratings_b):
            if r not in allowed:
                raise ValueError(f"rating {r!r} is outside the category set {sorted(allowed)}")

    n = len(ratings_a)
    p_o = sum(1 for x, y in zip(ratings_a, ratings_b) if x == y) / n
    cats = sorted(set(ratings_a) | set(ratings_b))
    p_e = 0.0
    for c in cats:
        p_e += (sum(1 for x in ratings_a if x == c) / n) * (sum(1 for y in ratings_b if y == c) / n)

    if p_e >= 1.0:
        # Both raters gave one identical category throughout; agreement is
        # perfect by construction.
        kappa = 1.0
    else:
        kappa = (p_o - p_e) / (1.0 - p_e)
    return KappaResult(kappa=kappa, p_o=p_o, p_e=p_e, band=agreement_band(kappa))


def agreement_band(kappa: float) -> str:
    """Six-band agreement label for a kappa value.

    <0 poor; [0, 0.20] slight; (0.20, 0.40] fair; (0.40, 0.60] moderate;
    (0.60, 0.80] substantial; (0.80, 1] near_perfect.
    """
    if kappa > 1.0:
        raise ValueError(f"kappa cannot exceed 1, got {kappa}")
    if kappa < 0.0:
        return "poor"
    if kappa <= 0.20:
        return "slight"
    if kappa <= 0.40:
        return "fair"
    if kappa <= 0.60:
        return "moderate"
    if kappa <= 0.80:
        return "substantial"
    return "near_perfect"
