"""Corpus-level keyword aggregation and noisy-keyword removal.

A word's "frequency" here is its detection count: the number of documents in
which extraction returned it as a keyword (at most one detection per document).
Low-count keywords are treated as noise and cut off; the cut-off can be given
explicitly or proposed automatically from the leap in the count spectrum.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Sequence

from collections import Counter

from .errors import CorpusFormatError


@dataclass
class KeywordHistogram:
    counts: dict[str, int] = field(default_factory=dict)
    total_documents: int = 0

    def descending(self) -> list[tuple[str, int]]:
        """(surface, count) sorted by descending count, then ascending surface."""
        return sorted(self.counts.items(), key=lambda kv: (-kv[1], kv[0]))


@dataclass
class KeywordList:
    surfaces: set[str]
    min_count: int
    histogram: KeywordHistogram


@dataclass
class ThresholdCandidates:
    """The proposed cut-off and its one-before/one-after neighborhood.

    Downstream validation picks among the candidates; `degenerate` flags a
    spectrum with no identifiable leap.
    """

    values: list[int]
    center: int
    degenerate: bool


def build_histogram(per_doc_keywords: Iterable[Sequence[str]]) -> KeywordHistogram:
    """counts[w] = number of documents whose keyword list contains w."""
    counts: Counter[str] = Counter()
    total = 0
    for keywords in per_doc_keywords:
        total += 1
        counts.update(set(keywords))  # at most one detection per document
    return KeywordHistogram(counts=dict(counts), total_documents=total)


def apply_min_count(hist: KeywordHistogram, min_count: int) -> KeywordList:
    """Keep exactly the words detected at least min_count times."""
    if min_count < 1:
        raise ValueError(f"min_count must be >= 1, got {min_count}")
    surfaces = {w for w, c in hist.counts.items() if c >= min_count}
    return KeywordList(surfaces=surfaces, min_count=min_count, histogram=hist)


def knee_candidates(hist: KeywordHistogram) -> ThresholdCandidates:
    """Propose cut-off candidates from the leap in the count spectrum.

    With N(c) = number of distinct words detected exactly c times, the center
    is the smallest c >= 2 maximizing the drop ratio N(c-1) / max(N(c), 1)
    over the observed count range; the candidates are {c-1, c, c+1} clamped to
    >= 1. A histogram with a single distinct count value yields just that
    count; a spectrum whose largest ratio never exceeds 1 has no leap. Both
    cases are flagged degenerate.
    """
    if not hist.counts:
        raise ValueError("knee_candidates requires a non-empty histogram")
    spectrum: Counter[int] = Counter(hist.counts.values())
    distinct_counts = sorted(spectrum)
    if len(distinct_counts) == 1:
        only = distinct_counts[0]
        return ThresholdCandidates(values=[only], center=only, degenerate=True)
    best_c = None
    best_ratio = None
    for c in range(2, distinct_counts[-1] + 1):
        ratio = spectrum.get(c - 1, 0) / max(spectrum.get(c, 0), 1)
        if best_ratio is None or ratio > best_ratio:
            best_ratio = ratio
            best_c = c
    values = sorted({max(1, best_c - 1), best_c, best_c + 1})
    return ThresholdCandidates(values=values, center=best_c, degenerate=best_ratio <= 1.0)


def freq_curve(hist: KeywordHistogram, last_n: int = 50) -> list[tuple[int, str, int]]:
    """(rank, surface, count) rows for the last_n lowest-count members of the
    descending-frequency ordering. Ranks are 1-based positions in the full
    ordering, so the tail keeps its global ranks for plotting."""
    if last_n < 1:
        raise ValueError(f"last_n must be >= 1, got {last_n}")
    ordering = hist.descending()
    start = max(0, len(ordering) - last_n)
    return [(i + 1, surface, count) for i, (surface, count) in enumerate(ordering) if i >= start]


def write_keyword_list(kw: KeywordList, path: str | Path) -> None:
    """TSV `surface<TAB>count`, descending count then ascending surface."""
    rows = [(s, kw.histogram.counts[s]) for s in kw.surfaces]
    rows.sort(key=lambda r: (-r[1], r[0]))
    with open(path, "w", encoding="utf-8", newline="") as f:
        for surface, count in rows:
            f.write(f"{surface}\t{count}\n")


def read_keyword_list(path: str | Path) -> set[str]:
    """Surfaces from a keyword TSV (count column optional)."""
    path = Path(path)
    surfaces: set[str] = set()
    with open(path, encoding="utf-8") as f:
        for lineno, line in enumerate(f, start=1):
            line = line.rstrip("\n")
            if not line:
                continue
            surface = line.split("\t")[0].strip().lower()
            if not surface:
                raise CorpusFormatError("empty keyword surface", path.name, lineno)
            surfaces.add(surface)
    return surfaces


def write_freq_curve(hist: KeywordHistogram, path: str | Path, last_n: int = 50) -> None:
    """Frequency-curve CSV with header rank,surface,count."""
    with open(path, "w", encoding="utf-8", newline="") as f:
        writer = csv.writer(f, lineterminator="\n")
        writer.writerow(["rank", "surface", "count"])
        for rank, surface, count in freq_curve(hist, last_n):
            writer.writerow([rank, surface, count])
