"""Per-document keyword extraction.

Unigram candidates are ranked by cosine similarity to the document vector and
then re-selected greedily with Maximal Marginal Relevance, which trades
relevance to the document against redundancy with already-picked keywords.
All orderings are made deterministic by breaking score ties on the ascending
lexicographic surface.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from importlib import resources
from pathlib import Path
from typing import Iterable, Sequence

import numpy as np

from .corpus import Document, segment_words
from .embeddings import EmbeddingProvider, cosine_similarity
from .errors import UnembeddableDocumentError

DEFAULT_TOP_K = 10
DEFAULT_DIVERSITY = 0.8


def load_default_stopwords() -> frozenset[str]:
    """The built-in English stopword list shipped with the package."""
    text = resources.files("keymask").joinpath("data/stopwords_en.txt").read_text("utf-8")
    return frozenset(w for w in text.split() if w)


def load_stopwords(path: str | Path) -> frozenset[str]:
    """One stopword per line, lowercased on load."""
    with open(path, encoding="utf-8") as f:
        return frozenset(line.strip().lower() for line in f if line.strip())


@dataclass
class ExtractionParams:
    top_k: int = DEFAULT_TOP_K
    diversity: float = DEFAULT_DIVERSITY
    min_word_len: int = 2
    stopword_set: frozenset[str] = field(default_factory=load_default_stopwords)

    def __post_init__(self):
        if self.top_k < 1:
            raise ValueError(f"top_k must be >= 1, got {self.top_k}")
        if not 0.0 <= self.diversity <= 1.0:
            raise ValueError(f"diversity must lie in [0, 1], got {self.diversity}")
        if self.min_word_len < 1:
            raise ValueError(f"min_word_len must be >= 1, got {self.min_word_len}")


@dataclass(frozen=True)
class ScoredCandidate:
    surface: str
    doc_similarity: float


def candidate_unigrams(doc_words: Iterable[str], params: ExtractionParams) -> list[str]:
    """Unique candidate surfaces in first-occurrence order.

    Stopwords, surfaces shorter than min_word_len, and purely numeric surfaces
    are excluded.
    """
    seen: set[str] = set()
    out: list[str] = []
    for surface in doc_words:
        if surface in seen:
            continue
        seen.add(surface)
        if len(surface) < params.min_word_len:
            continue
        if surface in params.stopword_set:
            continue
        if surface.isdigit():
            continue
        out.append(surface)
    return out


def rank_candidates(
    candidates: Sequence[str], provider: EmbeddingProvider, doc_vector: np.ndarray
) -> list[ScoredCandidate]:
    """Candidates scored by cosine similarity to the document vector, sorted
    descending; ties broken by ascending surface. Out-of-coverage candidates
    are dropped (an empty result is not an error)."""
    vectors = provider.embed_words(candidates)
    scored = [
        ScoredCandidate(surface, cosine_similarity(vec, doc_vector))
        for surface, vec in zip(candidates, vectors)
        if vec is not None
    ]
    scored.sort(key=lambda c: (-c.doc_similarity, c.surface))
    return scored


def mmr_select(
    scored: Sequence[ScoredCandidate], provider: EmbeddingProvider, params: ExtractionParams
) -> list[str]:
    """Greedy MMR selection of up to top_k surfaces, in selection order.

    The first pick is the highest doc similarity. Every later pick maximizes

        (1 - diversity) * doc_similarity(c)
            - diversity * max over selected s of cos(vec(c), vec(s))

    over the unselected candidates, ties broken by ascending surface.
    """
    if not scored:
        return []
    vectors = provider.embed_words([c.surface for c in scored])
    pool = [(c, v) for c, v in zip(scored, vectors) if v is not None]
    if not pool:
        return []

    # Do not rely on the caller having sorted `scored`: the head of the
    # relevance ordering is the first pick by definition.
    pool.sort(key=lambda cv: (-cv[0].doc_similarity, cv[0].surface))
    selected = [pool[0]]
    remaining = pool[1:]
    d = params.diversity
    while remaining and len(selected) < params.top_k:
        best_idx = 0
        best_key = None
        for i, (cand, vec) in enumerate(remaining):
            redundancy = max(cosine_similarity(vec, svec) for _, svec in selected)
            mmr = (1.0 - d) * cand.doc_similarity - d * redundancy
            key = (-mmr, cand.surface)
            if best_key is None or key < best_key:
                best_key = key
                best_idx = i
        selected.append(remaining.pop(best_idx))
    return [cand.surface for cand, _ in selected]


def extract_document_keywords(
    doc: Document, provider: EmbeddingProvider, params: ExtractionParams
) -> list[str]:
    """segment -> candidates -> document embedding -> rank -> MMR.

    Returns [] for documents with no candidates or no embeddable words;
    provider transport errors propagate.
    """
    surfaces = [span.surface for span in segment_words(doc.text)]
    candidates = candidate_unigrams(surfaces, params)
    if not candidates:
        return []
    try:
        doc_vector = provider.embed_document(surfaces)
    except UnembeddableDocumentError:
        return []
    scored = rank_candidates(candidates, provider, doc_vector)
    return mmr_select(scored, provider, params)
