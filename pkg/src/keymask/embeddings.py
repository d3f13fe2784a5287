"""Embedding providers and cosine similarity.

Vectors are float64 numpy arrays. Two backends sit behind the same interface:
a local static lookup table (word -> fixed vector) and a client for a remote
HTTP embedding service, so the extraction algorithm never knows which encoder
produced its vectors.
"""

from __future__ import annotations

import math
import threading
import time
from pathlib import Path
from typing import Mapping, Sequence

import numpy as np
import requests

from .errors import (
    DegenerateVectorError,
    ProtocolError,
    RemoteServiceError,
    TableFormatError,
    UnembeddableDocumentError,
)


def cosine_similarity(a: np.ndarray, b: np.ndarray) -> float:
    """dot(a, b) / (|a| |b|). Zero vectors and dim mismatches are errors."""
    a = np.asarray(a, dtype=np.float64)
    b = np.asarray(b, dtype=np.float64)
    if a.shape != b.shape:
        raise ValueError(f"dimension mismatch: {a.shape} vs {b.shape}")
    na = np.linalg.norm(a)
    nb = np.linalg.norm(b)
    if na == 0.0 or nb == 0.0:
        raise DegenerateVectorError("cosine similarity of a zero vector is undefined")
    return float(np.dot(a, b) / (na * nb))


class EmbeddingProvider:
    """Interface shared by the static and remote backends."""

    dim: int

    def embed_words(self, words: Sequence[str]) -> list[np.ndarray | None]:
        """Per-word vector, or None for words outside the provider's coverage."""
        raise NotImplementedError

    def embed_document(self, doc_words: Sequence[str]) -> np.ndarray:
        """Single document-level vector for an already-segmented word sequence."""
        raise NotImplementedError


class StaticTableProvider(EmbeddingProvider):
    """Case-insensitive word -> vector lookup over an in-memory table.

    The document vector is the arithmetic mean of the covered word vectors
    (with multiplicity); words outside coverage contribute nothing rather than
    poisoning the mean with zeros.
    """

    kind = "static_table"

    def __init__(self, table: Mapping[str, np.ndarray]):
        if not table:
            raise TableFormatError("empty embedding table")
        self.table: dict[str, np.ndarray] = {}
        self.dim = -1
        for word, vec in table.items():
            vec = np.asarray(vec, dtype=np.float64)
            if self.dim == -1:
                self.dim = vec.shape[0]
            elif vec.shape[0] != self.dim:
                raise TableFormatError(
                    f"inconsistent dimension for {word!r}: {vec.shape[0]} != {self.dim}"
                )
            self.table.setdefault(word.lower(), vec)

    @property
    def coverage(self) -> frozenset[str]:
        return frozenset(self.table)

    @classmethod
    def from_file(cls, path: str | Path) -> "StaticTableProvider":
        """Text table, one `word v1 v2 ... vD` line per word, single spaces.

        Duplicate words keep the first occurrence; inconsistent dimensions are
        an error naming the line.
        """
        path = Path(path)
        table: dict[str, np.ndarray] = {}
        dim = -1
        with open(path, encoding="utf-8") as f:
            for lineno, line in enumerate(f, start=1):
                line = line.rstrip("\n")
                if not line:
                    continue
                parts = line.split(" ")
                if len(parts) < 2:
                    raise TableFormatError("expected `word v1 ... vD`", path.name, lineno)
                word = parts[0].lower()
                try:
                    values = [float(x) for x in parts[1:]]
                except ValueError as e:
                    raise TableFormatError(f"non-numeric value ({e})", path.name, lineno) from e
                if not all(math.isfinite(v) for v in values):
                    raise TableFormatError("non-finite value", path.name, lineno)
                if dim == -1:
                    dim = len(values)
                elif len(values) != dim:
                    raise TableFormatError(
                        f"dimension {len(values)} != {dim} seen earlier", path.name, lineno
                    )
                if word not in table:  # first occurrence wins
                    table[word] = np.array(values, dtype=np.float64)
        if not table:
            raise TableFormatError("empty embedding table", path.name)
        return cls(table)

    def embed_words(self, words: Sequence[str]) -> list[np.ndarray | None]:
        return [self.table.get(w.lower()) for w in words]

    def embed_document(self, doc_words: Sequence[str]) -> np.ndarray:
        covered = [self.table[w.lower()] for w in doc_words if w.lower() in self.table]
        if not covered:
            raise UnembeddableDocumentError(
                f"none of the {len(doc_words)} words are in the embedding table"
            )
        return np.mean(np.stack(covered), axis=0)


class RemoteEmbeddingProvider(EmbeddingProvider):
    """Client for the batch embedding service.

    POST /embed_words  {"words": [...]}  -> {"dim": D, "vectors": [[...], ...]}
    POST /embed_document {"text": "..."} -> {"dim": D, "vector": [...]}

    Transient failures (connection errors, 5xx) are retried with exponential
    backoff up to max_retries; concurrent callers share a semaphore bounding
    in-flight requests. The remote backend never reports a word as absent.
    """

    kind = "remote_service"

    def __init__(
        self,
        endpoint_url: str,
        timeout: float = 10.0,
        max_retries: int = 3,
        batch_size: int = 256,
        max_in_flight: int = 4,
        backoff_base: float = 0.1,
    ):
        self.endpoint_url = endpoint_url.rstrip("/")
        self.timeout = timeout
        self.max_retries = max_retries
        self.batch_size = batch_size
        self.backoff_base = backoff_base
        self.dim = -1  # learned from the first response
        self._dim_lock = threading.Lock()
        self._inflight = threading.Semaphore(max_in_flight)
        self._session = requests.Session()

    def _post(self, route: str, payload: dict) -> dict:
        url = f"{self.endpoint_url}{route}"
        last_exc: Exception | None = None
        for attempt in range(self.max_retries + 1):
            if attempt:
                time.sleep(self.backoff_base * (2 ** (attempt - 1)))
            try:
                with self._inflight:
                    resp = self._session.post(url, json=payload, timeout=self.timeout)
            except requests.RequestException as e:
                last_exc = e
                continue
            if resp.status_code >= 500:
                last_exc = RemoteServiceError(
                    f"server error from {route}", status=resp.status_code, body=resp.text
                )
                continue
            if not 200 <= resp.status_code < 300:
                raise RemoteServiceError(
                    f"request to {route} rejected", status=resp.status_code, body=resp.text
                )
            try:
                return resp.json()
            except ValueError as e:
                raise ProtocolError(f"non-JSON response from {route}: {e}") from e
        if isinstance(last_exc, RemoteServiceError):
            raise last_exc
        raise RemoteServiceError(f"request to {route} failed after {self.max_retries + 1} attempts: {last_exc}")

    def _check_dim(self, dim: int) -> None:
        if not isinstance(dim, int) or dim <= 0:
            raise ProtocolError(f"service reported invalid dim {dim!r}")
        with self._dim_lock:
            if self.dim == -1:
                self.dim = dim
            elif dim != self.dim:
                raise ProtocolError(f"service changed dimension: {dim} != {self.dim}")

    def _to_vector(self, values, expected_dim: int) -> np.ndarray:
        vec = np.asarray(values, dtype=np.float64)
        if vec.ndim != 1 or vec.shape[0] != expected_dim:
            raise ProtocolError(f"vector of length {vec.shape} does not match dim {expected_dim}")
        if not np.all(np.isfinite(vec)):
            raise ProtocolError("service returned a non-finite vector")
        return vec

    def embed_words(self, words: Sequence[str]) -> list[np.ndarray | None]:
        out: list[np.ndarray | None] = []
        for start in range(0, len(words), self.batch_size):
            batch = list(words[start : start + self.batch_size])
            if not batch:
                continue
            data = self._post("/embed_words", {"words": batch})
            if "dim" not in data or "vectors" not in data:
                raise ProtocolError("embed_words response missing dim/vectors")
            self._check_dim(data["dim"])
            vectors = data["vectors"]
            if len(vectors) != len(batch):
                raise ProtocolError(
                    f"embed_words returned {len(vectors)} vectors for {len(batch)} words"
                )
            out.extend(self._to_vector(v, data["dim"]) for v in vectors)
        return out

    def embed_document(self, doc_words: Sequence[str]) -> np.ndarray:
        # The document endpoint takes text; the segmented words are re-joined
        # with single spaces as the canonical form.
        data = self._post("/embed_document", {"text": " ".join(doc_words)})
        if "dim" not in data or "vector" not in data:
            raise ProtocolError("embed_document response missing dim/vector")
        self._check_dim(data["dim"])
        return self._to_vector(data["vector"], data["dim"])
