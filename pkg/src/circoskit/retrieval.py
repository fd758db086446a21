"""Dual-mode retrieval: embedding k-NN and token-level edit distance.

Semantic mode embeds text into 1024-dimensional vectors and ranks corpus
records by exact brute-force Euclidean distance. Structural mode ranks by
Levenshtein distance between token sequences. Both break ties by record id
so results are fully deterministic.
"""

from __future__ import annotations

import re
from dataclasses import dataclass

import numpy as np
import requests

from .corpus import Corpus, EmptyCorpusError
from .grammar import CircosConfig, serialize, to_sequence

__all__ = [
    "EMBEDDING_DIM",
    "RetrievalHit",
    "VectorIndex",
    "EmbeddingProvider",
    "HashingEmbedder",
    "RemoteEmbeddingProvider",
    "ProviderUnavailableError",
    "DimensionMismatchError",
    "StaleIndexError",
    "index_build",
    "semantic_search",
    "levenshtein",
    "structural_search",
]

EMBEDDING_DIM = 1024

_FNV_PRIME = 0x100000001B3
_FNV_MASK = 0xFFFFFFFFFFFFFFFF
# Two fixed FNV-1a offset bases: one picks the bucket, the other the sign.
_FNV_BASIS_INDEX = 0xCBF29CE484222325
_FNV_BASIS_SIGN = 0x84222325CBF29CE4

_WORD_RE = re.compile(r"[a-z0-9]+")


class ProviderUnavailableError(RuntimeError):
    """Remote embedding/generation endpoint failed or timed out."""


class DimensionMismatchError(ValueError):
    def __init__(self, got: int, record_id: str | None = None):
        where = f" for record {record_id!r}" if record_id else ""
        super().__init__(f"provider returned {got} components{where}, expected {EMBEDDING_DIM}")
        self.got = got
        self.record_id = record_id


class StaleIndexError(RuntimeError):
    def __init__(self, index_version: int, corpus_version: int):
        super().__init__(f"index built at corpus version {index_version}, corpus is at {corpus_version}")


def _fnv1a(data: bytes, basis: int) -> int:
    value = basis
    for byte in data:
        value ^= byte
        value = (value * _FNV_PRIME) & _FNV_MASK
    return value


class EmbeddingProvider:
    """Contract: embed(text) returns exactly EMBEDDING_DIM components."""

    def embed(self, text: str) -> np.ndarray:
        raise NotImplementedError

    def embed_many(self, texts: list[str]) -> list[np.ndarray]:
        return [self.embed(text) for text in texts]


class HashingEmbedder(EmbeddingProvider):
    """Built-in deterministic fallback: signed feature hashing.

    Lowercase, split on non-alphanumerics; each word adds +-1 (sign from one
    hash) at the bucket picked by the other hash; the result is
    L2-normalized. Pure integer hashing keeps it identical across runs and
    platforms. Empty text embeds to the zero vector.
    """

    def embed(self, text: str) -> np.ndarray:
        vector = np.zeros(EMBEDDING_DIM, dtype=np.float64)
        for word in _WORD_RE.findall(text.lower()):
            data = word.encode("utf-8")
            bucket = _fnv1a(data, _FNV_BASIS_INDEX) % EMBEDDING_DIM
            sign = 1.0 if _fnv1a(data, _FNV_BASIS_SIGN) % 2 == 0 else -1.0
            vector[bucket] += sign
        norm = float(np.linalg.norm(vector))
        if norm > 0.0:
            vector /= norm
        return vector


class RemoteEmbeddingProvider(EmbeddingProvider):
    """HTTP provider: POST {"texts": [...]} -> {"vectors": [[...], ...]}."""

    def __init__(self, url: str, timeout: float = 10.0, session: requests.Session | None = None):
        self.url = url
        self.timeout = timeout
        self._session = session or requests.Session()

    def embed(self, text: str) -> np.ndarray:
        return self.embed_many([text])[0]

    def embed_many(self, texts: list[str]) -> list[np.ndarray]:
        try:
            response = self._session.post(self.url, json={"texts": texts}, timeout=self.timeout)
            response.raise_for_status()
            payload = response.json()
        except (requests.RequestException, ValueError) as exc:
            raise ProviderUnavailableError(f"embedding endpoint {self.url}: {exc}") from exc
        vectors = payload.get("vectors")
        if not isinstance(vectors, list) or len(vectors) != len(texts):
            raise ProviderUnavailableError(f"embedding endpoint {self.url}: malformed response")
        out = []
        for values in vectors:
            if len(values) != EMBEDDING_DIM:
                raise DimensionMismatchError(len(values))
            out.append(np.asarray(values, dtype=np.float64))
        return out


@dataclass(frozen=True)
class RetrievalHit:
    record_id: str
    distance: float
    rank: int  # 1-based

    def to_json(self) -> dict:
        return {"id": self.record_id, "distance": self.distance, "rank": self.rank}


@dataclass
class VectorIndex:
    ids: tuple[str, ...]
    vectors: np.ndarray  # shape (len(ids), EMBEDDING_DIM)
    corpus_version: int


def record_text(annotation: str, config: CircosConfig) -> str:
    """The embedded text for one record: annotation plus bare config string."""
    return f"{annotation} {serialize(config)}"


def index_build(corpus: Corpus, provider: EmbeddingProvider) -> VectorIndex:
    """Embed every record (annotation + bare config) at the current version.

    Provider failures are re-raised carrying the failing record's id.
    """
    records = corpus.records()
    if not records:
        raise EmptyCorpusError("index_build")
    vectors = []
    for record in records:
        try:
            vector = provider.embed(record_text(record.annotation, record.config))
        except ProviderUnavailableError as exc:
            raise ProviderUnavailableError(f"record {record.id!r}: {exc}") from exc
        except DimensionMismatchError as exc:
            raise DimensionMismatchError(exc.got, record_id=record.id) from exc
        if len(vector) != EMBEDDING_DIM:
            raise DimensionMismatchError(len(vector), record_id=record.id)
        vectors.append(vector)
    matrix = np.vstack(vectors)
    return VectorIndex(ids=tuple(record.id for record in records), vectors=matrix, corpus_version=corpus.version)


def semantic_search(
    index: VectorIndex,
    query: str,
    provider: EmbeddingProvider,
    k: int = 10,
    corpus_version: int | None = None,
) -> list[RetrievalHit]:
    """Exact brute-force Euclidean top-k, ties broken by record id."""
    if k < 1:
        raise ValueError("k must be >= 1")
    if corpus_version is not None and corpus_version != index.corpus_version:
        raise StaleIndexError(index.corpus_version, corpus_version)
    query_vector = provider.embed(query)
    distances = np.linalg.norm(index.vectors - query_vector, axis=1)
    order = sorted(range(len(index.ids)), key=lambda i: (float(distances[i]), index.ids[i]))
    return [
        RetrievalHit(record_id=index.ids[i], distance=float(distances[i]), rank=rank)
        for rank, i in enumerate(order[:k], start=1)
    ]


def levenshtein(a: tuple[str, ...] | list[str], b: tuple[str, ...] | list[str]) -> int:
    """Token-level edit distance, unit costs."""
    if len(a) < len(b):
        a, b = b, a
    previous = list(range(len(b) + 1))
    for i, token_a in enumerate(a, start=1):
        current = [i] + [0] * len(b)
        for j, token_b in enumerate(b, start=1):
            if token_a == token_b:
                current[j] = previous[j - 1]
            else:
                current[j] = 1 + min(previous[j], previous[j - 1], current[j - 1])
        previous = current
    return previous[len(b)]


def structural_search(corpus: Corpus, current: CircosConfig, k: int = 10) -> list[RetrievalHit]:
    """Top-k records by token-level Levenshtein to the current config."""
    if k < 1:
        raise ValueError("k must be >= 1")
    records = corpus.records()
    if not records:
        raise EmptyCorpusError("structural_search")
    sequence = to_sequence(current)
    scored = sorted(
        ((levenshtein(sequence, to_sequence(record.config)), record.id) for record in records),
    )
    return [
        RetrievalHit(record_id=record_id, distance=float(distance), rank=rank)
        for rank, (distance, record_id) in enumerate(scored[:k], start=1)
    ]
