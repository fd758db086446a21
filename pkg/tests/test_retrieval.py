from __future__ import annotations

import math
import re
from functools import lru_cache

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from circoskit.corpus import Corpus, EmptyCorpusError
from circoskit.grammar import parse, to_sequence
from circoskit.retrieval import (
    DimensionMismatchError,
    ProviderUnavailableError,
    EMBEDDING_DIM,
    HashingEmbedder,
    StaleIndexError,
    index_build,
    levenshtein,
    record_text,
    semantic_search,
    structural_search,
)

# -- independent reimplementation of the hashing scheme -------------------

FNV_PRIME = 0x100000001B3
BASIS_INDEX = 0xCBF29CE484222325
BASIS_SIGN = 0x84222325CBF29CE4


def fnv1a_oracle(data: bytes, basis: int) -> int:
    value = basis
    for byte in data:
        value = ((value ^ byte) * FNV_PRIME) % 2**64
    return value


def embed_oracle(text: str) -> list[float]:
    buckets = [0.0] * EMBEDDING_DIM
    for word in re.findall(r"[a-z0-9]+", text.lower()):
        raw = word.encode("utf-8")
        index = fnv1a_oracle(raw, BASIS_INDEX) % EMBEDDING_DIM
        buckets[index] += 1.0 if fnv1a_oracle(raw, BASIS_SIGN) % 2 == 0 else -1.0
    norm = math.sqrt(sum(v * v for v in buckets))
    if norm:
        buckets = [v / norm for v in buckets]
    return buckets


def test_embed_deterministic_bitwise():
    embedder = HashingEmbedder()
    text = "Compare gene conservation scores between human and mouse"
    first = embedder.embed(text)
    second = embedder.embed(text)
    assert first.shape == (EMBEDDING_DIM,)
    assert np.array_equal(first, second)


def test_embed_empty_text_is_zero_vector():
    vector = HashingEmbedder().embed("")
    assert np.array_equal(vector, np.zeros(EMBEDDING_DIM))


def test_embed_unit_norm_and_matches_independent_script():
    embedder = HashingEmbedder()
    for text in ("gene conservation scores", "homology relationship", "ideogram <split> chord"):
        vector = embedder.embed(text)
        assert abs(float(np.linalg.norm(vector)) - 1.0) <= 1e-9
        assert np.allclose(vector, np.array(embed_oracle(text)), atol=0)


def test_index_build_orders_and_is_deterministic(small_corpus):
    embedder = HashingEmbedder()
    index = index_build(small_corpus, embedder)
    assert index.ids == ("a-first", "b-second", "c-third")
    assert index.vectors.shape == (3, EMBEDDING_DIM)
    assert index.corpus_version == small_corpus.version
    again = index_build(small_corpus, embedder)
    assert np.array_equal(index.vectors, again.vectors)


def test_index_build_empty_corpus():
    with pytest.raises(EmptyCorpusError):
        index_build(Corpus(), HashingEmbedder())


def test_index_build_attributes_provider_failure(small_corpus):
    class FlakyProvider(HashingEmbedder):
        def embed(self, text):
            if "mouse" in text:
                raise ProviderUnavailableError("endpoint down")
            return super().embed(text)

    with pytest.raises(ProviderUnavailableError, match="b-second"):
        index_build(small_corpus, FlakyProvider())


def test_index_build_reports_bad_dimensions(small_corpus):
    class ShortProvider(HashingEmbedder):
        def embed(self, text):
            return super().embed(text)[:100]

    with pytest.raises(DimensionMismatchError, match="a-first") as info:
        index_build(small_corpus, ShortProvider())
    assert info.value.got == 100


def test_semantic_search_exact_match_rank_one(small_corpus):
    embedder = HashingEmbedder()
    index = index_build(small_corpus, embedder)
    record = small_corpus.get("b-second")
    hits = semantic_search(index, record_text(record.annotation, record.config), embedder, k=3)
    assert hits[0].record_id == "b-second"
    assert hits[0].distance == pytest.approx(0.0, abs=1e-9)
    assert hits[0].rank == 1


def test_semantic_search_k_larger_than_corpus(small_corpus):
    embedder = HashingEmbedder()
    index = index_build(small_corpus, embedder)
    hits = semantic_search(index, "anything at all", embedder, k=50)
    assert len(hits) == 3
    assert [hit.rank for hit in hits] == [1, 2, 3]


def test_semantic_search_matches_bruteforce_sort():
    corpus = Corpus()
    rows = []
    texts = [
        "alpha beta gamma",
        "gene conservation track",
        "mouse genome rings",
        "alpha beta",
        "chord interactions",
    ]
    for i, text in enumerate(texts):
        rows.append(f'{{"id": "s{i}", "annotation": "{text}", "config": "<chord>"}}')
    corpus.import_jsonl("\n".join(rows))
    embedder = HashingEmbedder()
    index = index_build(corpus, embedder)

    query = "alpha gene rings"
    query_vec = embed_oracle(query)
    expected = []
    for record in corpus.records():
        vec = embed_oracle(record_text(record.annotation, record.config))
        dist = math.sqrt(sum((a - b) ** 2 for a, b in zip(query_vec, vec)))
        expected.append((dist, record.id))
    expected.sort()

    hits = semantic_search(index, query, embedder, k=5)
    assert [hit.record_id for hit in hits] == [record_id for _, record_id in expected]
    for hit, (dist, _) in zip(hits, expected):
        assert hit.distance == pytest.approx(dist, abs=1e-9)


def test_semantic_search_prefix_stable_under_growing_k(small_corpus):
    embedder = HashingEmbedder()
    index = index_build(small_corpus, embedder)
    ranking_small = semantic_search(index, "genome study", embedder, k=1)
    ranking_large = semantic_search(index, "genome study", embedder, k=3)
    assert [h.record_id for h in ranking_large[:1]] == [h.record_id for h in ranking_small]


def test_semantic_search_stale_index(small_corpus):
    embedder = HashingEmbedder()
    index = index_build(small_corpus, embedder)
    small_corpus.import_jsonl('{"id": "new", "annotation": "fresh", "config": "<chord>"}')
    with pytest.raises(StaleIndexError):
        semantic_search(index, "query", embedder, corpus_version=small_corpus.version)


def test_semantic_search_k_validation(small_corpus):
    embedder = HashingEmbedder()
    index = index_build(small_corpus, embedder)
    with pytest.raises(ValueError):
        semantic_search(index, "q", embedder, k=0)


# -- levenshtein -----------------------------------------------------------


def lev_oracle(a: tuple[str, ...], b: tuple[str, ...]) -> int:
    @lru_cache(maxsize=None)
    def go(i: int, j: int) -> int:
        if i == len(a):
            return len(b) - j
        if j == len(b):
            return len(a) - i
        if a[i] == b[j]:
            return go(i + 1, j + 1)
        return 1 + min(go(i + 1, j), go(i, j + 1), go(i + 1, j + 1))

    return go(0, 0)


def test_levenshtein_fixtures():
    same = ("ideogram", "split", "chord")
    assert levenshtein(same, same) == 0
    assert (
        levenshtein(
            ("ideogram", "split", "histogram", "split", "chord"),
            ("ideogram", "split", "line", "split", "chord"),
        )
        == 1
    )
    assert levenshtein((), ("chord",)) == 1


tokens3 = st.sampled_from(["ideogram", "split", "chord"])
short_seqs = st.lists(tokens3, max_size=8).map(tuple)
long_seqs = st.lists(st.sampled_from(["a", "b", "c", "d"]), max_size=15).map(tuple)


@given(short_seqs, short_seqs)
@settings(max_examples=250)
def test_levenshtein_equals_recursive_oracle(a, b):
    assert levenshtein(a, b) == lev_oracle(a, b)


@given(long_seqs, long_seqs, long_seqs)
@settings(max_examples=250)
def test_levenshtein_metric_axioms(a, b, c):
    assert levenshtein(a, a) == 0
    assert levenshtein(a, b) == levenshtein(b, a)
    assert levenshtein(a, c) <= levenshtein(a, b) + levenshtein(b, c)


# -- structural search -------------------------------------------------------


def test_structural_search_exact_match(small_corpus):
    current = small_corpus.get("c-third").config
    hits = structural_search(small_corpus, current, k=3)
    assert hits[0].record_id == "c-third"
    assert hits[0].distance == 0


def test_structural_search_ordering():
    corpus = Corpus()
    corpus.import_jsonl(
        "\n".join(
            [
                '{"id": "A", "annotation": "short", "config": "<ideogram><split><chord>"}',
                '{"id": "B", "annotation": "long", "config": "<ideogram><split><line><split><chord>"}',
            ]
        )
    )
    current = parse("<ideogram><split><chord>")
    hits = structural_search(corpus, current, k=10)
    assert [(h.record_id, h.distance) for h in hits] == [("A", 0.0), ("B", 2.0)]


def test_structural_search_k_limits(small_corpus):
    hits = structural_search(small_corpus, parse("<chord>"), k=1)
    assert len(hits) == 1
    with pytest.raises(EmptyCorpusError):
        structural_search(Corpus(), parse("<chord>"), k=1)


def test_structural_distance_uses_token_sequences(small_corpus):
    current = parse("<ideogram><split><tile><split><chord>")
    hits = structural_search(small_corpus, current, k=3)
    by_id = {hit.record_id: hit.distance for hit in hits}
    expected = levenshtein(to_sequence(current), to_sequence(small_corpus.get("a-first").config))
    assert by_id["a-first"] == expected
