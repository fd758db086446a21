from __future__ import annotations

import pytest

from circoskit.corpus import Corpus, EmptyCorpusError
from circoskit.grammar import TRACK_NAMES, parse, serialize
from circoskit.patterns import stacked_matrix
from circoskit.recommend import (
    CONSTRAINT_SENTENCE,
    TASK_INTRO,
    GenerationInvalidError,
    GenerationProvider,
    MockGenerationProvider,
    NotFoundError,
    PromptBundle,
    Recommender,
    assemble_prompt,
    extract_config_span,
)
from circoskit.retrieval import HashingEmbedder, index_build, semantic_search

SCENARIO = "<ideogram><split><highlight><split><line><split><scatter><split><chord>"


def make_recommender(corpus: Corpus, generator) -> Recommender:
    return Recommender(
        corpus=corpus,
        embedder=HashingEmbedder(),
        generator=generator,
        stacked=stacked_matrix(corpus.records()),
    )


def retrieved(corpus: Corpus, query: str, k: int = 10):
    embedder = HashingEmbedder()
    index = index_build(corpus, embedder)
    hits = semantic_search(index, query, embedder, k=k)
    return hits, {hit.record_id: corpus.get(hit.record_id) for hit in hits}


# -- prompt assembly -------------------------------------------------------


def test_assemble_prompt_examples_in_rank_order(small_corpus):
    hits, records = retrieved(small_corpus, "mouse genome histogram rings", k=2)
    bundle = assemble_prompt("q", hits, records, k=2)
    assert len(bundle.examples) == 2
    assert bundle.examples[0][0] == records[hits[0].record_id].annotation
    assert bundle.examples[0][1] == serialize(records[hits[0].record_id].config)


def test_assemble_prompt_without_existing_design(small_corpus):
    hits, records = retrieved(small_corpus, "q")
    bundle = assemble_prompt("q", hits, records, existing=None)
    assert bundle.existing_design is None
    assert "Existing design" not in bundle.user_text()


def test_assemble_prompt_with_existing_design(small_corpus):
    hits, records = retrieved(small_corpus, "q")
    existing = parse("<ideogram><split><chord>")
    bundle = assemble_prompt("q", hits, records, existing=existing)
    assert bundle.existing_design == "<ideogram><split><chord>"
    assert "Existing design: <ideogram><split><chord>" in bundle.user_text()


def test_system_prompt_contains_required_sentences(small_corpus):
    hits, records = retrieved(small_corpus, "q")
    bundle = assemble_prompt("q", hits, records, stacked=stacked_matrix(small_corpus.records()))
    assert TASK_INTRO in bundle.system
    assert "You are an expert of Genomics Visualization." in bundle.system
    assert CONSTRAINT_SENTENCE in bundle.system
    for name in TRACK_NAMES:
        assert f"<{name}>" in bundle.system


def test_pattern_guidelines_rendered(small_corpus):
    bundle = assemble_prompt("q", [], {}, stacked=stacked_matrix(small_corpus.records()))
    assert "after <ideogram>:" in bundle.system
    assert "transitions" in bundle.system


# -- extraction -------------------------------------------------------------


def test_extract_plain_config():
    assert extract_config_span(SCENARIO) == SCENARIO


def test_extract_from_prose_prefers_longest_run():
    text = (
        "I suggest using a <tile> track instead of a <scatter> track. "
        f"Recommended configuration: {SCENARIO} as discussed."
    )
    assert extract_config_span(text) == SCENARIO


def test_extract_handles_wrapped_and_spacing():
    text = "Answer: <start> <ideogram> <split> <chord> <end> done"
    span = extract_config_span(text)
    assert span is not None
    assert serialize(parse(span)) == "<ideogram><split><chord>"


def test_extract_returns_none_without_valid_tokens():
    assert extract_config_span("no tokens here; <foo> is not real") is None


def test_extract_skips_unparseable_longest_run():
    text = "bad: <split><split><split><split> but good: <ideogram><split><chord>"
    assert extract_config_span(text) == "<ideogram><split><chord>"


# -- recommend/regenerate ----------------------------------------------------


def test_recommend_usage_scenario_output(small_corpus):
    recommender = make_recommender(small_corpus, MockGenerationProvider([SCENARIO]))
    rec = recommender.recommend("compare gene conservation and homology", k=2)
    assert len(rec.config.rings) == 5
    assert serialize(rec.config) == SCENARIO
    assert rec.attempts == 1
    assert len(rec.references) == 2
    assert set(rec.references) <= {"a-first", "b-second", "c-third"}


def test_recommend_extracts_from_prose(small_corpus):
    prose = f"I looked at similar plots. Try {SCENARIO} for this task."
    recommender = make_recommender(small_corpus, MockGenerationProvider([prose]))
    rec = recommender.recommend("anything")
    assert rec.attempts == 1
    assert serialize(rec.config) == SCENARIO
    assert SCENARIO not in rec.explanation
    assert "similar plots" in rec.explanation


def test_recommend_retries_then_fails(small_corpus):
    recommender = make_recommender(small_corpus, MockGenerationProvider(["<foo>"]))
    with pytest.raises(GenerationInvalidError) as info:
        recommender.recommend("anything")
    assert len(info.value.attempts) == 3
    assert all(raw == "<foo>" for raw in info.value.attempts)


def test_recommend_repair_loop_recovers(small_corpus):
    recommender = make_recommender(
        small_corpus, MockGenerationProvider(["gibberish", "still wrong", SCENARIO])
    )
    rec = recommender.recommend("anything")
    assert rec.attempts == 3
    assert serialize(rec.config) == SCENARIO


def test_recommend_empty_corpus():
    recommender = Recommender(corpus=Corpus(), embedder=HashingEmbedder(), generator=MockGenerationProvider())
    with pytest.raises(EmptyCorpusError):
        recommender.recommend("anything")


def test_recommend_is_pure_with_deterministic_mock(small_corpus):
    first = make_recommender(small_corpus, MockGenerationProvider()).recommend("compare genomes", k=2, seed=5)
    second = make_recommender(small_corpus, MockGenerationProvider()).recommend("compare genomes", k=2, seed=5)
    assert first.raw == second.raw
    assert first.config == second.config
    assert first.references == second.references


class SeedEchoProvider(GenerationProvider):
    def generate(self, prompt: PromptBundle, seed: int = 0) -> str:
        return f"seed {seed}: <ideogram><split><chord>"


def test_regenerate_changes_seed_and_appends(small_corpus):
    recommender = make_recommender(small_corpus, SeedEchoProvider())
    first = recommender.recommend("query", seed=0)
    second = recommender.regenerate(first.rec_id)
    assert second.rec_id != first.rec_id
    assert second.seed == first.seed + 1
    assert second.raw != first.raw
    assert first.rec_id in recommender.history and second.rec_id in recommender.history


def test_regenerate_with_seed_blind_mock_is_identical(small_corpus):
    recommender = make_recommender(small_corpus, MockGenerationProvider([SCENARIO]))
    first = recommender.recommend("query")
    second = recommender.regenerate(first.rec_id)
    assert second.config == first.config
    assert second.attempts == 1


def test_regenerate_unknown_id(small_corpus):
    recommender = make_recommender(small_corpus, MockGenerationProvider())
    with pytest.raises(NotFoundError):
        recommender.regenerate("rec-404")


def test_recommendation_config_round_trips(small_corpus):
    recommender = make_recommender(small_corpus, MockGenerationProvider())
    rec = recommender.recommend("compare gene tracks")
    assert parse(serialize(rec.config)) == rec.config
