from __future__ import annotations

import pytest
from hypothesis import strategies as st

from circoskit.corpus import Corpus
from circoskit.grammar import CircosConfig, Ring, TrackKind

track_kinds = st.sampled_from(list(TrackKind))
rings = st.lists(track_kinds, min_size=1, max_size=4).map(lambda tracks: Ring(tuple(tracks)))
configs = st.lists(rings, min_size=0, max_size=12).map(lambda items: CircosConfig(tuple(items)))
nonempty_configs = st.lists(rings, min_size=1, max_size=12).map(lambda items: CircosConfig(tuple(items)))


@pytest.fixture
def small_corpus() -> Corpus:
    corpus = Corpus()
    lines = [
        '{"id": "a-first", "annotation": "human chromosome ideogram with conservation highlight", "config": "<ideogram><highlight><split><histogram><split><chord>"}',
        '{"id": "b-second", "annotation": "mouse genome histogram rings", "config": "<ideogram><split><histogram><split><histogram>"}',
        '{"id": "c-third", "annotation": "gene interaction chords with tiles", "config": "<ideogram><split><tile><split><chord>"}',
    ]
    report = corpus.import_jsonl("\n".join(lines))
    assert report.accepted == 3 and not report.rejected
    return corpus
