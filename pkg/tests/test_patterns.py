from __future__ import annotations

import random
from collections import Counter

import pytest

from circoskit.corpus import EmptyCorpusError
from circoskit.grammar import TRACK_NAMES, CircosConfig, parse
from circoskit.patterns import (
    STACKED_LABELS,
    SYNTH_LABELS,
    distributions,
    stacked_matrix,
    synthesized_matrix,
)

C1 = parse("<ideogram><highlight><split><histogram><split><chord>")
C2 = parse("<ideogram><split><histogram><split><histogram>")
WORKED = [C1, C2]


# -- independent brute-force oracle --------------------------------------


def oracle_stacked(configs: list[CircosConfig]):
    """Materialize every adjacent ring pair explicitly and tally it."""
    pairs = []
    for config in configs:
        classes = ["start"]
        for ring in config.rings:
            if len(ring.tracks) > 1:
                classes.append("synth")
            else:
                classes.append(ring.tracks[0].value)
        classes.append("end")
        for i in range(len(classes) - 1):
            pairs.append((classes[i], classes[i + 1]))
    counts = Counter(pairs)
    outer_totals = Counter(outer for outer, _ in pairs)
    probs = {
        (outer, inner): counts[(outer, inner)] / outer_totals[outer]
        for outer, inner in counts
    }
    return counts, outer_totals, probs


def oracle_synthesized(configs: list[CircosConfig]):
    """Materialize ring co-occurrence pairs explicitly and tally them."""
    co = Counter()
    containing = Counter()
    for config in configs:
        for ring in config.rings:
            bag = Counter(track.value for track in ring.tracks)
            for a in bag:
                containing[a] += 1
                for b in bag:
                    if a == b and bag[a] < 2:
                        continue
                    co[(a, b)] += 1
    probs = {(a, b): co[(a, b)] / containing[a] for a, b in co}
    return co, containing, probs


def random_corpus(rng: random.Random, max_configs=10, max_rings=6) -> list[CircosConfig]:
    configs = []
    for _ in range(rng.randint(1, max_configs)):
        rings = []
        for _ in range(rng.randint(1, max_rings)):
            size = rng.choice([1, 1, 1, 2, 3])
            rings.append([rng.choice(TRACK_NAMES) for _ in range(size)])
        text = "<split>".join("".join(f"<{t}>" for t in ring) for ring in rings)
        configs.append(parse(text))
    return configs


# -- worked fixtures ------------------------------------------------------


def test_stacked_worked_fixture():
    matrix = stacked_matrix(WORKED)
    assert matrix.prob("ideogram", "histogram") == pytest.approx(1.0)
    assert matrix.prob("histogram", "chord") == pytest.approx(1 / 3)
    assert matrix.prob("histogram", "histogram") == pytest.approx(1 / 3)
    assert matrix.prob("histogram", "end") == pytest.approx(1 / 3)
    assert matrix.count("start", "synth") == 1
    assert matrix.count("start", "ideogram") == 1


def test_stacked_single_config_path():
    matrix = stacked_matrix([parse("<ideogram>")])
    assert matrix.prob("start", "ideogram") == pytest.approx(1.0)
    assert matrix.prob("ideogram", "end") == pytest.approx(1.0)


def test_synthesized_worked_fixture():
    matrix = synthesized_matrix(WORKED)
    assert matrix.prob("ideogram", "highlight") == pytest.approx(0.5)
    assert matrix.prob("highlight", "ideogram") == pytest.approx(1.0)
    assert matrix.prob("ideogram", "ideogram") == 0.0


def test_synthesized_self_pair_needs_multiplicity():
    matrix = synthesized_matrix([parse("<histogram><histogram>")])
    assert matrix.count("histogram", "histogram") == 1
    assert matrix.prob("histogram", "histogram") == pytest.approx(1.0)
    matrix = synthesized_matrix([parse("<histogram>")])
    assert matrix.count("histogram", "histogram") == 0


def test_distributions_worked_fixture():
    dists = distributions([C1])
    assert dists.rings_per_plot == {3: 1}
    assert dists.tracks_per_ring == {2: 1, 1: 2}

    dists = distributions([C2])
    assert dists.track_types_per_plot == {2: 1}

    dists = distributions([CircosConfig()])
    assert dists.rings_per_plot == {0: 1}
    assert dists.track_types_per_plot == {0: 1}


def test_empty_corpus_errors():
    for operation in (stacked_matrix, synthesized_matrix, distributions):
        with pytest.raises(EmptyCorpusError):
            operation([])


# -- oracle equivalence and properties ------------------------------------


def test_stacked_equals_bruteforce_on_random_corpora():
    rng = random.Random(20817)
    for _ in range(20):
        corpus = random_corpus(rng)
        matrix = stacked_matrix(corpus)
        counts, outer_totals, probs = oracle_stacked(corpus)
        for o, outer in enumerate(STACKED_LABELS):
            assert matrix.denominators[o] == outer_totals.get(outer, 0)
            for i, inner in enumerate(STACKED_LABELS):
                assert matrix.counts[o][i] == counts.get((outer, inner), 0)
                assert matrix.probs[o][i] == pytest.approx(probs.get((outer, inner), 0.0), abs=1e-9)


def test_synthesized_equals_bruteforce_on_random_corpora():
    rng = random.Random(55130)
    for _ in range(20):
        corpus = random_corpus(rng)
        matrix = synthesized_matrix(corpus)
        co, containing, probs = oracle_synthesized(corpus)
        for a_i, a in enumerate(SYNTH_LABELS):
            assert matrix.denominators[a_i] == containing.get(a, 0)
            for b_i, b in enumerate(SYNTH_LABELS):
                assert matrix.counts[a_i][b_i] == co.get((a, b), 0)
                assert matrix.probs[a_i][b_i] == pytest.approx(probs.get((a, b), 0.0), abs=1e-9)


def test_stacked_rows_are_stochastic():
    rng = random.Random(777)
    for _ in range(10):
        matrix = stacked_matrix(random_corpus(rng))
        for o in range(len(matrix.labels)):
            row_total = sum(matrix.counts[o])
            if row_total:
                assert sum(matrix.probs[o]) == pytest.approx(1.0, abs=1e-9)


def test_start_row_and_end_column_count_every_config():
    rng = random.Random(31337)
    corpus = random_corpus(rng, max_configs=8)
    matrix = stacked_matrix(corpus)
    start_row = matrix.counts[matrix.labels.index("start")]
    end_column = [matrix.counts[o][matrix.labels.index("end")] for o in range(len(matrix.labels))]
    assert sum(start_row) == len(corpus)
    assert sum(end_column) == len(corpus)


def test_matrices_deterministic():
    rng = random.Random(99)
    corpus = random_corpus(rng)
    first = stacked_matrix(corpus)
    second = stacked_matrix(list(corpus))
    assert first.counts == second.counts
    assert first.probs == second.probs
    assert synthesized_matrix(corpus).to_json() == synthesized_matrix(list(corpus)).to_json()


def test_matrix_json_and_table_render():
    matrix = stacked_matrix(WORKED)
    payload = matrix.to_json()
    assert payload["labels"] == list(STACKED_LABELS)
    assert len(payload["counts"]) == len(STACKED_LABELS)
    table = matrix.to_table()
    assert "ideogram" in table and "start" in table


def test_distributions_json_keys_are_strings():
    payload = distributions(WORKED).to_json()
    assert payload["ringsPerPlot"] == {"3": 2}
    assert payload["tracksPerType"]["histogram"] == 3
