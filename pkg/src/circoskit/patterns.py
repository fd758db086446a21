"""Track-combination statistics over a corpus.

Two conditional-probability tables are computed: the stacked table over
adjacent ring pairs (with start/end boundary markers and multi-track rings
collapsed to a synthesized pseudo-type), and the synthesized table over
track-type co-occurrence inside single rings. Four distribution histograms
summarize corpus shape.
"""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass, field

from .corpus import Corpus, CorpusRecord, EmptyCorpusError
from .grammar import TRACK_NAMES, CircosConfig, Ring

__all__ = [
    "START_CLASS",
    "END_CLASS",
    "SYNTH_CLASS",
    "STACKED_LABELS",
    "SYNTH_LABELS",
    "ConditionalMatrix",
    "CorpusDistributions",
    "ring_class",
    "stacked_matrix",
    "synthesized_matrix",
    "distributions",
]

START_CLASS = "start"
END_CLASS = "end"
SYNTH_CLASS = "synth"

STACKED_LABELS: tuple[str, ...] = (START_CLASS, *TRACK_NAMES, SYNTH_CLASS, END_CLASS)
SYNTH_LABELS: tuple[str, ...] = TRACK_NAMES


def ring_class(ring: Ring) -> str:
    """A ring's class: its track kind, or synth for multi-track rings."""
    if len(ring.tracks) >= 2:
        return SYNTH_CLASS
    return ring.tracks[0].value


@dataclass
class ConditionalMatrix:
    """Counts and conditional probabilities over an ordered label set.

    ``probs[o][i] = counts[o][i] / denominators[o]`` (0 when the denominator
    is 0). For the stacked table the denominator is the row sum, so positive
    rows are stochastic; for the synthesized table it is the number of rings
    containing the row's type, so rows need not sum to 1.
    """

    labels: tuple[str, ...]
    counts: list[list[int]]
    denominators: list[int]
    probs: list[list[float]] = field(default_factory=list)

    def __post_init__(self) -> None:
        if not self.probs:
            self.probs = [
                [
                    (self.counts[o][i] / self.denominators[o]) if self.denominators[o] else 0.0
                    for i in range(len(self.labels))
                ]
                for o in range(len(self.labels))
            ]

    def _index(self, label: str) -> int:
        return self.labels.index(label)

    def count(self, outer: str, inner: str) -> int:
        return self.counts[self._index(outer)][self._index(inner)]

    def prob(self, outer: str, inner: str) -> float:
        return self.probs[self._index(outer)][self._index(inner)]

    def to_json(self) -> dict:
        return {
            "labels": list(self.labels),
            "counts": [list(row) for row in self.counts],
            "denominators": list(self.denominators),
            "probs": [list(row) for row in self.probs],
        }

    def to_table(self, digits: int = 3) -> str:
        """Aligned text table of the probabilities."""
        width = max(len(label) for label in self.labels) + 1
        width = max(width, digits + 3)
        header = " " * width + "".join(label.rjust(width) for label in self.labels)
        lines = [header]
        for o, label in enumerate(self.labels):
            cells = "".join(f"{self.probs[o][i]:.{digits}f}".rjust(width) for i in range(len(self.labels)))
            lines.append(label.rjust(width) + cells)
        return "\n".join(lines)


@dataclass
class CorpusDistributions:
    rings_per_plot: dict[int, int]
    track_types_per_plot: dict[int, int]
    tracks_per_ring: dict[int, int]
    tracks_per_type: dict[str, int]

    def to_json(self) -> dict:
        return {
            "ringsPerPlot": {str(k): v for k, v in sorted(self.rings_per_plot.items())},
            "trackTypesPerPlot": {str(k): v for k, v in sorted(self.track_types_per_plot.items())},
            "tracksPerRing": {str(k): v for k, v in sorted(self.tracks_per_ring.items())},
            "tracksPerType": {k: self.tracks_per_type[k] for k in TRACK_NAMES if k in self.tracks_per_type},
        }


def _configs(corpus: Corpus | list[CorpusRecord] | list[CircosConfig], operation: str) -> list[CircosConfig]:
    if isinstance(corpus, Corpus):
        items: list = corpus.records()
    else:
        items = list(corpus)
    configs = [item.config if isinstance(item, CorpusRecord) else item for item in items]
    if not configs:
        raise EmptyCorpusError(operation)
    return configs


def stacked_class_walk(config: CircosConfig) -> list[str]:
    """Ring classes with the start/end boundary markers attached."""
    return [START_CLASS, *(ring_class(ring) for ring in config.rings), END_CLASS]


def stacked_matrix(corpus: Corpus | list) -> ConditionalMatrix:
    """P(inner type | outer type) over adjacent ring pairs."""
    configs = _configs(corpus, "stacked_matrix")
    index = {label: i for i, label in enumerate(STACKED_LABELS)}
    counts = [[0] * len(STACKED_LABELS) for _ in STACKED_LABELS]
    for config in configs:
        walk = stacked_class_walk(config)
        for outer, inner in zip(walk, walk[1:]):
            counts[index[outer]][index[inner]] += 1
    denominators = [sum(row) for row in counts]
    return ConditionalMatrix(labels=STACKED_LABELS, counts=counts, denominators=denominators)


def synthesized_matrix(corpus: Corpus | list) -> ConditionalMatrix:
    """P(type B co-occurs | type A present) over individual rings.

    counts[A][B] is the number of rings holding at least one A and one B
    (two As when A == B); the denominator is the number of rings holding A.
    """
    configs = _configs(corpus, "synthesized_matrix")
    index = {label: i for i, label in enumerate(SYNTH_LABELS)}
    counts = [[0] * len(SYNTH_LABELS) for _ in SYNTH_LABELS]
    denominators = [0] * len(SYNTH_LABELS)
    for config in configs:
        for ring in config.rings:
            multiplicity = Counter(track.value for track in ring.tracks)
            for a, count_a in multiplicity.items():
                denominators[index[a]] += 1
                for b, count_b in multiplicity.items():
                    if a == b and count_a < 2:
                        continue
                    counts[index[a]][index[b]] += 1
    return ConditionalMatrix(labels=SYNTH_LABELS, counts=counts, denominators=denominators)


def distributions(corpus: Corpus | list) -> CorpusDistributions:
    configs = _configs(corpus, "distributions")
    rings_per_plot: Counter = Counter()
    track_types_per_plot: Counter = Counter()
    tracks_per_ring: Counter = Counter()
    tracks_per_type: Counter = Counter()
    for config in configs:
        rings_per_plot[len(config.rings)] += 1
        kinds = {track.value for ring in config.rings for track in ring.tracks}
        track_types_per_plot[len(kinds)] += 1
        for ring in config.rings:
            tracks_per_ring[len(ring.tracks)] += 1
            for track in ring.tracks:
                tracks_per_type[track.value] += 1
    return CorpusDistributions(
        rings_per_plot=dict(rings_per_plot),
        track_types_per_plot=dict(track_types_per_plot),
        tracks_per_ring=dict(tracks_per_ring),
        tracks_per_type=dict(tracks_per_type),
    )
