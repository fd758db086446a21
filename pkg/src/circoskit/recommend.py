"""Retrieval-augmented configuration recommendation.

A prompt bundle is assembled from system knowledge, retrieved corpus
examples, pattern guidelines, the user's requirements, and the existing
design; a pluggable generation provider produces text from which the first
valid token string is extracted, parsed, and returned. Invalid output
triggers a bounded repair loop that feeds the error back to the provider.
"""

from __future__ import annotations

import hashlib
import re
from dataclasses import dataclass, field, replace

import requests

from .corpus import Corpus, CorpusRecord, EmptyCorpusError
from .grammar import (
    END,
    SPLIT,
    START,
    TRACK_NAMES,
    CircosConfig,
    ConfigError,
    parse,
    serialize,
)
from .patterns import ConditionalMatrix
from .retrieval import (
    EmbeddingProvider,
    ProviderUnavailableError,
    RetrievalHit,
    VectorIndex,
    index_build,
    semantic_search,
)

__all__ = [
    "TASK_INTRO",
    "CONSTRAINT_SENTENCE",
    "PromptBundle",
    "Recommendation",
    "GenerationProvider",
    "MockGenerationProvider",
    "RemoteGenerationProvider",
    "GenerationInvalidError",
    "assemble_prompt",
    "extract_config_span",
    "Recommender",
]

TASK_INTRO = (
    "You are an expert of Genomics Visualization. "
    "Your job is to recommend Circos plot configurations that meet users' needs."
)

CONSTRAINT_SENTENCE = "You can only use the tokens listed below, and you cannot use any custom tokens"

_LAYOUT_GUIDELINE = (
    "If a ring includes many tracks, it is usually placed in the front of the sequence "
    "(i.e., the outer side) to avoid visual confusion."
)

_BACKGROUND = (
    "A circos plot is a set of concentric rings around a shared genomic axis, ordered from "
    "outside to inside. Each ring holds one or more tracks; several tracks in one ring share "
    "the same radii. A configuration is written as angle-bracketed track tokens with rings "
    f"separated by <{SPLIT}>, e.g. <ideogram><{SPLIT}><histogram><{SPLIT}><chord>."
)

_TOKEN_RE = re.compile(r"<\s*([A-Za-z_]+)\s*>")
_VALID_SPAN_NAMES = frozenset(TRACK_NAMES) | {START, SPLIT, END, "heatmaps", "circos_end"}


class GenerationInvalidError(RuntimeError):
    """Every generation attempt produced output with no parseable config."""

    def __init__(self, attempts: list[str]):
        super().__init__(f"no valid configuration after {len(attempts)} attempt(s)")
        self.attempts = attempts


class NotFoundError(KeyError):
    def __init__(self, rec_id: str):
        super().__init__(rec_id)
        self.rec_id = rec_id

    def __str__(self) -> str:
        return f"no recommendation {self.rec_id!r}"


@dataclass(frozen=True)
class PromptBundle:
    system: str
    examples: tuple[tuple[str, str], ...]  # (annotation, bare config string)
    requirements: str
    existing_design: str | None = None
    repair_notes: tuple[str, ...] = ()

    def user_text(self) -> str:
        parts = []
        if self.examples:
            lines = ["Examples:"]
            for number, (annotation, config_text) in enumerate(self.examples, start=1):
                lines.append(f"{number}. {annotation}\n   configuration: {config_text}")
            parts.append("\n".join(lines))
        parts.append(f"Requirements: {self.requirements}")
        if self.existing_design is not None:
            parts.append(f"Existing design: {self.existing_design}")
        for note in self.repair_notes:
            parts.append(note)
        return "\n\n".join(parts)

    def messages(self) -> list[dict]:
        return [{"role": "user", "content": self.user_text()}]


@dataclass(frozen=True)
class Recommendation:
    rec_id: str
    config: CircosConfig
    raw: str
    explanation: str
    references: tuple[str, ...]
    attempts: int
    seed: int
    query: str

    def config_string(self) -> str:
        return serialize(self.config)


class GenerationProvider:
    """Contract: generate(prompt, seed) -> provider text."""

    def generate(self, prompt: PromptBundle, seed: int = 0) -> str:
        raise NotImplementedError


class MockGenerationProvider(GenerationProvider):
    """Deterministic provider, pure in (prompt, seed).

    With scripted responses, the reply is picked by the attempt number (the
    count of repair notes in the prompt), so a repair loop walks the script.
    Without a script, a retrieved example configuration is echoed back, the
    choice keyed by seed.
    """

    def __init__(self, responses: list[str] | None = None):
        self.responses = list(responses) if responses else None

    def generate(self, prompt: PromptBundle, seed: int = 0) -> str:
        if self.responses is not None:
            attempt = len(prompt.repair_notes)
            return self.responses[min(attempt, len(self.responses) - 1)]
        if prompt.examples:
            digest = hashlib.sha256(f"{seed}".encode()).digest()
            pick = digest[0] % len(prompt.examples)
            annotation, config_text = prompt.examples[pick]
            return (
                f"Based on a similar published design ({annotation[:60]}), "
                f"I recommend: {config_text}"
            )
        return "I recommend: <ideogram><split><histogram><split><chord>"


class RemoteGenerationProvider(GenerationProvider):
    """HTTP provider: POST {system, messages, seed?} -> {"text": ...}."""

    def __init__(self, url: str, api_key: str | None = None, timeout: float = 30.0,
                 session: requests.Session | None = None):
        self.url = url
        self.api_key = api_key
        self.timeout = timeout
        self._session = session or requests.Session()

    def generate(self, prompt: PromptBundle, seed: int = 0) -> str:
        headers = {}
        if self.api_key:
            headers["Authorization"] = f"Bearer {self.api_key}"
        body = {"system": prompt.system, "messages": prompt.messages(), "seed": seed}
        try:
            response = self._session.post(self.url, json=body, headers=headers, timeout=self.timeout)
            response.raise_for_status()
            payload = response.json()
        except (requests.RequestException, ValueError) as exc:
            raise ProviderUnavailableError(f"generation endpoint {self.url}: {exc}") from exc
        text = payload.get("text")
        if not isinstance(text, str):
            raise ProviderUnavailableError(f"generation endpoint {self.url}: malformed response")
        return text


def _pattern_guidelines(stacked: ConditionalMatrix | None, per_outer: int = 5) -> list[str]:
    """Render the strongest adjacency transitions as prompt guidance."""
    if stacked is None:
        return []
    lines = []
    for o, outer in enumerate(stacked.labels):
        if outer == "end" or stacked.denominators[o] == 0:
            continue
        ranked = sorted(
            ((stacked.probs[o][i], inner) for i, inner in enumerate(stacked.labels) if stacked.probs[o][i] > 0),
            key=lambda item: (-item[0], item[1]),
        )[:per_outer]
        if not ranked:
            continue
        rendered = ", ".join(f"<{inner}> ({prob:.2f})" for prob, inner in ranked)
        lines.append(f"after <{outer}>: {rendered}")
    if not lines:
        return []
    return ["Common adjacent-ring transitions observed in published plots:"] + lines


def assemble_prompt(
    query: str,
    hits: list[RetrievalHit],
    records_by_id: dict[str, CorpusRecord],
    existing: CircosConfig | None = None,
    stacked: ConditionalMatrix | None = None,
    k: int = 10,
) -> PromptBundle:
    """Build the provider prompt; examples are the top-k hits in rank order."""
    examples = tuple(
        (records_by_id[hit.record_id].annotation, serialize(records_by_id[hit.record_id].config))
        for hit in hits[:k]
    )
    token_list = ", ".join(f"<{name}>" for name in TRACK_NAMES)
    system_parts = [
        TASK_INTRO,
        _BACKGROUND,
        f"{CONSTRAINT_SENTENCE}: {token_list}. "
        f"Separate rings with <{SPLIT}>.",
        _LAYOUT_GUIDELINE,
    ]
    system_parts.extend(_pattern_guidelines(stacked))
    existing_text = serialize(existing) if existing is not None and existing.rings else None
    return PromptBundle(
        system="\n\n".join(system_parts),
        examples=examples,
        requirements=query,
        existing_design=existing_text,
    )


def extract_config_span(text: str) -> str | None:
    """Pick the best contiguous run of vocabulary tokens in provider text.

    Runs are ranked longest first (ties: earliest); the first run that
    parses wins, so an inline token mention in prose never beats the actual
    configuration string.
    """
    runs: list[tuple[int, int, str]] = []  # (-token_count, start, span_text)
    matches = list(_TOKEN_RE.finditer(text))
    i = 0
    while i < len(matches):
        if matches[i].group(1).lower() not in _VALID_SPAN_NAMES:
            i += 1
            continue
        j = i
        while (
            j + 1 < len(matches)
            and matches[j + 1].group(1).lower() in _VALID_SPAN_NAMES
            and text[matches[j].end() : matches[j + 1].start()].strip() == ""
        ):
            j += 1
        runs.append((-(j - i + 1), matches[i].start(), text[matches[i].start() : matches[j].end()]))
        i = j + 1
    for _, _, span in sorted(runs):
        try:
            parse(span)
        except ConfigError:
            continue
        return span
    return None


@dataclass
class _RecommendationContext:
    bundle: PromptBundle  # without repair notes
    references: tuple[str, ...]
    query: str


@dataclass
class Recommender:
    """Glues retrieval, prompt assembly, and generation; keeps history."""

    corpus: Corpus
    embedder: EmbeddingProvider
    generator: GenerationProvider
    index: VectorIndex | None = None
    stacked: ConditionalMatrix | None = None
    max_attempts: int = 3
    history: dict[str, Recommendation] = field(default_factory=dict)
    _contexts: dict[str, _RecommendationContext] = field(default_factory=dict)
    _counter: int = 0

    def ensure_index(self) -> VectorIndex:
        """Build (or rebuild) the vector index when missing or stale."""
        if self.index is None or self.index.corpus_version != self.corpus.version:
            self.index = index_build(self.corpus, self.embedder)
        return self.index

    def recommend(
        self,
        query: str,
        existing: CircosConfig | None = None,
        k: int = 10,
        seed: int = 0,
    ) -> Recommendation:
        if len(self.corpus) == 0:
            raise EmptyCorpusError("recommend")
        index = self.ensure_index()
        hits = semantic_search(index, query, self.embedder, k=k, corpus_version=self.corpus.version)
        records_by_id = {hit.record_id: self.corpus.get(hit.record_id) for hit in hits}
        bundle = assemble_prompt(query, hits, records_by_id, existing=existing, stacked=self.stacked, k=k)
        references = tuple(hit.record_id for hit in hits)
        return self._generate(bundle, references, query, seed)

    def regenerate(self, rec_id: str) -> Recommendation:
        """Same retrieved context, next seed; appended to history."""
        if rec_id not in self.history:
            raise NotFoundError(rec_id)
        previous = self.history[rec_id]
        context = self._contexts[rec_id]
        return self._generate(context.bundle, context.references, context.query, previous.seed + 1)

    def _generate(
        self, bundle: PromptBundle, references: tuple[str, ...], query: str, seed: int
    ) -> Recommendation:
        raws: list[str] = []
        attempt_bundle = bundle
        for attempt in range(1, self.max_attempts + 1):
            raw = self.generator.generate(attempt_bundle, seed)
            raws.append(raw)
            span = extract_config_span(raw)
            if span is not None:
                config = parse(span)
                self._counter += 1
                rec_id = f"rec-{self._counter}"
                explanation = (raw.replace(span, "", 1)).strip()
                recommendation = Recommendation(
                    rec_id=rec_id,
                    config=config,
                    raw=raw,
                    explanation=explanation,
                    references=references,
                    attempts=attempt,
                    seed=seed,
                    query=query,
                )
                self.history[rec_id] = recommendation
                self._contexts[rec_id] = _RecommendationContext(bundle=bundle, references=references, query=query)
                return recommendation
            note = (
                f"Your previous reply did not contain a valid token string "
                f"(reply {attempt} of {self.max_attempts}). Answer with one configuration "
                f"using only the listed tokens, rings separated by <{SPLIT}>."
            )
            attempt_bundle = replace(attempt_bundle, repair_notes=attempt_bundle.repair_notes + (note,))
        raise GenerationInvalidError(raws)
