"""Token language for circos-plot configurations.

A configuration is an ordered list of rings (outermost first); each ring is a
non-empty ordered list of track tokens. The serialized form is a string of
angle-bracketed tokens with rings separated by ``<split>``, optionally wrapped
in ``<start>``...``<end>``. The wrapped form is the canonical stored form;
the bare form is the chat/display form. The parser accepts both.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum

__all__ = [
    "TrackKind",
    "Ring",
    "CircosConfig",
    "ConfigError",
    "UnknownTokenError",
    "EmptyRingError",
    "MisplacedStructuralError",
    "START",
    "SPLIT",
    "END",
    "TRACK_NAMES",
    "parse",
    "serialize",
    "canonical",
    "to_sequence",
    "from_sequence",
    "wrapped_sequence",
]


class TrackKind(str, Enum):
    """The nine track tokens; no custom tokens exist."""

    IDEOGRAM = "ideogram"
    HIGHLIGHT = "highlight"
    LINE = "line"
    SCATTER = "scatter"
    HISTOGRAM = "histogram"
    HEATMAP = "heatmap"
    TILE = "tile"
    CHORD = "chord"
    OTHERS = "others"

    def __str__(self) -> str:
        return self.value


TRACK_NAMES: tuple[str, ...] = tuple(kind.value for kind in TrackKind)

START = "start"
SPLIT = "split"
END = "end"

# Input spellings folded to canonical token names before vocabulary lookup.
_ALIASES = {
    "heatmaps": "heatmap",
    "circos_end": "end",
}

_VOCABULARY = frozenset(TRACK_NAMES) | {START, SPLIT, END}


class ConfigError(ValueError):
    """Base class for token-language errors."""


class UnknownTokenError(ConfigError):
    def __init__(self, name: str, offset: int):
        super().__init__(f"unknown token {name!r} at byte offset {offset}")
        self.name = name
        self.offset = offset


class EmptyRingError(ConfigError):
    def __init__(self, offset: int):
        super().__init__(f"empty ring at byte offset {offset}")
        self.offset = offset


class MisplacedStructuralError(ConfigError):
    def __init__(self, name: str, offset: int):
        super().__init__(f"<{name}> only allowed at the config boundary (byte offset {offset})")
        self.name = name
        self.offset = offset


@dataclass(frozen=True)
class Ring:
    """One concentric band; two or more tracks means a synthesized ring."""

    tracks: tuple[TrackKind, ...]

    def __post_init__(self) -> None:
        if not self.tracks:
            raise EmptyRingError(0)

    @property
    def synthesized(self) -> bool:
        return len(self.tracks) > 1


@dataclass(frozen=True)
class CircosConfig:
    """Ordered rings, index 0 outermost. Empty only for a blank session."""

    rings: tuple[Ring, ...] = ()

    def __bool__(self) -> bool:
        return bool(self.rings)

    def track_count(self) -> int:
        return sum(len(ring.tracks) for ring in self.rings)


@dataclass(frozen=True)
class _RawToken:
    name: str  # canonical, vocabulary-checked
    offset: int  # byte offset of the token's "<" in the input


def _normalize(name: str, raw: str, offset: int) -> str:
    folded = _ALIASES.get(name, name)
    if folded not in _VOCABULARY:
        raise UnknownTokenError(raw, offset)
    return folded


def _scan(text: str) -> list[_RawToken]:
    tokens: list[_RawToken] = []
    i = 0
    byte_offset = 0
    n = len(text)
    while i < n:
        ch = text[i]
        if ch.isspace():
            byte_offset += len(ch.encode("utf-8"))
            i += 1
            continue
        if ch == "<":
            close = text.find(">", i + 1)
            if close == -1:
                raise UnknownTokenError(text[i:], byte_offset)
            raw = text[i + 1 : close]
            name = _normalize(raw.strip().lower(), raw, byte_offset)
            tokens.append(_RawToken(name, byte_offset))
            byte_offset += len(text[i : close + 1].encode("utf-8"))
            i = close + 1
        else:
            j = i
            while j < n and not text[j].isspace() and text[j] != "<":
                j += 1
            raise UnknownTokenError(text[i:j], byte_offset)
    return tokens


def parse(text: str) -> CircosConfig:
    """Parse a token string, bare or wrapped, into a config.

    Raises UnknownTokenError, EmptyRingError, or MisplacedStructuralError;
    never returns a partial config.
    """
    tokens = _scan(text)
    if tokens and tokens[0].name == START:
        tokens = tokens[1:]
    if tokens and tokens[-1].name == END:
        tokens = tokens[:-1]
    for token in tokens:
        if token.name in (START, END):
            raise MisplacedStructuralError(token.name, token.offset)
    if not tokens:
        return CircosConfig()

    rings: list[Ring] = []
    current: list[TrackKind] = []
    for token in tokens:
        if token.name == SPLIT:
            if not current:
                raise EmptyRingError(token.offset)
            rings.append(Ring(tuple(current)))
            current = []
        else:
            current.append(TrackKind(token.name))
    if not current:  # trailing <split>
        raise EmptyRingError(tokens[-1].offset)
    rings.append(Ring(tuple(current)))
    return CircosConfig(tuple(rings))


def serialize(config: CircosConfig, wrapped: bool = False) -> str:
    """Emit canonical lowercase token text; rings joined by <split>."""
    body = f"<{SPLIT}>".join(
        "".join(f"<{track.value}>" for track in ring.tracks) for ring in config.rings
    )
    if wrapped:
        return f"<{START}>{body}<{END}>"
    return body


def canonical(text: str, wrapped: bool = False) -> str:
    """Canonical form of a token string: serialize(parse(text))."""
    return serialize(parse(text), wrapped=wrapped)


def to_sequence(config: CircosConfig) -> tuple[str, ...]:
    """Flatten to track-token names with a split between consecutive rings."""
    parts: list[str] = []
    for index, ring in enumerate(config.rings):
        if index:
            parts.append(SPLIT)
        parts.extend(track.value for track in ring.tracks)
    return tuple(parts)


def from_sequence(tokens: tuple[str, ...] | list[str]) -> CircosConfig:
    """Inverse of to_sequence; offsets in errors are sequence indices."""
    rings: list[Ring] = []
    current: list[TrackKind] = []
    for index, name in enumerate(tokens):
        if name == SPLIT:
            if not current:
                raise EmptyRingError(index)
            rings.append(Ring(tuple(current)))
            current = []
        elif name in (START, END):
            raise MisplacedStructuralError(name, index)
        elif name in TRACK_NAMES:
            current.append(TrackKind(name))
        else:
            raise UnknownTokenError(name, index)
    if not tokens:
        return CircosConfig()
    if not current:
        raise EmptyRingError(len(tokens) - 1)
    rings.append(Ring(tuple(current)))
    return CircosConfig(tuple(rings))


def wrapped_sequence(config: CircosConfig) -> tuple[str, ...]:
    """Token walk including the start/end boundary markers."""
    return (START, *to_sequence(config), END)
