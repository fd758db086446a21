"""circoskit: corpus-driven authoring engine for circos-plot configurations."""

from .grammar import (
    CircosConfig,
    ConfigError,
    EmptyRingError,
    MisplacedStructuralError,
    Ring,
    TrackKind,
    UnknownTokenError,
    from_sequence,
    parse,
    serialize,
    to_sequence,
)

__version__ = "0.1.0"

__all__ = [
    "CircosConfig",
    "ConfigError",
    "EmptyRingError",
    "MisplacedStructuralError",
    "Ring",
    "TrackKind",
    "UnknownTokenError",
    "from_sequence",
    "parse",
    "serialize",
    "to_sequence",
    "__version__",
]
