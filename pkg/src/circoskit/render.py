"""Deterministic SVG rendering of a plot session.

A session pairs a configuration with datasets and per-track style bindings.
Geometry: blocks map to angular ranges (clockwise from 12 o'clock), rings
to radial bands between the chord reserve and the outer radius, chord rings
to the central disc. Output is a standalone SVG 1.1 document with all
numbers fixed to three decimals, so identical sessions render to identical
bytes.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace

from .datasets import (
    KIND_ATTACHMENT,
    KIND_KARYOTYPE,
    KIND_LINK,
    AttachmentDataset,
    DatasetStore,
    KaryotypeDataset,
    LinkDataset,
)
from .grammar import CircosConfig, TrackKind

__all__ = [
    "AngularScale",
    "TrackStyle",
    "TrackBinding",
    "Canvas",
    "PlotSession",
    "EmptyKaryotypeError",
    "GapTooLargeError",
    "TooManyRingsError",
    "angular_scale",
    "radial_bands",
    "auto_bind",
    "render_svg",
    "pack_lanes",
    "compatible_kind",
]

KIND_DEFAULT_COLOR = {
    "ideogram": "#6b7280",
    "highlight": "#e15759",
    "line": "#4e79a7",
    "scatter": "#59a14f",
    "histogram": "#af7aa1",
    "heatmap": "#f28e2b",
    "tile": "#9c755f",
    "chord": "#76b7b2",
    "others": "#bab0ac",
}

# Fixed palette for qualitative values, keyed by first-seen order.
CATEGORICAL_PALETTE = (
    "#4e79a7",
    "#f28e2b",
    "#e15759",
    "#76b7b2",
    "#59a14f",
    "#edc948",
    "#b07aa1",
    "#ff9da7",
    "#9c755f",
    "#bab0ac",
)

MIN_BAND_THICKNESS = 2.0  # px
MARKER_RADIUS = 2.0  # px, scatter
CHORD_CONTROL_FACTOR = 0.2  # Bezier control radius as a fraction of the endpoint radius
RING_PADDING_FRACTION = 0.1  # inter-ring gap as a fraction of one band


class EmptyKaryotypeError(ValueError):
    def __init__(self) -> None:
        super().__init__("karyotype has no blocks")


class GapTooLargeError(ValueError):
    def __init__(self, gap: float, blocks: int):
        super().__init__(f"{blocks} gaps of {gap} degrees leave no room in 360")


class TooManyRingsError(ValueError):
    def __init__(self, rings: int, thickness: float):
        super().__init__(f"{rings} rings leave bands of {thickness:.2f}px (< {MIN_BAND_THICKNESS}px)")


@dataclass(frozen=True)
class AngularScale:
    """Per-block angular ranges in degrees, clockwise from 12 o'clock."""

    spans: dict[str, tuple[float, float]]
    lengths: dict[str, int]

    def __contains__(self, block_id: str) -> bool:
        return block_id in self.spans

    def angle_at(self, block_id: str, position: float) -> float:
        start, end = self.spans[block_id]
        length = self.lengths[block_id]
        fraction = position / length if length else 0.0
        return start + fraction * (end - start)


def angular_scale(karyotype: KaryotypeDataset, gap_degrees: float = 2.0) -> AngularScale:
    """Proportional spans with one gap after each block."""
    blocks = karyotype.blocks
    if not blocks:
        raise EmptyKaryotypeError()
    total_gap = gap_degrees * len(blocks)
    if total_gap >= 360.0:
        raise GapTooLargeError(gap_degrees, len(blocks))
    total_length = sum(block.length for block in blocks)
    available = 360.0 - total_gap
    spans: dict[str, tuple[float, float]] = {}
    lengths: dict[str, int] = {}
    cursor = 0.0
    for block in blocks:
        span = available * block.length / total_length
        spans[block.id] = (cursor, cursor + span)
        lengths[block.id] = block.length
        cursor += span + gap_degrees
    return AngularScale(spans=spans, lengths=lengths)


@dataclass
class TrackStyle:
    color: str | None = None  # None falls back to the kind default
    direction: str = "out"  # histogram growth: "out" or "in"
    domain: tuple[float, float] | None = None  # None = auto (dataset min/max)
    opacity: float = 1.0

    def to_json(self) -> dict:
        return {
            "color": self.color,
            "direction": self.direction,
            "domain": list(self.domain) if self.domain else None,
            "opacity": self.opacity,
        }

    @classmethod
    def from_json(cls, payload: dict) -> "TrackStyle":
        domain = payload.get("domain")
        return cls(
            color=payload.get("color"),
            direction=payload.get("direction", "out"),
            domain=tuple(domain) if domain else None,
            opacity=float(payload.get("opacity", 1.0)),
        )


@dataclass
class TrackBinding:
    ring: int
    pos: int
    dataset_id: str | None = None
    style: TrackStyle = field(default_factory=TrackStyle)

    def to_json(self, config: CircosConfig | None = None) -> dict:
        payload = {
            "ring": self.ring,
            "pos": self.pos,
            "datasetId": self.dataset_id,
            "style": self.style.to_json(),
        }
        if config is not None and self.ring < len(config.rings) and self.pos < len(config.rings[self.ring].tracks):
            payload["kind"] = config.rings[self.ring].tracks[self.pos].value
        return payload

    @classmethod
    def from_json(cls, payload: dict) -> "TrackBinding":
        return cls(
            ring=int(payload["ring"]),
            pos=int(payload["pos"]),
            dataset_id=payload.get("datasetId"),
            style=TrackStyle.from_json(payload.get("style") or {}),
        )


@dataclass
class Canvas:
    width: float = 800.0
    height: float = 800.0
    gap_degrees: float = 2.0
    outer_fraction: float = 0.45
    chord_reserve_fraction: float = 0.30

    def to_json(self) -> dict:
        return {
            "width": self.width,
            "height": self.height,
            "gapDegrees": self.gap_degrees,
            "outerFraction": self.outer_fraction,
            "chordReserveFraction": self.chord_reserve_fraction,
        }

    @classmethod
    def from_json(cls, payload: dict) -> "Canvas":
        return cls(
            width=float(payload.get("width", 800.0)),
            height=float(payload.get("height", 800.0)),
            gap_degrees=float(payload.get("gapDegrees", 2.0)),
            outer_fraction=float(payload.get("outerFraction", 0.45)),
            chord_reserve_fraction=float(payload.get("chordReserveFraction", 0.30)),
        )


@dataclass
class PlotSession:
    id: str
    config: CircosConfig = field(default_factory=CircosConfig)
    datasets: DatasetStore = field(default_factory=DatasetStore)
    bindings: list[TrackBinding] = field(default_factory=list)
    canvas: Canvas = field(default_factory=Canvas)

    def tracks(self) -> list[tuple[int, int, TrackKind]]:
        """(ring, pos, kind) in render order: outer ring first."""
        out = []
        for ring_index, ring in enumerate(self.config.rings):
            for pos, kind in enumerate(ring.tracks):
                out.append((ring_index, pos, kind))
        return out

    def binding_at(self, ring: int, pos: int) -> TrackBinding | None:
        for binding in self.bindings:
            if binding.ring == ring and binding.pos == pos:
                return binding
        return None


def compatible_kind(track: TrackKind) -> str:
    if track is TrackKind.CHORD:
        return KIND_LINK
    if track is TrackKind.IDEOGRAM:
        return KIND_KARYOTYPE
    return KIND_ATTACHMENT


def radial_bands(config: CircosConfig, canvas: Canvas) -> list[tuple[float, float]]:
    """(inner, outer) radius per ring; chord rings take the central disc.

    Non-chord rings share the annulus between the chord reserve and the
    outer radius with equal thickness and an inter-ring gap of 10% of one
    band.
    """
    if not config.rings:
        return []
    dimension = min(canvas.width, canvas.height)
    outer_radius = canvas.outer_fraction * dimension
    reserve = canvas.chord_reserve_fraction * dimension

    is_chord_ring = [any(track is TrackKind.CHORD for track in ring.tracks) for ring in config.rings]
    stacked_count = sum(1 for chord in is_chord_ring if not chord)
    bands: list[tuple[float, float]] = []
    if stacked_count:
        thickness = (outer_radius - reserve) / (stacked_count + RING_PADDING_FRACTION * (stacked_count - 1))
        if thickness < MIN_BAND_THICKNESS:
            raise TooManyRingsError(stacked_count, thickness)
        step = thickness * (1 + RING_PADDING_FRACTION)
    else:
        thickness = step = 0.0
    slot = 0
    for chord in is_chord_ring:
        if chord:
            bands.append((0.0, reserve))
        else:
            top = outer_radius - slot * step
            bands.append((top - thickness, top))
            slot += 1
    return bands


def auto_bind(session: PlotSession) -> list[str]:
    """Fill missing bindings; returns problems for tracks left unbound.

    Unused compatible datasets are preferred, in upload order; styles are
    copied from the nearest already-bound track of the same kind.
    """
    tracks = session.tracks()
    valid_positions = {(ring, pos) for ring, pos, _ in tracks}
    kind_by_position = {(ring, pos): kind for ring, pos, kind in tracks}

    kept: list[TrackBinding] = []
    for binding in session.bindings:
        key = (binding.ring, binding.pos)
        if key not in valid_positions:
            continue
        if binding.dataset_id is not None:
            if binding.dataset_id not in session.datasets:
                binding = replace_binding(binding, dataset_id=None)
            elif session.datasets.get(binding.dataset_id).kind != compatible_kind(kind_by_position[key]):
                binding = replace_binding(binding, dataset_id=None)
        kept.append(binding)
    session.bindings = kept

    problems: list[str] = []
    used = {binding.dataset_id for binding in session.bindings if binding.dataset_id}
    flat_index = {(ring, pos): i for i, (ring, pos, _) in enumerate(tracks)}

    for ring, pos, kind in tracks:
        binding = session.binding_at(ring, pos)
        if binding is not None and binding.dataset_id is not None:
            continue
        wanted = compatible_kind(kind)
        candidates = session.datasets.of_kind(wanted)
        unused = [dataset for dataset in candidates if dataset.dataset_id not in used]
        chosen = unused[0] if unused else (candidates[0] if candidates else None)

        if binding is None:
            binding = TrackBinding(ring=ring, pos=pos, style=_inherited_style(session, kind, flat_index[(ring, pos)]))
            session.bindings.append(binding)
        if chosen is None:
            problems.append(f"no compatible {wanted} dataset for ring {ring} pos {pos} (<{kind.value}>)")
            continue
        binding.dataset_id = chosen.dataset_id
        used.add(chosen.dataset_id)

    session.bindings.sort(key=lambda binding: (binding.ring, binding.pos))
    return problems


def replace_binding(binding: TrackBinding, **changes) -> TrackBinding:
    return replace(binding, **changes)


def _inherited_style(session: PlotSession, kind: TrackKind, flat: int) -> TrackStyle:
    """Copy the style of the nearest same-kind bound track, else defaults."""
    tracks = session.tracks()
    flat_index = {(ring, pos): i for i, (ring, pos, _) in enumerate(tracks)}
    best: tuple[int, int, TrackStyle] | None = None
    for binding in session.bindings:
        key = (binding.ring, binding.pos)
        if key not in flat_index:
            continue
        ring, pos, other_kind = tracks[flat_index[key]]
        if other_kind is not kind:
            continue
        distance = abs(flat_index[key] - flat)
        rank = (distance, flat_index[key])
        if best is None or rank < (best[0], best[1]):
            best = (distance, flat_index[key], binding.style)
    if best is not None:
        style = best[2]
        return TrackStyle(color=style.color, direction=style.direction, domain=style.domain, opacity=style.opacity)
    return TrackStyle(color=KIND_DEFAULT_COLOR[kind.value])


# -- SVG emission --------------------------------------------------------


def _fmt(value: float) -> str:
    text = f"{value:.3f}"
    return "0.000" if text == "-0.000" else text


def _point(cx: float, cy: float, angle_deg: float, radius: float) -> tuple[float, float]:
    a = math.radians(angle_deg)
    return cx + radius * math.sin(a), cy - radius * math.cos(a)


def _arc(cx: float, cy: float, a0: float, a1: float, radius: float, sweep: int) -> str:
    """Arc command from angle a0 to a1 at a fixed radius."""
    x, y = _point(cx, cy, a1, radius)
    large = 1 if abs(a1 - a0) > 180.0 else 0
    return f"A {_fmt(radius)} {_fmt(radius)} 0 {large} {sweep} {_fmt(x)} {_fmt(y)}"


def _sector_path(cx: float, cy: float, a0: float, a1: float, r_in: float, r_out: float) -> str:
    """Annular sector path; full-circle spans are split into two arcs."""
    if a1 - a0 >= 360.0 - 1e-9:
        mid = a0 + (a1 - a0) / 2
        x0, y0 = _point(cx, cy, a0, r_out)
        x3, y3 = _point(cx, cy, a1, r_in)
        return " ".join(
            [
                f"M {_fmt(x0)} {_fmt(y0)}",
                _arc(cx, cy, a0, mid, r_out, 1),
                _arc(cx, cy, mid, a1, r_out, 1),
                f"L {_fmt(x3)} {_fmt(y3)}",
                _arc(cx, cy, a1, mid, r_in, 0),
                _arc(cx, cy, mid, a0, r_in, 0),
                "Z",
            ]
        )
    x0, y0 = _point(cx, cy, a0, r_out)
    x2, y2 = _point(cx, cy, a1, r_in)
    return " ".join(
        [
            f"M {_fmt(x0)} {_fmt(y0)}",
            _arc(cx, cy, a0, a1, r_out, 1),
            f"L {_fmt(x2)} {_fmt(y2)}",
            _arc(cx, cy, a1, a0, r_in, 0),
            "Z",
        ]
    )


def _ribbon_path(cx, cy, src: tuple[float, float], dst: tuple[float, float], radius: float) -> str:
    """Chord ribbon: two endpoint arcs joined by cubic Bezier curves."""
    control_radius = CHORD_CONTROL_FACTOR * radius
    sa0, sa1 = src
    da0, da1 = dst
    p0 = _point(cx, cy, sa0, radius)
    p2 = _point(cx, cy, da0, radius)
    p3 = _point(cx, cy, da1, radius)
    c1 = _point(cx, cy, sa1, control_radius)
    c2 = _point(cx, cy, da0, control_radius)
    c3 = _point(cx, cy, da1, control_radius)
    c0 = _point(cx, cy, sa0, control_radius)
    return " ".join(
        [
            f"M {_fmt(p0[0])} {_fmt(p0[1])}",
            _arc(cx, cy, sa0, sa1, radius, 1),
            f"C {_fmt(c1[0])} {_fmt(c1[1])} {_fmt(c2[0])} {_fmt(c2[1])} {_fmt(p2[0])} {_fmt(p2[1])}",
            _arc(cx, cy, da0, da1, radius, 1),
            f"C {_fmt(c3[0])} {_fmt(c3[1])} {_fmt(c0[0])} {_fmt(c0[1])} {_fmt(p0[0])} {_fmt(p0[1])}",
            "Z",
        ]
    )


def _hex_to_rgb(color: str) -> tuple[int, int, int]:
    color = color.lstrip("#")
    if len(color) == 3:
        color = "".join(ch * 2 for ch in color)
    try:
        return int(color[0:2], 16), int(color[2:4], 16), int(color[4:6], 16)
    except ValueError:
        return (128, 128, 128)


def _ramp(color: str, fraction: float) -> str:
    """Linear white-to-color ramp."""
    r, g, b = _hex_to_rgb(color)
    mix = lambda channel: round(255 + (channel - 255) * fraction)  # noqa: E731
    return f"#{mix(r):02x}{mix(g):02x}{mix(b):02x}"


def _auto_domain(values: list[float], style: TrackStyle) -> tuple[float, float]:
    if style.domain is not None:
        return style.domain
    if not values:
        return (0.0, 1.0)
    return (min(values), max(values))


def _norm(value: float | str, domain: tuple[float, float]) -> float:
    if isinstance(value, str):
        return 0.5
    low, high = domain
    if high == low:
        return 0.5
    return min(1.0, max(0.0, (value - low) / (high - low)))


def pack_lanes(intervals: list[tuple[float, float]]) -> tuple[list[int], int]:
    """Greedy first-fit: each interval takes the first lane that ended before it starts."""
    lane_ends: list[float] = []
    assignment: list[int] = []
    for start, end in intervals:
        placed = None
        for lane, last_end in enumerate(lane_ends):
            if last_end < start:
                placed = lane
                break
        if placed is None:
            lane_ends.append(end)
            assignment.append(len(lane_ends) - 1)
        else:
            lane_ends[placed] = end
            assignment.append(placed)
    return assignment, max(1, len(lane_ends))


class _QualitativeColors:
    """Palette keyed by first-seen category order."""

    def __init__(self) -> None:
        self._seen: dict[str, str] = {}

    def color(self, category: str) -> str:
        if category not in self._seen:
            self._seen[category] = CATEGORICAL_PALETTE[len(self._seen) % len(CATEGORICAL_PALETTE)]
        return self._seen[category]


def _active_karyotype(session: PlotSession) -> KaryotypeDataset | None:
    """The karyotype bound to the first ideogram track, else the first uploaded."""
    for ring, pos, kind in session.tracks():
        if kind is TrackKind.IDEOGRAM:
            binding = session.binding_at(ring, pos)
            if binding and binding.dataset_id and binding.dataset_id in session.datasets:
                dataset = session.datasets.get(binding.dataset_id)
                if isinstance(dataset, KaryotypeDataset):
                    return dataset
    karyotypes = session.datasets.of_kind(KIND_KARYOTYPE)
    return karyotypes[0] if karyotypes else None


def render_svg(session: PlotSession) -> str:
    """Render the session to a standalone SVG 1.1 document (deterministic)."""
    canvas = session.canvas
    cx, cy = canvas.width / 2, canvas.height / 2
    lines = [
        '<?xml version="1.0" encoding="UTF-8"?>',
        f'<svg xmlns="http://www.w3.org/2000/svg" version="1.1" '
        f'width="{_fmt(canvas.width)}" height="{_fmt(canvas.height)}" '
        f'viewBox="0 0 {_fmt(canvas.width)} {_fmt(canvas.height)}">',
    ]
    karyotype = _active_karyotype(session)
    if not session.config.rings:
        lines.append("  <!-- blank session: no rings configured -->")
    elif karyotype is None:
        lines.append("  <!-- no karyotype dataset: nothing to render -->")
    else:
        scale = angular_scale(karyotype, canvas.gap_degrees)
        bands = radial_bands(session.config, canvas)
        for ring_index, ring in enumerate(session.config.rings):
            band = bands[ring_index]
            lines.append(f'  <g id="ring-{ring_index}" class="ring">')
            for pos, kind in enumerate(ring.tracks):
                binding = session.binding_at(ring_index, pos)
                if binding is None or binding.dataset_id is None or binding.dataset_id not in session.datasets:
                    lines.append(
                        f"    <!-- unbound track ring {ring_index} pos {pos} (<{kind.value}>): skipped -->"
                    )
                    continue
                dataset = session.datasets.get(binding.dataset_id)
                lines.append(
                    f'    <g class="track track-{kind.value}" data-ring="{ring_index}" '
                    f'data-pos="{pos}" data-dataset="{dataset.dataset_id}">'
                )
                lines.extend(
                    "      " + element
                    for element in _render_track(kind, binding, dataset, band, scale, cx, cy)
                )
                lines.append("    </g>")
            lines.append("  </g>")
    lines.append("</svg>")
    return "\n".join(lines) + "\n"


def _render_track(kind, binding, dataset, band, scale, cx, cy) -> list[str]:
    style = binding.style
    color = style.color or KIND_DEFAULT_COLOR[kind.value]
    opacity = style.opacity
    r_in, r_out = band
    thickness = r_out - r_in
    elements: list[str] = []

    if kind is TrackKind.IDEOGRAM:
        if not isinstance(dataset, KaryotypeDataset):
            return ["<!-- ideogram track without karyotype data -->"]
        for block in dataset.blocks:
            if block.id not in scale:
                elements.append(f"<!-- block {block.id!r} not on the active karyotype -->")
                continue
            a0, a1 = scale.spans[block.id]
            path = _sector_path(cx, cy, a0, a1, r_in, r_out)
            elements.append(f'<path d="{path}" fill="{block.color}" fill-opacity="{_fmt(opacity)}"/>')
            mid = (a0 + a1) / 2
            tx, ty = _point(cx, cy, mid, r_out + 12)
            elements.append(
                f'<text x="{_fmt(tx)}" y="{_fmt(ty)}" font-family="sans-serif" font-size="12" '
                f'text-anchor="middle" fill="#333333">{block.label}</text>'
            )
        return elements

    if kind is TrackKind.CHORD:
        if not isinstance(dataset, LinkDataset):
            return ["<!-- chord track without link data -->"]
        for row in dataset.rows:
            if row.src_block not in scale or row.dst_block not in scale:
                elements.append("<!-- link endpoint not on the active karyotype -->")
                continue
            src = (scale.angle_at(row.src_block, row.src_start), scale.angle_at(row.src_block, row.src_end))
            dst = (scale.angle_at(row.dst_block, row.dst_start), scale.angle_at(row.dst_block, row.dst_end))
            path = _ribbon_path(cx, cy, src, dst, r_out)
            elements.append(f'<path d="{path}" fill="{color}" fill-opacity="{_fmt(opacity)}"/>')
        return elements

    if kind is TrackKind.OTHERS:
        return ["<!-- non-visual track (<others>): not rendered -->"]

    if not isinstance(dataset, AttachmentDataset):
        return [f"<!-- <{kind.value}> track without attachment data -->"]

    domain = _auto_domain(dataset.numeric_values(), style)
    qualitative = _QualitativeColors()

    def row_color(value) -> str:
        return qualitative.color(value) if isinstance(value, str) else color

    rows = [row for row in dataset.rows]
    skipped = [row for row in rows if row.block not in scale]
    for row in skipped:
        elements.append(f"<!-- row on block {row.block!r} not on the active karyotype -->")
    rows = [row for row in rows if row.block in scale]

    if kind is TrackKind.HIGHLIGHT:
        for row in rows:
            a0, a1 = scale.angle_at(row.block, row.start), scale.angle_at(row.block, row.end)
            path = _sector_path(cx, cy, a0, a1, r_in, r_out)
            elements.append(f'<path d="{path}" fill="{row_color(row.value)}" fill-opacity="{_fmt(opacity)}"/>')
    elif kind is TrackKind.HISTOGRAM:
        for row in rows:
            a0, a1 = scale.angle_at(row.block, row.start), scale.angle_at(row.block, row.end)
            height = _norm(row.value, domain) * thickness
            if style.direction == "in":
                bar = (r_out - height, r_out)
            else:
                bar = (r_in, r_in + height)
            path = _sector_path(cx, cy, a0, a1, bar[0], bar[1])
            elements.append(f'<path d="{path}" fill="{row_color(row.value)}" fill-opacity="{_fmt(opacity)}"/>')
    elif kind is TrackKind.LINE:
        points = []
        for row in rows:
            mid = (scale.angle_at(row.block, row.start) + scale.angle_at(row.block, row.end)) / 2
            radius = r_in + _norm(row.value, domain) * thickness
            x, y = _point(cx, cy, mid, radius)
            points.append(f"{_fmt(x)},{_fmt(y)}")
        if points:
            elements.append(
                f'<polyline points="{" ".join(points)}" fill="none" stroke="{color}" '
                f'stroke-width="1.5" stroke-opacity="{_fmt(opacity)}"/>'
            )
    elif kind is TrackKind.SCATTER:
        for row in rows:
            mid = (scale.angle_at(row.block, row.start) + scale.angle_at(row.block, row.end)) / 2
            radius = r_in + _norm(row.value, domain) * thickness
            x, y = _point(cx, cy, mid, radius)
            elements.append(
                f'<circle cx="{_fmt(x)}" cy="{_fmt(y)}" r="{_fmt(MARKER_RADIUS)}" '
                f'fill="{row_color(row.value)}" fill-opacity="{_fmt(opacity)}"/>'
            )
    elif kind is TrackKind.HEATMAP:
        for row in rows:
            a0, a1 = scale.angle_at(row.block, row.start), scale.angle_at(row.block, row.end)
            fill = row_color(row.value) if isinstance(row.value, str) else _ramp(color, _norm(row.value, domain))
            path = _sector_path(cx, cy, a0, a1, r_in, r_out)
            elements.append(f'<path d="{path}" fill="{fill}" fill-opacity="{_fmt(opacity)}"/>')
    elif kind is TrackKind.TILE:
        by_block: dict[str, list[int]] = {}
        for index, row in enumerate(rows):
            by_block.setdefault(row.block, []).append(index)
        lane_of: dict[int, int] = {}
        lane_count = 1
        for indices in by_block.values():
            assignment, lanes = pack_lanes([(rows[i].start, rows[i].end) for i in indices])
            lane_count = max(lane_count, lanes)
            for i, lane in zip(indices, assignment):
                lane_of[i] = lane
        lane_height = thickness / lane_count
        for index, row in enumerate(rows):
            a0, a1 = scale.angle_at(row.block, row.start), scale.angle_at(row.block, row.end)
            lane = lane_of[index]
            top = r_out - lane * lane_height
            path = _sector_path(cx, cy, a0, a1, top - lane_height, top)
            elements.append(f'<path d="{path}" fill="{row_color(row.value)}" fill-opacity="{_fmt(opacity)}"/>')
    return elements
