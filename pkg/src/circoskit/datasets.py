"""Plot data model: karyotype, attachment, and link datasets.

Datasets arrive as headered CSV. Karyotype blocks define the angular axis;
attachment rows carry interval values on blocks; link rows connect two
genomic regions. Attachment and link rows are validated at ingest against
the karyotype blocks already in the store, so rendering never has to drop
rows.
"""

from __future__ import annotations

import csv
import io
from dataclasses import dataclass, field

__all__ = [
    "KaryotypeBlock",
    "KaryotypeDataset",
    "AttachmentRow",
    "AttachmentDataset",
    "LinkRow",
    "LinkDataset",
    "DatasetStore",
    "DatasetError",
    "DatasetNotFoundError",
    "KIND_KARYOTYPE",
    "KIND_ATTACHMENT",
    "KIND_LINK",
]

KIND_KARYOTYPE = "karyotype"
KIND_ATTACHMENT = "attachment"
KIND_LINK = "link"

_ID_PREFIX = {KIND_KARYOTYPE: "K", KIND_ATTACHMENT: "A", KIND_LINK: "L"}

_HEADERS = {
    KIND_KARYOTYPE: ["id", "label", "length", "color"],
    KIND_ATTACHMENT: ["block", "start", "end", "value"],
    KIND_LINK: ["src_block", "src_start", "src_end", "dst_block", "dst_start", "dst_end", "value"],
}


class DatasetError(ValueError):
    pass


class DatasetNotFoundError(KeyError):
    def __init__(self, dataset_id: str):
        super().__init__(dataset_id)
        self.dataset_id = dataset_id

    def __str__(self) -> str:
        return f"no dataset {self.dataset_id!r}"


@dataclass(frozen=True)
class KaryotypeBlock:
    id: str
    label: str
    length: int
    color: str


@dataclass(frozen=True)
class KaryotypeDataset:
    dataset_id: str
    name: str
    blocks: tuple[KaryotypeBlock, ...]
    kind: str = KIND_KARYOTYPE

    def block(self, block_id: str) -> KaryotypeBlock | None:
        for block in self.blocks:
            if block.id == block_id:
                return block
        return None

    def row_count(self) -> int:
        return len(self.blocks)


@dataclass(frozen=True)
class AttachmentRow:
    block: str
    start: float
    end: float
    value: float | str  # non-numeric values are qualitative categories


@dataclass(frozen=True)
class AttachmentDataset:
    dataset_id: str
    name: str
    rows: tuple[AttachmentRow, ...]
    kind: str = KIND_ATTACHMENT

    def row_count(self) -> int:
        return len(self.rows)

    def numeric_values(self) -> list[float]:
        return [row.value for row in self.rows if isinstance(row.value, float)]


@dataclass(frozen=True)
class LinkRow:
    src_block: str
    src_start: float
    src_end: float
    dst_block: str
    dst_start: float
    dst_end: float
    value: float


@dataclass(frozen=True)
class LinkDataset:
    dataset_id: str
    name: str
    rows: tuple[LinkRow, ...]
    kind: str = KIND_LINK

    def row_count(self) -> int:
        return len(self.rows)


Dataset = KaryotypeDataset | AttachmentDataset | LinkDataset


def _parse_value(raw: str) -> float | str:
    try:
        return float(raw)
    except ValueError:
        return raw


@dataclass
class DatasetStore:
    """Insertion-ordered dataset registry with per-kind ids (K1, A1, L1...)."""

    datasets: dict[str, Dataset] = field(default_factory=dict)
    color_markers: dict[str, str] = field(default_factory=dict)
    _counters: dict[str, int] = field(default_factory=dict)

    def __contains__(self, dataset_id: str) -> bool:
        return dataset_id in self.datasets

    def get(self, dataset_id: str) -> Dataset:
        try:
            return self.datasets[dataset_id]
        except KeyError:
            raise DatasetNotFoundError(dataset_id) from None

    def list(self) -> list[Dataset]:
        return list(self.datasets.values())

    def of_kind(self, kind: str) -> list[Dataset]:
        return [dataset for dataset in self.datasets.values() if dataset.kind == kind]

    def delete(self, dataset_id: str) -> None:
        if dataset_id not in self.datasets:
            raise DatasetNotFoundError(dataset_id)
        del self.datasets[dataset_id]
        self.color_markers.pop(dataset_id, None)

    def set_color_marker(self, dataset_id: str, color: str) -> None:
        if dataset_id not in self.datasets:
            raise DatasetNotFoundError(dataset_id)
        self.color_markers[dataset_id] = color

    def _next_id(self, kind: str) -> str:
        self._counters[kind] = self._counters.get(kind, 0) + 1
        return f"{_ID_PREFIX[kind]}{self._counters[kind]}"

    def _block_length(self, block_id: str) -> int | None:
        """Length of a block across all karyotypes; first match wins."""
        for dataset in self.of_kind(KIND_KARYOTYPE):
            block = dataset.block(block_id)
            if block is not None:
                return block.length
        return None

    def ingest_csv(self, kind: str, text: bytes | str, name: str | None = None) -> tuple[Dataset, list[tuple[int, str]]]:
        """Parse and store one CSV upload; returns (dataset, rejected rows)."""
        if kind not in _HEADERS:
            raise DatasetError(f"unknown dataset kind {kind!r}")
        if isinstance(text, bytes):
            try:
                text = text.decode("utf-8")
            except UnicodeDecodeError as exc:
                raise DatasetError(f"CSV is not valid UTF-8: {exc}") from exc
        reader = csv.DictReader(io.StringIO(text))
        expected = _HEADERS[kind]
        if reader.fieldnames is None or not set(expected) <= set(reader.fieldnames):
            raise DatasetError(f"{kind} CSV header must contain {','.join(expected)}")

        dataset_id = self._next_id(kind)
        label = name or dataset_id
        rejected: list[tuple[int, str]] = []
        if kind == KIND_KARYOTYPE:
            dataset = self._build_karyotype(dataset_id, label, reader, rejected)
        elif kind == KIND_ATTACHMENT:
            dataset = self._build_attachment(dataset_id, label, reader, rejected)
        else:
            dataset = self._build_link(dataset_id, label, reader, rejected)
        self.datasets[dataset_id] = dataset
        return dataset, rejected

    def _build_karyotype(self, dataset_id, label, reader, rejected) -> KaryotypeDataset:
        blocks: list[KaryotypeBlock] = []
        seen: set[str] = set()
        for line_no, row in enumerate(reader, start=2):
            block_id = (row.get("id") or "").strip()
            try:
                length = int(row.get("length") or "")
            except ValueError:
                rejected.append((line_no, "length must be an integer"))
                continue
            if not block_id:
                rejected.append((line_no, "id must be non-empty"))
            elif block_id in seen:
                rejected.append((line_no, f"duplicate block id {block_id!r}"))
            elif length <= 0:
                rejected.append((line_no, "length must be positive"))
            else:
                seen.add(block_id)
                blocks.append(
                    KaryotypeBlock(
                        id=block_id,
                        label=(row.get("label") or block_id).strip(),
                        length=length,
                        color=(row.get("color") or "#999999").strip(),
                    )
                )
        return KaryotypeDataset(dataset_id=dataset_id, name=label, blocks=tuple(blocks))

    def _check_interval(self, block_id: str, start: float, end: float) -> str | None:
        if not block_id:
            return "block must be non-empty"
        length = self._block_length(block_id)
        if length is None:
            return f"unknown block {block_id!r} (upload a karyotype first)"
        if not (0 <= start <= end <= length):
            return f"interval [{start}, {end}] outside block {block_id!r} of length {length}"
        return None

    def _build_attachment(self, dataset_id, label, reader, rejected) -> AttachmentDataset:
        rows: list[AttachmentRow] = []
        for line_no, row in enumerate(reader, start=2):
            try:
                start = float(row.get("start") or "")
                end = float(row.get("end") or "")
            except ValueError:
                rejected.append((line_no, "start/end must be numbers"))
                continue
            block_id = (row.get("block") or "").strip()
            problem = self._check_interval(block_id, start, end)
            if problem:
                rejected.append((line_no, problem))
                continue
            rows.append(AttachmentRow(block=block_id, start=start, end=end, value=_parse_value(row.get("value") or "")))
        return AttachmentDataset(dataset_id=dataset_id, name=label, rows=tuple(rows))

    def _build_link(self, dataset_id, label, reader, rejected) -> LinkDataset:
        rows: list[LinkRow] = []
        for line_no, row in enumerate(reader, start=2):
            try:
                src_start = float(row.get("src_start") or "")
                src_end = float(row.get("src_end") or "")
                dst_start = float(row.get("dst_start") or "")
                dst_end = float(row.get("dst_end") or "")
                value = float(row.get("value") or "1")
            except ValueError:
                rejected.append((line_no, "coordinates and value must be numbers"))
                continue
            src_block = (row.get("src_block") or "").strip()
            dst_block = (row.get("dst_block") or "").strip()
            problem = self._check_interval(src_block, src_start, src_end) or self._check_interval(
                dst_block, dst_start, dst_end
            )
            if problem:
                rejected.append((line_no, problem))
                continue
            rows.append(
                LinkRow(
                    src_block=src_block,
                    src_start=src_start,
                    src_end=src_end,
                    dst_block=dst_block,
                    dst_start=dst_start,
                    dst_end=dst_end,
                    value=value,
                )
            )
        return LinkDataset(dataset_id=dataset_id, name=label, rows=tuple(rows))
