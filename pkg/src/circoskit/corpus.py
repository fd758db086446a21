"""Store for published annotation/configuration records.

Records come from line-oriented ingest (JSONL or CSV) and are served in
id order at a monotonically increasing version, so analyses, indices, and
DAGs built against a version are reproducible.
"""

from __future__ import annotations

import csv
import io
import json
import os
import threading
from dataclasses import dataclass, field
from pathlib import Path

from .grammar import CircosConfig, ConfigError, parse, serialize

__all__ = [
    "CorpusRecord",
    "Corpus",
    "ImportReport",
    "NotFoundError",
    "MalformedStreamError",
    "EmptyCorpusError",
]


class NotFoundError(KeyError):
    def __init__(self, record_id: str):
        super().__init__(record_id)
        self.record_id = record_id

    def __str__(self) -> str:
        return f"no record with id {self.record_id!r}"


class MalformedStreamError(ValueError):
    """The stream as a whole is unusable (not a per-row problem)."""


class EmptyCorpusError(ValueError):
    def __init__(self, operation: str = "operation"):
        super().__init__(f"{operation} requires a non-empty corpus")


def atomic_write_text(path: Path, text: str) -> None:
    """Write via a sibling temp file and rename, so readers never see a torn file."""
    temp = path.with_name(path.name + ".tmp")
    temp.write_text(text, encoding="utf-8")
    os.replace(temp, path)


@dataclass(frozen=True)
class CorpusRecord:
    id: str
    annotation: str
    config: CircosConfig
    source_meta: dict = field(default_factory=dict)


@dataclass
class ImportReport:
    accepted: int = 0
    rejected: list[tuple[int, str]] = field(default_factory=list)  # (line, error)

    def to_json(self) -> dict:
        return {
            "accepted": self.accepted,
            "rejected": [{"line": line, "error": error} for line, error in self.rejected],
        }


def _decode(stream: bytes | str) -> str:
    if isinstance(stream, bytes):
        try:
            return stream.decode("utf-8")
        except UnicodeDecodeError as exc:
            raise MalformedStreamError(f"stream is not valid UTF-8: {exc}") from exc
    return stream


def _record_from_fields(record_id: str, annotation: str, config_text: str, source_meta: dict | None = None) -> CorpusRecord:
    if not record_id:
        raise ValueError("id must be non-empty")
    if not annotation:
        raise ValueError("annotation must be non-empty")
    config = parse(config_text)
    return CorpusRecord(id=record_id, annotation=annotation, config=config, source_meta=dict(source_meta or {}))


class Corpus:
    """Single-writer, multi-reader record store.

    Mutations hold a lock and bump the version; readers work off consistent
    copies (``records()`` returns a fresh id-sorted list).
    """

    def __init__(self) -> None:
        self._records: dict[str, CorpusRecord] = {}
        self._version = 0
        self._lock = threading.RLock()

    @property
    def version(self) -> int:
        return self._version

    def __len__(self) -> int:
        return len(self._records)

    def records(self) -> list[CorpusRecord]:
        with self._lock:
            return [self._records[key] for key in sorted(self._records)]

    def get(self, record_id: str) -> CorpusRecord:
        with self._lock:
            try:
                return self._records[record_id]
            except KeyError:
                raise NotFoundError(record_id) from None

    def list(self, offset: int = 0, limit: int = 50) -> list[CorpusRecord]:
        return self.records()[offset : offset + limit]

    def delete(self, record_id: str) -> bool:
        with self._lock:
            if record_id not in self._records:
                raise NotFoundError(record_id)
            del self._records[record_id]
            self._version += 1
            return True

    # -- ingest ---------------------------------------------------------

    def import_jsonl(self, stream: bytes | str) -> ImportReport:
        text = _decode(stream)
        report = ImportReport()
        staged: dict[str, CorpusRecord] = {}
        for line_no, line in enumerate(text.splitlines(), start=1):
            if not line.strip():
                continue
            try:
                payload = json.loads(line)
                if not isinstance(payload, dict):
                    raise ValueError("line is not a JSON object")
                record = _record_from_fields(
                    str(payload.get("id", "")),
                    str(payload.get("annotation", "")),
                    str(payload.get("config", "")),
                    payload.get("source_meta"),
                )
            except (ValueError, ConfigError) as exc:
                report.rejected.append((line_no, str(exc)))
                continue
            staged[record.id] = record
            report.accepted += 1
        self._apply(staged)
        return report

    def import_csv(self, stream: bytes | str) -> ImportReport:
        text = _decode(stream)
        report = ImportReport()
        reader = csv.DictReader(io.StringIO(text))
        if reader.fieldnames is None or not {"id", "annotation", "config"} <= set(reader.fieldnames):
            raise MalformedStreamError("CSV header must contain id,annotation,config")
        staged: dict[str, CorpusRecord] = {}
        for line_no, row in enumerate(reader, start=2):  # header is line 1
            try:
                record = _record_from_fields(row.get("id") or "", row.get("annotation") or "", row.get("config") or "")
            except (ValueError, ConfigError) as exc:
                report.rejected.append((line_no, str(exc)))
                continue
            staged[record.id] = record
            report.accepted += 1
        self._apply(staged)
        return report

    def _apply(self, staged: dict[str, CorpusRecord]) -> None:
        if not staged:
            return
        with self._lock:
            self._records.update(staged)
            self._version += 1

    # -- snapshot -------------------------------------------------------

    def snapshot(self, path: str | Path) -> None:
        path = Path(path)
        lines = []
        for record in self.records():
            payload: dict = {
                "id": record.id,
                "annotation": record.annotation,
                "config": serialize(record.config, wrapped=True),
            }
            if record.source_meta:
                payload["source_meta"] = record.source_meta
            lines.append(json.dumps(payload, sort_keys=False, separators=(",", ":")))
        try:
            atomic_write_text(path, "\n".join(lines) + ("\n" if lines else ""))
        except OSError as exc:
            raise OSError(f"snapshot to {path} failed: {exc}") from exc

    def restore(self, path: str | Path) -> None:
        """Replace the store content from a snapshot; all-or-nothing."""
        path = Path(path)
        try:
            text = path.read_bytes()
        except OSError as exc:
            raise OSError(f"restore from {path} failed: {exc}") from exc
        decoded = _decode(text)
        staged: dict[str, CorpusRecord] = {}
        for line_no, line in enumerate(decoded.splitlines(), start=1):
            if not line.strip():
                continue
            try:
                payload = json.loads(line)
                if not isinstance(payload, dict):
                    raise ValueError("line is not a JSON object")
                record = _record_from_fields(
                    str(payload.get("id", "")),
                    str(payload.get("annotation", "")),
                    str(payload.get("config", "")),
                    payload.get("source_meta"),
                )
            except (ValueError, ConfigError) as exc:
                raise MalformedStreamError(f"{path}:{line_no}: {exc}") from exc
            staged[record.id] = record
        with self._lock:
            self._records = staged
            self._version += 1
