"""HTTP API over the corpus, analytics, retrieval, DAG, recommender, and renderer.

Sessions are in-memory authoritative with JSON snapshots written on every
mutation; the corpus and datasets are snapshotted alongside. All error
responses share one envelope: {"code", "message", "detail"?}. Mutating
endpoints are idempotent under retry when the client sends an
``X-Request-Id`` header.
"""

from __future__ import annotations

import hashlib
import json
import re
import threading
from contextlib import asynccontextmanager
from dataclasses import dataclass, field
from pathlib import Path

from fastapi import FastAPI, Request, Response
from fastapi.exceptions import RequestValidationError
from fastapi.responses import JSONResponse
from fastapi.staticfiles import StaticFiles
from starlette.exceptions import HTTPException as StarletteHTTPException

from . import __version__
from .corpus import Corpus, EmptyCorpusError, MalformedStreamError, NotFoundError, atomic_write_text
from .datasets import (
    KIND_ATTACHMENT,
    KIND_KARYOTYPE,
    KIND_LINK,
    AttachmentDataset,
    DatasetError,
    DatasetNotFoundError,
    DatasetStore,
    KaryotypeDataset,
    LinkDataset,
)
from .grammar import TRACK_NAMES, CircosConfig, ConfigError, parse, serialize
from .patterns import distributions, stacked_matrix, synthesized_matrix
from .recommend import (
    GenerationInvalidError,
    GenerationProvider,
    MockGenerationProvider,
    Recommendation,
    Recommender,
    RemoteGenerationProvider,
)
from .recommend import NotFoundError as RecommendationNotFoundError
from .refdag import (
    EmptyInputError,
    NodeNotFoundError,
    UnreachableError,
    build,
    classify_edges,
    complete_path,
    layout,
    to_json as dag_to_json,
)
from .render import (
    Canvas,
    EmptyKaryotypeError,
    GapTooLargeError,
    PlotSession,
    TooManyRingsError,
    TrackBinding,
    TrackStyle,
    auto_bind,
    render_svg,
)
from .retrieval import (
    DimensionMismatchError,
    EmbeddingProvider,
    HashingEmbedder,
    ProviderUnavailableError,
    RemoteEmbeddingProvider,
    StaleIndexError,
    semantic_search,
    structural_search,
)

__all__ = ["AppState", "CorruptSnapshotError", "create_app", "build_state"]

CORPUS_DAG_LIMIT = 500
_SESSION_ID_RE = re.compile(r"^[A-Za-z0-9_-]{1,64}$")


class CorruptSnapshotError(RuntimeError):
    """A persisted snapshot cannot be loaded; the server refuses to start."""


class ApiError(Exception):
    def __init__(self, status: int, code: str, message: str, detail=None):
        super().__init__(message)
        self.status = status
        self.code = code
        self.message = message
        self.detail = detail


@dataclass
class SessionState:
    session: PlotSession
    history: list[dict] = field(default_factory=list)  # recommendation payloads, append-only


@dataclass
class AppState:
    corpus: Corpus = field(default_factory=Corpus)
    datasets: DatasetStore = field(default_factory=DatasetStore)
    embedder: EmbeddingProvider = field(default_factory=HashingEmbedder)
    generator: GenerationProvider = field(default_factory=MockGenerationProvider)
    state_dir: Path | None = None
    sessions: dict[str, SessionState] = field(default_factory=dict)
    rec_sessions: dict[str, str] = field(default_factory=dict)  # rec id -> session id
    lock: threading.RLock = field(default_factory=threading.RLock)
    recommender: Recommender | None = None
    idempotency_cache: dict[tuple, tuple] = field(default_factory=dict)

    def __post_init__(self) -> None:
        if self.recommender is None:
            self.recommender = Recommender(corpus=self.corpus, embedder=self.embedder, generator=self.generator)

    # -- sessions -------------------------------------------------------

    def get_session(self, session_id: str) -> SessionState:
        if not _SESSION_ID_RE.match(session_id):
            raise ApiError(400, "bad_request", f"invalid session id {session_id!r}")
        if session_id not in self.sessions:
            self.sessions[session_id] = SessionState(session=PlotSession(id=session_id, datasets=self.datasets))
        return self.sessions[session_id]

    # -- persistence ----------------------------------------------------

    def _sessions_dir(self) -> Path | None:
        return self.state_dir / "sessions" if self.state_dir else None

    def persist_session(self, session_id: str) -> None:
        directory = self._sessions_dir()
        if directory is None:
            return
        directory.mkdir(parents=True, exist_ok=True)
        state = self.sessions[session_id]
        payload = {
            "id": session_id,
            "config": serialize(state.session.config, wrapped=True),
            "canvas": state.session.canvas.to_json(),
            "bindings": [binding.to_json() for binding in state.session.bindings],
            "history": state.history,
        }
        atomic_write_text(directory / f"{session_id}.json", json.dumps(payload, indent=2))

    def persist_corpus(self) -> None:
        if self.state_dir is None:
            return
        self.state_dir.mkdir(parents=True, exist_ok=True)
        self.corpus.snapshot(self.state_dir / "corpus.jsonl")

    def persist_datasets(self) -> None:
        if self.state_dir is None:
            return
        self.state_dir.mkdir(parents=True, exist_ok=True)
        payload = [_dataset_to_json(d, full=True) | {"colorMarker": self.datasets.color_markers.get(d.dataset_id)}
                   for d in self.datasets.list()]
        atomic_write_text(self.state_dir / "datasets.json", json.dumps(payload, indent=2))

    def flush(self) -> None:
        with self.lock:
            self.persist_corpus()
            self.persist_datasets()
            for session_id in self.sessions:
                self.persist_session(session_id)

    def load(self, corpus_path: Path | None = None) -> None:
        """Load snapshots at startup; any corrupt file refuses the start."""
        source = corpus_path
        if source is None and self.state_dir and (self.state_dir / "corpus.jsonl").exists():
            source = self.state_dir / "corpus.jsonl"
        if source is not None and Path(source).exists():
            try:
                self.corpus.restore(source)
            except (MalformedStreamError, OSError) as exc:
                raise CorruptSnapshotError(f"corpus snapshot {source}: {exc}") from exc
        if self.state_dir is None:
            return
        datasets_path = self.state_dir / "datasets.json"
        if datasets_path.exists():
            try:
                entries = json.loads(datasets_path.read_text(encoding="utf-8"))
                for entry in entries:
                    _dataset_restore(self.datasets, entry)
            except (ValueError, KeyError) as exc:
                raise CorruptSnapshotError(f"dataset snapshot {datasets_path}: {exc}") from exc
        sessions_dir = self._sessions_dir()
        if sessions_dir and sessions_dir.exists():
            for path in sorted(sessions_dir.glob("*.json")):
                try:
                    payload = json.loads(path.read_text(encoding="utf-8"))
                    session = PlotSession(
                        id=payload["id"],
                        config=parse(payload.get("config", "")),
                        datasets=self.datasets,
                        bindings=[TrackBinding.from_json(b) for b in payload.get("bindings", [])],
                        canvas=Canvas.from_json(payload.get("canvas", {})),
                    )
                    self.sessions[payload["id"]] = SessionState(session=session, history=payload.get("history", []))
                    for entry in payload.get("history", []):
                        if isinstance(entry, dict) and "id" in entry:
                            self.rec_sessions[entry["id"]] = payload["id"]
                except (ValueError, KeyError, ConfigError) as exc:
                    raise CorruptSnapshotError(f"session snapshot {path}: {exc}") from exc


def _dataset_to_json(dataset, full: bool = False) -> dict:
    payload = {"id": dataset.dataset_id, "kind": dataset.kind, "name": dataset.name, "rows": dataset.row_count()}
    if not full:
        return payload
    if isinstance(dataset, KaryotypeDataset):
        payload["data"] = [
            {"id": b.id, "label": b.label, "length": b.length, "color": b.color} for b in dataset.blocks
        ]
    elif isinstance(dataset, AttachmentDataset):
        payload["data"] = [
            {"block": r.block, "start": r.start, "end": r.end, "value": r.value} for r in dataset.rows
        ]
    elif isinstance(dataset, LinkDataset):
        payload["data"] = [
            {
                "srcBlock": r.src_block,
                "srcStart": r.src_start,
                "srcEnd": r.src_end,
                "dstBlock": r.dst_block,
                "dstStart": r.dst_start,
                "dstEnd": r.dst_end,
                "value": r.value,
            }
            for r in dataset.rows
        ]
    return payload


def _dataset_restore(store: DatasetStore, entry: dict) -> None:
    """Rebuild one dataset from its snapshot JSON via the CSV path."""
    kind = entry["kind"]
    rows = entry.get("data", [])
    if kind == KIND_KARYOTYPE:
        lines = ["id,label,length,color"] + [f'{r["id"]},{r["label"]},{r["length"]},{r["color"]}' for r in rows]
    elif kind == KIND_ATTACHMENT:
        lines = ["block,start,end,value"] + [f'{r["block"]},{r["start"]},{r["end"]},{r["value"]}' for r in rows]
    elif kind == KIND_LINK:
        lines = ["src_block,src_start,src_end,dst_block,dst_start,dst_end,value"] + [
            f'{r["srcBlock"]},{r["srcStart"]},{r["srcEnd"]},{r["dstBlock"]},{r["dstStart"]},{r["dstEnd"]},{r["value"]}'
            for r in rows
        ]
    else:
        raise KeyError(f"unknown dataset kind {kind!r}")
    dataset, rejected = store.ingest_csv(kind, "\n".join(lines), name=entry.get("name"))
    if rejected:
        raise ValueError(f"dataset {entry.get('id')}: {len(rejected)} rows failed validation on restore")
    if entry.get("colorMarker"):
        store.set_color_marker(dataset.dataset_id, entry["colorMarker"])


def _recommendation_json(state: AppState, rec: Recommendation) -> dict:
    reference_records = []
    for record_id in rec.references:
        try:
            record = state.corpus.get(record_id)
        except NotFoundError:
            continue
        reference_records.append(
            {"id": record.id, "annotation": record.annotation, "config": serialize(record.config)}
        )
    return {
        "id": rec.rec_id,
        "config": serialize(rec.config),
        "raw": rec.raw,
        "explanation": rec.explanation,
        "references": list(rec.references),
        "referenceRecords": reference_records,
        "attempts": rec.attempts,
        "seed": rec.seed,
        "query": rec.query,
    }


def _render_hash(session: PlotSession) -> str:
    return hashlib.sha256(render_svg(session).encode("utf-8")).hexdigest()


def _latest_recommended(state: AppState, session_state: SessionState) -> CircosConfig | None:
    for entry in reversed(session_state.history):
        try:
            return parse(entry["config"])
        except (KeyError, ConfigError):
            continue
    return None


async def _json_body(request: Request) -> dict:
    raw = await request.body()
    if not raw:
        return {}
    try:
        payload = json.loads(raw)
    except ValueError as exc:
        raise ApiError(400, "bad_request", f"invalid JSON body: {exc}")
    if not isinstance(payload, dict):
        raise ApiError(400, "bad_request", "JSON body must be an object")
    return payload


_ERROR_STATUS: list[tuple[type, int, str]] = [
    (ApiError, 0, ""),  # handled specially
    (ConfigError, 400, "invalid_config"),
    (MalformedStreamError, 400, "malformed_stream"),
    (DatasetError, 400, "invalid_dataset"),
    (EmptyKaryotypeError, 400, "invalid_dataset"),
    (GapTooLargeError, 400, "render_error"),
    (TooManyRingsError, 400, "render_error"),
    (EmptyCorpusError, 409, "empty_corpus"),
    (EmptyInputError, 409, "empty_corpus"),
    (NotFoundError, 404, "not_found"),
    (DatasetNotFoundError, 404, "not_found"),
    (RecommendationNotFoundError, 404, "not_found"),
    (NodeNotFoundError, 404, "not_found"),
    (UnreachableError, 409, "unreachable_node"),
    (StaleIndexError, 503, "stale_index"),
    (ProviderUnavailableError, 502, "provider_unavailable"),
    (DimensionMismatchError, 502, "provider_error"),
    (GenerationInvalidError, 502, "generation_invalid"),
    (ValueError, 400, "bad_request"),
]


def _error_response(exc: Exception) -> JSONResponse:
    if isinstance(exc, ApiError):
        body = {"code": exc.code, "message": exc.message}
        if exc.detail is not None:
            body["detail"] = exc.detail
        return JSONResponse(status_code=exc.status, content=body)
    for klass, status, code in _ERROR_STATUS[1:]:
        if isinstance(exc, klass):
            body = {"code": code, "message": str(exc)}
            if isinstance(exc, GenerationInvalidError):
                body["detail"] = {"attempts": exc.attempts}
            return JSONResponse(status_code=status, content=body)
    return JSONResponse(status_code=500, content={"code": "internal", "message": "internal server error"})


def create_app(state: AppState, ui_dir: str | Path | None = None) -> FastAPI:
    @asynccontextmanager
    async def lifespan(_: FastAPI):
        yield
        state.flush()

    app = FastAPI(title="circoskit", version=__version__, lifespan=lifespan)
    app.state.engine = state

    for klass, _, _ in _ERROR_STATUS:
        app.add_exception_handler(klass, lambda request, exc: _error_response(exc))

    @app.exception_handler(StarletteHTTPException)
    async def http_error(request: Request, exc: StarletteHTTPException):
        code = "not_found" if exc.status_code == 404 else "http_error"
        return JSONResponse(status_code=exc.status_code, content={"code": code, "message": str(exc.detail)})

    @app.exception_handler(RequestValidationError)
    async def validation_error(request: Request, exc: RequestValidationError):
        return JSONResponse(
            status_code=400,
            content={"code": "bad_request", "message": "invalid request", "detail": exc.errors()},
        )

    @app.exception_handler(Exception)
    async def unhandled(request: Request, exc: Exception):
        return _error_response(exc)

    @app.middleware("http")
    async def idempotency(request: Request, call_next):
        request_id = request.headers.get("x-request-id")
        if not request_id or request.method not in {"POST", "PUT", "DELETE"}:
            return await call_next(request)
        key = (request.method, request.url.path, request_id)
        cached = state.idempotency_cache.get(key)
        if cached is not None:
            status, body, media_type = cached
            return Response(content=body, status_code=status, media_type=media_type)
        response = await call_next(request)
        body = b"".join([chunk async for chunk in response.body_iterator])
        state.idempotency_cache[key] = (response.status_code, body, response.media_type)
        return Response(content=body, status_code=response.status_code, media_type=response.media_type)

    # -- health / corpus ------------------------------------------------

    @app.get("/api/health")
    async def health():
        return {
            "status": "ok",
            "version": __version__,
            "corpusVersion": state.corpus.version,
            "corpusSize": len(state.corpus),
            "tokens": list(TRACK_NAMES),
            "structural": ["start", "split", "end"],
            "commands": ["\\recommend", "\\data"],
        }

    @app.post("/api/corpus/import")
    async def corpus_import(request: Request):
        body = await request.body()
        with state.lock:
            report = state.corpus.import_jsonl(body)
            state.persist_corpus()
        return report.to_json()

    @app.get("/api/corpus/stats")
    async def corpus_stats():
        records = state.corpus.records()
        return {
            "corpusVersion": state.corpus.version,
            "distributions": distributions(records).to_json(),
            "stacked": stacked_matrix(records).to_json(),
            "synthesized": synthesized_matrix(records).to_json(),
        }

    # -- datasets --------------------------------------------------------

    @app.post("/api/data")
    async def data_upload(request: Request, kind: str, name: str | None = None):
        body = await request.body()
        with state.lock:
            dataset, rejected = state.datasets.ingest_csv(kind, body, name=name)
            state.persist_datasets()
        payload = _dataset_to_json(dataset)
        payload["rejected"] = [{"line": line, "error": error} for line, error in rejected]
        return payload

    @app.get("/api/data")
    async def data_list():
        return [
            _dataset_to_json(dataset) | {"colorMarker": state.datasets.color_markers.get(dataset.dataset_id)}
            for dataset in state.datasets.list()
        ]

    @app.get("/api/data/{dataset_id}")
    async def data_get(dataset_id: str):
        dataset = state.datasets.get(dataset_id)
        return _dataset_to_json(dataset, full=True) | {
            "colorMarker": state.datasets.color_markers.get(dataset_id)
        }

    @app.put("/api/data/{dataset_id}")
    async def data_update(dataset_id: str, request: Request):
        payload = await _json_body(request)
        with state.lock:
            if "colorMarker" in payload:
                state.datasets.set_color_marker(dataset_id, str(payload["colorMarker"]))
            state.persist_datasets()
        return _dataset_to_json(state.datasets.get(dataset_id)) | {
            "colorMarker": state.datasets.color_markers.get(dataset_id)
        }

    @app.delete("/api/data/{dataset_id}")
    async def data_delete(dataset_id: str):
        unbound = []
        with state.lock:
            state.datasets.delete(dataset_id)
            for session_id, session_state in state.sessions.items():
                touched = False
                for binding in session_state.session.bindings:
                    if binding.dataset_id == dataset_id:
                        binding.dataset_id = None
                        unbound.append({"sessionId": session_id, "ring": binding.ring, "pos": binding.pos})
                        touched = True
                if touched:
                    state.persist_session(session_id)
            state.persist_datasets()
        return {"deleted": True, "unboundTracks": unbound}

    # -- sessions --------------------------------------------------------

    def _session_view(session_id: str) -> dict:
        session_state = state.get_session(session_id)
        session = session_state.session
        return {
            "id": session_id,
            "config": serialize(session.config),
            "renderHash": _render_hash(session),
            "bindings": [binding.to_json(session.config) for binding in session.bindings],
            "canvas": session.canvas.to_json(),
            "history": session_state.history,
        }

    @app.get("/api/session/{session_id}")
    async def session_get(session_id: str):
        return _session_view(session_id)

    @app.get("/api/session/{session_id}/config")
    async def session_config_get(session_id: str):
        session_state = state.get_session(session_id)
        return {"config": serialize(session_state.session.config)}

    @app.put("/api/session/{session_id}/config")
    async def session_config_put(session_id: str, request: Request):
        raw = await request.body()
        content_type = request.headers.get("content-type", "")
        if content_type.startswith("application/json"):
            try:
                payload = json.loads(raw or b"{}")
            except ValueError as exc:
                raise ApiError(400, "bad_request", f"invalid JSON body: {exc}")
            if not isinstance(payload, dict) or not isinstance(payload.get("config"), str):
                raise ApiError(400, "bad_request", 'JSON body must be {"config": "<token string>"}')
            text = payload["config"]
        else:
            text = raw.decode("utf-8", errors="replace")
        config = parse(text)
        with state.lock:
            session_state = state.get_session(session_id)
            session_state.session.config = config
            problems = auto_bind(session_state.session)
            state.persist_session(session_id)
            return {
                "config": serialize(config),
                "renderHash": _render_hash(session_state.session),
                "unbound": problems,
            }

    @app.put("/api/session/{session_id}/binding")
    async def session_binding_put(session_id: str, request: Request):
        payload = await _json_body(request)
        if "ring" not in payload or "pos" not in payload:
            raise ApiError(400, "bad_request", "body must carry ring and pos")
        with state.lock:
            session_state = state.get_session(session_id)
            session = session_state.session
            ring, pos = int(payload["ring"]), int(payload["pos"])
            binding = session.binding_at(ring, pos)
            if binding is None:
                kinds = {(r, p): kind for r, p, kind in session.tracks()}
                if (ring, pos) not in kinds:
                    raise ApiError(404, "not_found", f"no track at ring {ring} pos {pos}")
                binding = TrackBinding(ring=ring, pos=pos)
                session.bindings.append(binding)
                session.bindings.sort(key=lambda b: (b.ring, b.pos))
            if "datasetId" in payload:
                dataset_id = payload["datasetId"]
                if dataset_id is not None:
                    state.datasets.get(dataset_id)  # 404 when missing
                binding.dataset_id = dataset_id
            if "style" in payload and isinstance(payload["style"], dict):
                merged = binding.style.to_json() | payload["style"]
                binding.style = TrackStyle.from_json(merged)
            state.persist_session(session_id)
            return {
                "binding": binding.to_json(session.config),
                "renderHash": _render_hash(session),
            }

    # -- retrieval / recommendation ---------------------------------------

    @app.post("/api/retrieve")
    async def retrieve(request: Request):
        payload = await _json_body(request)
        mode = payload.get("mode", "semantic")
        k = int(payload.get("k", 10))
        if mode == "semantic":
            query = payload.get("query")
            if not isinstance(query, str) or not query:
                raise ApiError(400, "bad_request", "semantic retrieval requires a query")
            with state.lock:
                index = state.recommender.ensure_index()
            hits = semantic_search(index, query, state.embedder, k=k, corpus_version=state.corpus.version)
        elif mode == "structural":
            session_id = payload.get("sessionId")
            if not isinstance(session_id, str):
                raise ApiError(400, "bad_request", "structural retrieval requires a sessionId")
            session_state = state.get_session(session_id)
            hits = structural_search(state.corpus, session_state.session.config, k=k)
        else:
            raise ApiError(400, "bad_request", f"unknown retrieval mode {mode!r}")
        out = []
        for hit in hits:
            record = state.corpus.get(hit.record_id)
            out.append(
                hit.to_json() | {"annotation": record.annotation, "config": serialize(record.config)}
            )
        return {"mode": mode, "hits": out}

    @app.post("/api/recommend")
    async def recommend(request: Request):
        payload = await _json_body(request)
        session_id = payload.get("sessionId")
        query = payload.get("query")
        if not isinstance(session_id, str) or not isinstance(query, str) or not query:
            raise ApiError(400, "bad_request", "body must carry sessionId and query")
        k = int(payload.get("k", 10))
        seed = int(payload.get("seed", 0))
        with state.lock:
            session_state = state.get_session(session_id)
            existing = session_state.session.config if session_state.session.config.rings else None
            rec = state.recommender.recommend(query, existing=existing, k=k, seed=seed)
            rec_json = _recommendation_json(state, rec)
            session_state.history.append(rec_json)
            state.rec_sessions[rec.rec_id] = session_id
            state.persist_session(session_id)
        return rec_json

    @app.post("/api/recommend/{rec_id}/regenerate")
    async def regenerate(rec_id: str):
        with state.lock:
            session_id = state.rec_sessions.get(rec_id)
            if session_id is None:
                raise RecommendationNotFoundError(rec_id)
            rec = state.recommender.regenerate(rec_id)
            rec_json = _recommendation_json(state, rec)
            session_state = state.get_session(session_id)
            session_state.history.append(rec_json)
            state.rec_sessions[rec.rec_id] = session_id
            state.persist_session(session_id)
        return rec_json

    # -- reference DAG ----------------------------------------------------

    def _dag_for(session_id: str, scope: str, k: int):
        session_state = state.get_session(session_id)
        current = session_state.session.config if session_state.session.config.rings else None
        recommended = _latest_recommended(state, session_state)
        truncated = False
        if scope == "corpus":
            records = state.corpus.records()
            if len(records) > CORPUS_DAG_LIMIT:
                records = records[:CORPUS_DAG_LIMIT]
                truncated = True
            configs = [(record.id, record.config) for record in records]
        elif scope == "retrieved":
            hits = structural_search(state.corpus, session_state.session.config, k=k)
            configs = [(hit.record_id, state.corpus.get(hit.record_id).config) for hit in hits]
        else:
            raise ApiError(400, "bad_request", f"unknown dag scope {scope!r}")
        dag = build(configs)
        classify_edges(dag, current=current, recommended=recommended)
        return dag, current, recommended, truncated

    @app.get("/api/dag")
    async def dag_get(sessionId: str, scope: str = "retrieved", k: int = 10):
        dag, _, _, truncated = _dag_for(sessionId, scope, k)
        payload = dag_to_json(dag, layout(dag))
        payload["truncated"] = truncated
        payload["scope"] = scope
        return payload

    @app.post("/api/dag/complete")
    async def dag_complete(request: Request):
        payload = await _json_body(request)
        session_id = payload.get("sessionId")
        node_id = payload.get("nodeId")
        if not isinstance(session_id, str) or not isinstance(node_id, str):
            raise ApiError(400, "bad_request", "body must carry sessionId and nodeId")
        scope = payload.get("scope", "retrieved")
        k = int(payload.get("k", 10))
        with state.lock:
            dag, current, recommended, _ = _dag_for(session_id, scope, k)
            config = complete_path(dag, node_id, current=current, recommended=recommended)
            session_state = state.get_session(session_id)
            session_state.session.config = config
            problems = auto_bind(session_state.session)
            state.persist_session(session_id)
            return {
                "config": serialize(config),
                "renderHash": _render_hash(session_state.session),
                "unbound": problems,
            }

    # -- rendering --------------------------------------------------------

    @app.post("/api/render")
    async def render(request: Request):
        payload = await _json_body(request)
        session_id = payload.get("sessionId")
        if not isinstance(session_id, str):
            raise ApiError(400, "bad_request", "body must carry sessionId")
        session_state = state.get_session(session_id)
        svg = render_svg(session_state.session)
        return Response(content=svg, media_type="image/svg+xml")

    @app.get("/api/export/{filename}")
    async def export(filename: str):
        if not filename.endswith(".svg"):
            raise ApiError(404, "not_found", "export filename must end in .svg")
        session_id = filename[: -len(".svg")]
        session_state = state.get_session(session_id)
        svg = render_svg(session_state.session)
        return Response(
            content=svg,
            media_type="image/svg+xml",
            headers={"Content-Disposition": f'attachment; filename="{filename}"'},
        )

    if ui_dir is not None and Path(ui_dir).exists():
        app.mount("/", StaticFiles(directory=str(ui_dir), html=True), name="ui")

    return app


def build_state(
    corpus_path: str | Path | None = None,
    state_dir: str | Path | None = None,
    provider: str = "mock",
    embed_url: str | None = None,
    generate_url: str | None = None,
    api_key: str | None = None,
    timeout: float = 10.0,
) -> AppState:
    """Assemble providers and load snapshots; raises CorruptSnapshotError."""
    if provider == "remote":
        embedder: EmbeddingProvider = (
            RemoteEmbeddingProvider(embed_url, timeout=timeout) if embed_url else HashingEmbedder()
        )
        if not generate_url:
            raise ValueError("remote provider requires a generation endpoint URL")
        generator: GenerationProvider = RemoteGenerationProvider(generate_url, api_key=api_key, timeout=timeout)
    else:
        embedder = HashingEmbedder()
        generator = MockGenerationProvider()
    state = AppState(
        embedder=embedder,
        generator=generator,
        state_dir=Path(state_dir) if state_dir else None,
    )
    state.load(Path(corpus_path) if corpus_path else None)
    return state
