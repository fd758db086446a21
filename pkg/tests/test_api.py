from __future__ import annotations

import pytest
from fastapi.testclient import TestClient

from circoskit.recommend import MockGenerationProvider
from circoskit.server import AppState, build_state, create_app

SCENARIO = "<ideogram><split><highlight><split><line><split><scatter><split><chord>"

CORPUS_JSONL = "\n".join(
    [
        '{"id": "a-first", "annotation": "human ideogram with conservation highlight", "config": "<ideogram><highlight><split><histogram><split><chord>"}',
        '{"id": "b-second", "annotation": "mouse genome histogram rings", "config": "<ideogram><split><histogram><split><histogram>"}',
        '{"id": "c-third", "annotation": "gene interaction chords with tiles", "config": "<ideogram><split><tile><split><chord>"}',
    ]
)

KARYOTYPE_CSV = "id,label,length,color\nchr1,Chr 1,100,#ff0000\nchr2,Chr 2,300,#0000ff\n"
ATTACHMENT_CSV = "block,start,end,value\nchr1,0,10,1.0\nchr1,10,20,4.0\nchr2,0,100,2.0\n"
LINK_CSV = "src_block,src_start,src_end,dst_block,dst_start,dst_end,value\nchr1,0,10,chr2,50,80,1\n"


@pytest.fixture
def client(tmp_path):
    state = AppState(state_dir=tmp_path / "state")
    state.generator = MockGenerationProvider([SCENARIO])
    state.recommender.generator = state.generator
    with TestClient(create_app(state)) as test_client:
        test_client.app_state = state
        yield test_client


def seed(client: TestClient) -> None:
    assert client.post("/api/corpus/import", content=CORPUS_JSONL).status_code == 200
    for kind, csv in (("karyotype", KARYOTYPE_CSV), ("attachment", ATTACHMENT_CSV), ("link", LINK_CSV)):
        response = client.post(f"/api/data?kind={kind}", content=csv)
        assert response.status_code == 200, response.text


def test_health_reports_tokens_and_version(client):
    payload = client.get("/api/health").json()
    assert payload["status"] == "ok"
    assert payload["corpusVersion"] == 0
    assert payload["tokens"][0] == "ideogram" and len(payload["tokens"]) == 9
    assert payload["commands"] == ["\\recommend", "\\data"]


def test_unknown_route_is_json_envelope(client):
    response = client.get("/api/nope")
    assert response.status_code == 404
    payload = response.json()
    assert payload["code"] == "not_found"
    assert "message" in payload


def test_invalid_json_body_is_400(client):
    response = client.post("/api/retrieve", content=b"{not json", headers={"content-type": "application/json"})
    assert response.status_code == 400
    assert response.json()["code"] == "bad_request"


def test_missing_query_params_are_400(client):
    response = client.get("/api/dag")
    assert response.status_code == 400
    assert response.json()["code"] == "bad_request"


def test_corpus_import_and_stats(client):
    report = client.post("/api/corpus/import", content=CORPUS_JSONL).json()
    assert report == {"accepted": 3, "rejected": []}
    stats = client.get("/api/corpus/stats").json()
    assert stats["corpusVersion"] == 1
    assert stats["distributions"]["ringsPerPlot"] == {"3": 3}
    labels = stats["stacked"]["labels"]
    assert labels[0] == "start" and labels[-1] == "end"
    assert stats["synthesized"]["labels"][0] == "ideogram"


def test_corpus_import_reports_bad_rows(client):
    body = '{"id": "ok", "annotation": "fine", "config": "<chord>"}\n{"id": "bad", "annotation": "x", "config": "<foo>"}'
    report = client.post("/api/corpus/import", content=body).json()
    assert report["accepted"] == 1
    assert report["rejected"][0]["line"] == 2


def test_stats_on_empty_corpus_conflicts(client):
    response = client.get("/api/corpus/stats")
    assert response.status_code == 409
    assert response.json()["code"] == "empty_corpus"


def test_dataset_upload_list_get_delete(client):
    seed(client)
    listing = client.get("/api/data").json()
    assert [d["id"] for d in listing] == ["K1", "A1", "L1"]
    detail = client.get("/api/data/A1").json()
    assert detail["rows"] == 3
    assert detail["data"][0]["block"] == "chr1"

    marked = client.put("/api/data/A1", json={"colorMarker": "#00ff00"}).json()
    assert marked["colorMarker"] == "#00ff00"

    assert client.delete("/api/data/L1").json()["deleted"] is True
    assert client.get("/api/data/L1").status_code == 404


def test_dataset_upload_rejects_bad_kind_and_rows(client):
    assert client.post("/api/data?kind=bogus", content="x").status_code == 400
    seed(client)
    response = client.post("/api/data?kind=attachment", content="block,start,end,value\nnope,0,10,1\n")
    assert response.status_code == 200
    assert response.json()["rejected"][0]["error"].startswith("unknown block")


def test_put_config_binds_and_returns_render_hash(client):
    seed(client)
    response = client.put("/api/session/s1/config", json={"config": "<ideogram><split><chord>"})
    assert response.status_code == 200
    payload = response.json()
    assert payload["config"] == "<ideogram><split><chord>"
    assert len(payload["renderHash"]) == 64
    assert payload["unbound"] == []
    assert client.get("/api/session/s1/config").json()["config"] == "<ideogram><split><chord>"


def test_put_config_accepts_raw_text_body(client):
    seed(client)
    response = client.put(
        "/api/session/s1/config", content="<histogram>", headers={"content-type": "text/plain"}
    )
    assert response.json()["config"] == "<histogram>"


def test_put_config_invalid_tokens_rejected(client):
    response = client.put("/api/session/s1/config", json={"config": "<foo>"})
    assert response.status_code == 400
    assert response.json()["code"] == "invalid_config"


def test_render_svg_and_export(client):
    seed(client)
    client.put("/api/session/s1/config", json={"config": "<ideogram><split><histogram><split><chord>"})
    rendered = client.post("/api/render", json={"sessionId": "s1"})
    assert rendered.status_code == 200
    assert rendered.headers["content-type"].startswith("image/svg+xml")
    assert 'class="track track-ideogram"' in rendered.text
    assert 'class="track track-chord"' in rendered.text

    exported = client.get("/api/export/s1.svg")
    assert exported.status_code == 200
    assert "attachment" in exported.headers["content-disposition"]
    assert exported.text == rendered.text


def test_retrieve_structural_exact_match(client):
    seed(client)
    client.put("/api/session/s1/config", json={"config": "<ideogram><split><tile><split><chord>"})
    payload = client.post("/api/retrieve", json={"mode": "structural", "sessionId": "s1"}).json()
    top = payload["hits"][0]
    assert top["id"] == "c-third"
    assert top["distance"] == 0
    assert top["rank"] == 1
    assert top["config"] == "<ideogram><split><tile><split><chord>"


def test_retrieve_semantic_returns_annotations(client):
    seed(client)
    payload = client.post("/api/retrieve", json={"mode": "semantic", "query": "mouse genome histogram rings", "k": 2}).json()
    assert len(payload["hits"]) == 2
    assert payload["hits"][0]["id"] == "b-second"


def test_retrieve_requires_mode_arguments(client):
    seed(client)
    assert client.post("/api/retrieve", json={"mode": "semantic"}).status_code == 400
    assert client.post("/api/retrieve", json={"mode": "structural"}).status_code == 400
    assert client.post("/api/retrieve", json={"mode": "nope"}).status_code == 400


def test_recommend_and_regenerate(client):
    seed(client)
    payload = client.post("/api/recommend", json={"sessionId": "s1", "query": "compare genomes", "k": 2}).json()
    assert payload["config"] == SCENARIO
    assert payload["attempts"] == 1
    assert len(payload["references"]) == 2
    assert len(payload["referenceRecords"]) == 2

    session = client.get("/api/session/s1").json()
    assert [entry["id"] for entry in session["history"]] == [payload["id"]]

    again = client.post(f"/api/recommend/{payload['id']}/regenerate").json()
    assert again["id"] != payload["id"]
    assert again["config"] == SCENARIO
    history = client.get("/api/session/s1").json()["history"]
    assert [entry["id"] for entry in history] == [payload["id"], again["id"]]


def test_regenerate_unknown_recommendation(client):
    assert client.post("/api/recommend/rec-404/regenerate").status_code == 404


def test_recommend_on_empty_corpus_conflicts(client):
    response = client.post("/api/recommend", json={"sessionId": "s1", "query": "anything"})
    assert response.status_code == 409


def test_dag_get_and_complete(client):
    seed(client)
    client.put("/api/session/s1/config", json={"config": "<ideogram><split><histogram><split><histogram>"})
    dag = client.get("/api/dag", params={"sessionId": "s1", "scope": "retrieved", "k": 3}).json()
    assert dag["truncated"] is False
    node_ids = {node["id"] for node in dag["nodes"]}
    assert "start@0" in node_ids
    current_edges = [edge for edge in dag["edges"] if edge["class"] == "current"]
    assert current_edges, "session config path should be classified current"

    clicked = "tile@3"
    assert clicked in node_ids
    done = client.post("/api/dag/complete", json={"sessionId": "s1", "nodeId": clicked, "k": 3}).json()
    assert done["config"] == "<ideogram><split><tile>"
    assert client.get("/api/session/s1/config").json()["config"] == "<ideogram><split><tile>"


def test_dag_corpus_scope(client):
    seed(client)
    dag = client.get("/api/dag", params={"sessionId": "s1", "scope": "corpus"}).json()
    assert dag["scope"] == "corpus"
    assert dag["truncated"] is False
    assert len(dag["nodes"]) > 0


def test_dag_complete_unknown_node(client):
    seed(client)
    response = client.post("/api/dag/complete", json={"sessionId": "s1", "nodeId": "bogus@9"})
    assert response.status_code == 404


def test_binding_style_update_changes_render(client):
    seed(client)
    before = client.put("/api/session/s1/config", json={"config": "<histogram>"}).json()["renderHash"]
    updated = client.put(
        "/api/session/s1/binding",
        json={"ring": 0, "pos": 0, "style": {"color": "#112233", "direction": "in"}},
    ).json()
    assert updated["binding"]["style"]["color"] == "#112233"
    assert updated["renderHash"] != before


def test_deleting_dataset_unbinds_tracks(client):
    seed(client)
    client.put("/api/session/s1/config", json={"config": "<chord>"})
    response = client.delete("/api/data/L1").json()
    assert response["unboundTracks"] == [{"sessionId": "s1", "ring": 0, "pos": 0}]
    bindings = client.get("/api/session/s1").json()["bindings"]
    assert bindings[0]["datasetId"] is None


def test_idempotent_retry_with_request_id(client):
    headers = {"X-Request-Id": "req-1"}
    first = client.post("/api/corpus/import", content=CORPUS_JSONL, headers=headers)
    second = client.post("/api/corpus/import", content=CORPUS_JSONL, headers=headers)
    assert first.status_code == second.status_code == 200
    assert first.content == second.content
    assert client.get("/api/health").json()["corpusVersion"] == 1  # applied once

    third = client.post("/api/corpus/import", content=CORPUS_JSONL, headers={"X-Request-Id": "req-2"})
    assert third.status_code == 200
    assert client.get("/api/health").json()["corpusVersion"] == 2


def test_session_persistence_across_restart(tmp_path):
    state_dir = tmp_path / "persist"
    state = AppState(state_dir=state_dir)
    with TestClient(create_app(state)) as client:
        client.post("/api/corpus/import", content=CORPUS_JSONL)
        client.post("/api/data?kind=karyotype", content=KARYOTYPE_CSV)
        client.post("/api/data?kind=attachment", content=ATTACHMENT_CSV)
        client.put("/api/session/s9/config", json={"config": "<histogram>"})

    revived = build_state(state_dir=state_dir)
    with TestClient(create_app(revived)) as client:
        assert client.get("/api/session/s9/config").json()["config"] == "<histogram>"
        assert client.get("/api/health").json()["corpusSize"] == 3
        assert [d["id"] for d in client.get("/api/data").json()] == ["K1", "A1"]


def test_corrupt_snapshot_refuses_start(tmp_path):
    state_dir = tmp_path / "broken"
    state_dir.mkdir()
    (state_dir / "corpus.jsonl").write_text('{"id": "x", "annotation": "a", "config": "<foo>"}\n')
    from circoskit.server import CorruptSnapshotError

    with pytest.raises(CorruptSnapshotError):
        build_state(state_dir=state_dir)
