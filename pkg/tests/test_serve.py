"""Wire-protocol tests: endpoints, status codes, and the HTTP backend loop."""

import itertools

import pytest
from fastapi.testclient import TestClient

from junglekit.core import LanguageTag, query_key
from junglekit.edge import EdgeNode, EdgeNodeConfig
from junglekit.ensemble import EnsembleNode, LatencyModel, ModelRegistry, ModelSpec
from junglekit.serve import HttpEdgeLink, create_edge_app
from junglekit.updater import Updater, UpdaterConfig
from junglekit.wire import snapshot_to_wire

from .test_edge import snapshot


@pytest.fixture()
def edge_client():
    clock = itertools.count(1000, 1000)
    node = EdgeNode("edge-http", EdgeNodeConfig())
    app = create_edge_app(node, clock=lambda: next(clock))
    with TestClient(app) as client:
        yield node, client


def test_healthz(edge_client):
    _, client = edge_client
    resp = client.get("/v1/healthz")
    assert resp.status_code == 200
    assert resp.json() == {"status": "ok"}


def test_query_miss_then_hit(edge_client):
    node, client = edge_client
    body = {"user_id": "u1", "session_id": "s1",
            "query_text": "what is my order status", "language_hint": None}
    resp = client.post("/v1/query", json=body)
    assert resp.status_code == 200
    assert resp.json()["status"] == "miss_enqueued"

    snap = snapshot("what is my order status")
    put = client.put(f"/v1/snapshots/u1/{snap.key.hex}", json=snapshot_to_wire(snap))
    assert put.status_code == 200
    assert put.json() == {"result": "applied"}

    resp = client.post("/v1/query", json=body)
    data = resp.json()
    assert data["status"] == "hit"
    assert data["snapshot"]["model_id"] == "small-default"
    assert data["similarity"] == 1.0
    assert data["age_ms"] >= 0


def test_query_pii_is_422(edge_client):
    _, client = edge_client
    body = {"user_id": "u1", "session_id": "s1",
            "query_text": "mail me at a@b.com", "language_hint": None}
    resp = client.post("/v1/query", json=body)
    assert resp.status_code == 422
    assert "PII" in resp.json()["error"]


def test_query_malformed_is_400(edge_client):
    _, client = edge_client
    assert client.post("/v1/query", json={"nope": 1}).status_code == 400


def test_put_snapshot_stale_and_mismatch(edge_client):
    _, client = edge_client
    snap = snapshot("versioned question", version=2)
    wire = snapshot_to_wire(snap)
    assert client.put(f"/v1/snapshots/u1/{snap.key.hex}", json=wire).json() == {
        "result": "applied"
    }
    assert client.put(f"/v1/snapshots/u1/{snap.key.hex}", json=wire).json() == {
        "result": "stale_ignored"
    }
    wrong_key = query_key("a different question").hex
    assert client.put(f"/v1/snapshots/u1/{wrong_key}", json=wire).status_code == 400
    assert client.put(f"/v1/snapshots/other-user/{snap.key.hex}", json=wire).status_code == 400


def test_drain_endpoint(edge_client):
    _, client = edge_client
    for text in ["first missing", "second missing"]:
        client.post("/v1/query", json={"user_id": "u1", "session_id": "s1",
                                       "query_text": text, "language_hint": None})
    resp = client.post("/v1/misses/drain", json={"max": 10})
    records = resp.json()
    assert [r["query_text"] for r in records] == ["first missing", "second missing"]
    assert all(len(r["key"]) == 16 for r in records)
    # drained records are leased now
    assert client.post("/v1/misses/drain", json={"max": 10}).json() == []
    assert client.post("/v1/misses/drain", json={"max": "x"}).status_code == 400


def test_run_backend_ticks_against_edge(edge_client, tmp_path):
    node, client = edge_client
    client.post("/v1/query", json={"user_id": "u-9", "session_id": "s1",
                                   "query_text": "how are sales trending",
                                   "language_hint": None})
    import json

    from junglekit.serve import load_backend_serve_config, run_backend

    cfg_path = tmp_path / "backend.json"
    cfg_path.write_text(json.dumps({
        "models": [{"model_id": "small-default", "language": "other",
                    "price_in": 0.3, "price_out": 0.3,
                    "sim_latency_ms": {"median": 700, "sigma": 0.4}}],
        "updater": {"update_period_ms": 60_000},
        "edges": [{"name": "edge-http", "base_url": "http://testserver"}],
    }), encoding="utf-8")
    config = load_backend_serve_config(cfg_path)
    clock_values = iter([60_000, 120_000])
    ticks = run_backend(config, max_ticks=2, clock=lambda: next(clock_values),
                        sleep=lambda s: None, client_factory=lambda name, url: client)
    assert ticks == 2
    resp = client.post("/v1/query", json={"user_id": "u-9", "session_id": "s1",
                                          "query_text": "how are sales trending",
                                          "language_hint": None})
    body = resp.json()
    assert body["status"] == "hit"
    assert body["snapshot"]["version"] == 2  # second tick refreshed the corpus


def test_http_backend_loop_end_to_end(edge_client):
    node, client = edge_client
    client.post("/v1/query", json={"user_id": "u-42", "session_id": "s1",
                                   "query_text": "quel est le prix de la livraison",
                                   "language_hint": "fr"})
    registry = ModelRegistry([
        ModelSpec("small-fr", LanguageTag.FR, 0.3, 0.3, LatencyModel(800, 0.4)),
        ModelSpec("small-default", LanguageTag.OTHER, 0.3, 0.3, LatencyModel(700, 0.4)),
    ])
    link = HttpEdgeLink("edge-http", "http://testserver", client=client)
    updater = Updater(EnsembleNode(registry), [link], UpdaterConfig())
    actions = updater.tick(now=60_000)
    kinds = [a["type"] for a in actions]
    assert kinds == ["drain", "answer", "push"]
    assert actions[-1]["result"] == "applied"
    resp = client.post("/v1/query", json={"user_id": "u-42", "session_id": "s1",
                                          "query_text": "quel est le prix de la livraison",
                                          "language_hint": "fr"})
    assert resp.json()["status"] == "hit"
    assert resp.json()["snapshot"]["model_id"] == "small-fr"
