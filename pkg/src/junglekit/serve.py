"""Real wire-protocol processes around the in-memory components.

The edge app speaks the JSON protocol the copilot client consumes; the
backend loop drives an Updater over HTTP links at a fixed wall-clock
period. Both are thin shells: every behavior they expose is the library
behavior, which is where the tests live.
"""

from __future__ import annotations

import json
import time
from dataclasses import dataclass
from pathlib import Path

import httpx
from fastapi import FastAPI, Request
from fastapi.responses import JSONResponse

from .cache import CacheConfig
from .core import QueryKey
from .edge import EdgeNode, EdgeNodeConfig
from .edge_types import MissRecord, Snapshot
from .ensemble import EnsembleNode, ModelRegistry
from .errors import ConfigError, ContractViolation, PIIRejectedError, PushError
from .sim.config import parse_model_record
from .updater import Updater, UpdaterConfig
from .wire import (
    miss_record_to_wire,
    query_request_from_wire,
    query_response_to_wire,
    snapshot_from_wire,
    snapshot_to_wire,
)


def wall_clock_ms() -> int:
    return int(time.time() * 1000)


def create_edge_app(node: EdgeNode, clock=wall_clock_ms) -> FastAPI:
    app = FastAPI(title="junglekit-edge", docs_url=None, redoc_url=None)

    @app.get("/v1/healthz")
    def healthz():
        return {"status": "ok"}

    @app.post("/v1/query")
    async def query(request: Request):
        try:
            body = query_request_from_wire(await request.json())
        except (ContractViolation, json.JSONDecodeError) as exc:
            return JSONResponse({"error": str(exc)}, status_code=400)
        try:
            response = node.serve_query(body, now=clock())
        except PIIRejectedError as exc:
            return JSONResponse({"error": str(exc)}, status_code=422)
        return JSONResponse(query_response_to_wire(response))

    @app.put("/v1/snapshots/{user_id}/{key_hex}")
    async def put_snapshot(user_id: str, key_hex: str, request: Request):
        try:
            snapshot = snapshot_from_wire(await request.json())
        except (ContractViolation, json.JSONDecodeError) as exc:
            return JSONResponse({"error": str(exc)}, status_code=400)
        if snapshot.user_id != user_id or snapshot.key != QueryKey.from_hex(key_hex):
            return JSONResponse({"error": "path does not match snapshot body"}, status_code=400)
        result = node.apply_update(snapshot, now=clock())
        return JSONResponse({"result": result})

    @app.post("/v1/misses/drain")
    async def drain(request: Request):
        try:
            body = await request.json()
            max_records = int(body["max"])
        except (KeyError, TypeError, ValueError, json.JSONDecodeError) as exc:
            return JSONResponse({"error": f"bad drain request: {exc}"}, status_code=400)
        records = node.drain_misses(max_records, now=clock())
        return JSONResponse([miss_record_to_wire(m) for m in records])

    return app


class HttpEdgeLink:
    """Updater link speaking the edge wire protocol over HTTP."""

    def __init__(self, name: str, base_url: str, client: httpx.Client | None = None):
        self.name = name
        self.base_url = base_url.rstrip("/")
        self.client = client or httpx.Client(base_url=self.base_url, timeout=10.0)

    def drain(self, max_records: int, now: int) -> list[MissRecord]:
        try:
            resp = self.client.post("/v1/misses/drain", json={"max": max_records})
            resp.raise_for_status()
        except httpx.HTTPError as exc:
            raise PushError(f"drain from {self.name} failed: {exc}") from exc
        from .wire import miss_record_from_wire

        return [miss_record_from_wire(item) for item in resp.json()]

    def push(self, snapshot: Snapshot, now: int, cost_records=None) -> str:
        try:
            resp = self.client.put(
                f"/v1/snapshots/{snapshot.user_id}/{snapshot.key.hex}",
                json=snapshot_to_wire(snapshot),
            )
            resp.raise_for_status()
        except httpx.HTTPError as exc:
            raise PushError(f"push to {self.name} failed: {exc}") from exc
        return resp.json()["result"]


# -- process configuration -----------------------------------------------------


@dataclass(frozen=True)
class EdgeServeConfig:
    node_id: str
    host: str
    port: int
    edge: EdgeNodeConfig


def load_edge_serve_config(path: Path | str) -> EdgeServeConfig:
    try:
        raw = json.loads(Path(path).read_text(encoding="utf-8"))
    except (OSError, json.JSONDecodeError) as exc:
        raise ConfigError(f"cannot read edge config {path}: {exc}") from exc
    cache_raw = raw.get("cache", {})
    return EdgeServeConfig(
        node_id=raw.get("node_id", "edge-0"),
        host=raw.get("host", "127.0.0.1"),
        port=int(raw.get("port", 8801)),
        edge=EdgeNodeConfig(
            cache=CacheConfig(
                capacity=int(cache_raw.get("capacity", 256)),
                similarity_threshold=float(cache_raw.get("similarity_threshold", 0.85)),
            ),
            lease_ms=int(raw.get("lease_ms", 300_000)),
            log_path=raw.get("log_path"),
        ),
    )


@dataclass(frozen=True)
class BackendServeConfig:
    registry: ModelRegistry
    updater: UpdaterConfig
    edges: tuple[tuple[str, str], ...]  # (name, base_url)
    action_log_path: str | None


def load_backend_serve_config(path: Path | str) -> BackendServeConfig:
    try:
        raw = json.loads(Path(path).read_text(encoding="utf-8"))
    except (OSError, json.JSONDecodeError) as exc:
        raise ConfigError(f"cannot read backend config {path}: {exc}") from exc
    models_raw = raw.get("models")
    if not models_raw:
        raise ConfigError("backend config needs a 'models' list")
    registry = ModelRegistry(
        [parse_model_record(r, context=f"index {i}") for i, r in enumerate(models_raw)]
    )
    u = raw.get("updater", {})
    period = int(u.get("update_period_ms", 60_000))
    updater = UpdaterConfig(
        update_period_ms=period,
        batch_max=int(u.get("batch_max", 64)),
        lease_ms=int(u.get("lease_ms", 5 * period)),
    )
    edges = tuple((e["name"], e["base_url"]) for e in raw.get("edges", []))
    if not edges:
        raise ConfigError("backend config needs at least one edge in 'edges'")
    return BackendServeConfig(
        registry=registry,
        updater=updater,
        edges=edges,
        action_log_path=raw.get("action_log_path"),
    )


def run_edge(config: EdgeServeConfig) -> None:  # pragma: no cover - process entry
    import uvicorn

    node = EdgeNode(config.node_id, config.edge)
    app = create_edge_app(node)
    uvicorn.run(app, host=config.host, port=config.port, log_level="info")


def build_backend(config: BackendServeConfig,
                  client_factory=None) -> Updater:
    links = []
    for name, base_url in config.edges:
        client = client_factory(name, base_url) if client_factory else None
        links.append(HttpEdgeLink(name, base_url, client=client))
    ensemble = EnsembleNode(config.registry)
    return Updater(ensemble, links, config.updater,
                   action_log_path=config.action_log_path)


def run_backend(config: BackendServeConfig, max_ticks: int | None = None,
                clock=wall_clock_ms, sleep=time.sleep, client_factory=None) -> int:
    """Tick forever (or max_ticks times); returns the tick count."""
    updater = build_backend(config, client_factory=client_factory)
    ticks = 0
    period_s = config.updater.update_period_ms / 1000.0
    while max_ticks is None or ticks < max_ticks:
        updater.tick(clock())
        ticks += 1
        if max_ticks is not None and ticks >= max_ticks:
            break
        sleep(period_s)
    return ticks
