"""Edge caching node: serves the read path from per-user snapshot stores,
queues what it cannot serve, and applies backend pushes idempotently.

The serve path never calls the backend. That is the whole point of the
design, and it is enforced twice: structurally (the node holds no reference
to any model component) and observably (an instrumentation hook counts
backend invocations while a serve is in flight; the count must stay zero).
"""

from __future__ import annotations

import threading
from dataclasses import dataclass, field
from pathlib import Path

from .cache import CacheConfig, CacheEntry, SemanticCache
from .core import detect_pii, embed, query_key
from .edge_types import MissRecord, QueryRequest, QueryResponse, Snapshot
from .errors import ContractViolation, PIIRejectedError
from .storage import SnapshotLog
from .wire import dumps, snapshot_from_wire, snapshot_to_wire

DEFAULT_LEASE_MS = 300_000  # 5x the default update period

APPLIED = "applied"
STALE_IGNORED = "stale_ignored"


@dataclass
class EdgeNodeConfig:
    cache: CacheConfig = field(default_factory=CacheConfig)
    lease_ms: int = DEFAULT_LEASE_MS
    log_path: Path | str | None = None

    def __post_init__(self) -> None:
        if self.lease_ms <= 0:
            raise ContractViolation("lease_ms must be positive")


class Instrumentation:
    """Counters proving read-path isolation at run time."""

    def __init__(self):
        self.serve_depth = 0
        self.llm_calls_total = 0
        self.llm_calls_during_serve = 0

    def serve_enter(self) -> None:
        self.serve_depth += 1

    def serve_exit(self) -> None:
        self.serve_depth -= 1

    def llm_call(self) -> None:
        self.llm_calls_total += 1
        if self.serve_depth > 0:
            self.llm_calls_during_serve += 1


@dataclass
class _PendingMiss:
    record: MissRecord
    lease_until: int | None = None  # None => drainable now

    def drainable(self, now: int) -> bool:
        return self.lease_until is None or self.lease_until <= now


class EdgeNode:
    """One caching node; thread-safe so a real server can front it."""

    def __init__(self, node_id: str, config: EdgeNodeConfig | None = None,
                 instrumentation: Instrumentation | None = None):
        self.node_id = node_id
        self.config = config or EdgeNodeConfig()
        self.instrumentation = instrumentation or Instrumentation()
        self._lock = threading.RLock()
        self._stores: dict[str, SemanticCache] = {}
        # Highest version ever applied per (user, key); survives cache
        # eviction so replayed pushes can never double-apply.
        self._applied_versions: dict[tuple[str, int], int] = {}
        self._misses: dict[tuple[str, int], _PendingMiss] = {}
        self._log = SnapshotLog(self.config.log_path) if self.config.log_path else None
        self.misses_enqueued_total = 0
        self.misses_cleared_total = 0
        if self.config.log_path:
            self._replay_log()

    def _replay_log(self) -> None:
        for snapshot in SnapshotLog.replay(self.config.log_path):
            self._apply_locked(snapshot, now=snapshot.generated_at, persist=False)

    def _store_for(self, user_id: str) -> SemanticCache:
        store = self._stores.get(user_id)
        if store is None:
            store = SemanticCache(self.config.cache)
            self._stores[user_id] = store
        return store

    # -- read path ------------------------------------------------------

    def serve_query(self, req: QueryRequest, now: int) -> QueryResponse:
        """Serve from the user's snapshot store or queue a miss.

        Raises PIIRejectedError if the payload carries detectable PII:
        redaction is the client's job, and silently fixing it here would
        hide client bugs behind the privacy boundary.
        """
        if detect_pii(req.query_text):
            raise PIIRejectedError("query_text contains unredacted PII")
        self.instrumentation.serve_enter()
        try:
            with self._lock:
                probe = embed(req.query_text)
                hit = self._store_for(req.user_id).lookup(probe, now)
                if hit is not None:
                    snapshot = snapshot_from_wire_payload(hit.entry.payload)
                    return QueryResponse(
                        status="hit",
                        snapshot=snapshot,
                        similarity=hit.similarity,
                        age_ms=max(0, now - snapshot.generated_at),
                    )
                key = query_key(req.query_text)
                miss_key = (req.user_id, key.value)
                if miss_key not in self._misses:
                    self._misses[miss_key] = _PendingMiss(
                        MissRecord(
                            user_id=req.user_id,
                            key=key,
                            query_text=req.query_text,
                            language_hint=req.language_hint,
                            enqueued_at=now,
                        )
                    )
                    self.misses_enqueued_total += 1
                return QueryResponse(status="miss_enqueued")
        finally:
            self.instrumentation.serve_exit()

    # -- update path -----------------------------------------------------

    def apply_update(self, snapshot: Snapshot, now: int) -> str:
        with self._lock:
            return self._apply_locked(snapshot, now, persist=True)

    def _apply_locked(self, snapshot: Snapshot, now: int, persist: bool) -> str:
        version_key = (snapshot.user_id, snapshot.key.value)
        if snapshot.version <= self._applied_versions.get(version_key, 0):
            return STALE_IGNORED
        self._applied_versions[version_key] = snapshot.version
        entry = CacheEntry(
            key=snapshot.key,
            embedding=snapshot.embedding,
            payload=dumps(snapshot_to_wire(snapshot)).encode("utf-8"),
            version=snapshot.version,
            inserted_at=now,
            ttl=0,
        )
        self._store_for(snapshot.user_id).put(entry, now)
        if version_key in self._misses:
            del self._misses[version_key]
            self.misses_cleared_total += 1
        if persist and self._log is not None:
            self._log.append(snapshot)
        return APPLIED

    def drain_misses(self, max_records: int, now: int) -> list[MissRecord]:
        """Up to max_records drainable misses, FIFO, leased until cleared."""
        if max_records < 1:
            raise ContractViolation("max_records must be >= 1")
        with self._lock:
            drained: list[MissRecord] = []
            pending = sorted(
                (p for p in self._misses.values() if p.drainable(now)),
                key=lambda p: p.record.enqueued_at,
            )
            for p in pending[:max_records]:
                p.lease_until = now + self.config.lease_ms
                drained.append(p.record)
            return drained

    # -- observation -------------------------------------------------------

    def pending_miss_count(self, now: int | None = None) -> int:
        with self._lock:
            if now is None:
                return len(self._misses)
            return sum(1 for p in self._misses.values() if p.drainable(now))

    def leased_miss_count(self, now: int) -> int:
        with self._lock:
            return sum(1 for p in self._misses.values() if not p.drainable(now))

    def applied_version(self, user_id: str, key_value: int) -> int:
        with self._lock:
            return self._applied_versions.get((user_id, key_value), 0)

    def close(self) -> None:
        if self._log is not None:
            self._log.close()


def snapshot_from_wire_payload(payload: bytes) -> Snapshot:
    import json

    return snapshot_from_wire(json.loads(payload.decode("utf-8")))
