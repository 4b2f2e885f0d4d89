"""Asynchronous propagation loop between edge nodes and the answer backend.

Each tick pulls newly missed queries from every edge, re-answers the whole
corpus of queries it has answered before (that periodic refresh is what
bounds how stale a served snapshot can get), and pushes versioned snapshots
back. Pushes that fail are simply retried on the next tick with a fresh
version; the edge's version gate makes any replay harmless.
"""

from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path
from typing import Optional, Protocol

from .edge_types import MissRecord, Snapshot
from .ensemble import EnsembleNode
from .errors import ContractViolation, PushError
from .wire import dumps


@dataclass(frozen=True)
class UpdaterConfig:
    update_period_ms: int = 60_000
    batch_max: int = 64
    lease_ms: int = 300_000

    def __post_init__(self) -> None:
        if min(self.update_period_ms, self.batch_max, self.lease_ms) <= 0:
            raise ContractViolation("updater config values must be positive")
        if self.lease_ms < self.update_period_ms:
            raise ContractViolation("lease_ms must be at least one update period")


class EdgeLink(Protocol):
    """Transport the updater uses to reach one edge node."""

    name: str

    def drain(self, max_records: int, now: int) -> list[MissRecord]: ...

    def push(self, snapshot: Snapshot, now: int, cost_records=None) -> Optional[str]:
        """Deliver one snapshot. Returns the edge's apply result, or None if
        delivery is asynchronous; raises PushError when the edge is unreachable.
        ``cost_records`` describes the work behind the snapshot so simulated
        transports can model how long the answer took to produce."""


class InProcessLink:
    """Direct link to an EdgeNode in the same process (tests, single-box runs)."""

    def __init__(self, name: str, node):
        self.name = name
        self.node = node

    def drain(self, max_records: int, now: int) -> list[MissRecord]:
        return self.node.drain_misses(max_records, now)

    def push(self, snapshot: Snapshot, now: int, cost_records=None) -> Optional[str]:
        return self.node.apply_update(snapshot, now)


class Updater:
    """One backend propagation loop over a set of edge links."""

    def __init__(
        self,
        ensemble: EnsembleNode,
        links: list[EdgeLink],
        config: UpdaterConfig | None = None,
        action_log_path: Path | str | None = None,
    ):
        self.ensemble = ensemble
        self.links = sorted(links, key=lambda l: l.name)
        self.config = config or UpdaterConfig()
        # Everything this loop has ever answered, per edge: the refresh set.
        self._corpus: dict[str, dict[tuple[str, int], MissRecord]] = {
            link.name: {} for link in self.links
        }
        # Keys whose last push failed; re-answered next tick even when the
        # tick is drain-only, so delivery converges without full refreshes.
        self._retry: dict[str, set[tuple[str, int]]] = {link.name: set() for link in self.links}
        self._log_fh = open(action_log_path, "a", encoding="utf-8") if action_log_path else None
        self._last_tick: int | None = None

    def corpus_size(self, edge_name: str) -> int:
        return len(self._corpus[edge_name])

    def _record(self, actions: list[dict], action: dict) -> None:
        actions.append(action)
        if self._log_fh is not None:
            self._log_fh.write(dumps(action) + "\n")
            self._log_fh.flush()

    def tick(self, now: int, refresh: bool = True) -> list[dict]:
        """One propagation round; returns the structured action list.

        With refresh=True (the periodic mode) every known query is
        re-answered so no served snapshot outlives one period plus push
        delay. refresh=False only drains and answers outstanding misses,
        which is how trailing rounds settle a run without generating new
        versions of everything.
        """
        if self._last_tick is not None and now < self._last_tick:
            raise ContractViolation("tick time went backwards")
        self._last_tick = now
        actions: list[dict] = []
        for link in self.links:
            corpus = self._corpus[link.name]
            drained: list[MissRecord] = []
            try:
                while True:
                    batch = link.drain(self.config.batch_max, now)
                    drained.extend(batch)
                    if len(batch) < self.config.batch_max:
                        break
            except PushError as exc:
                # edge unreachable: note it, try again next tick
                self._record(actions, {"type": "drain_failed", "edge": link.name,
                                       "reason": str(exc), "at": now})
                continue
            if drained:
                self._record(actions, {"type": "drain", "edge": link.name,
                                       "count": len(drained), "at": now})
            if refresh:
                work = dict(corpus)
            else:
                retry_keys = self._retry[link.name]
                work = {k: corpus[k] for k in retry_keys if k in corpus}
            for miss in drained:
                work[(miss.user_id, miss.key.value)] = miss
            for work_key in sorted(work):
                miss = work[work_key]
                snapshot, cost_records = self.ensemble.answer(miss, now)
                corpus[work_key] = miss
                self._record(actions, {
                    "type": "answer", "edge": link.name, "user_id": miss.user_id,
                    "key": miss.key.hex, "version": snapshot.version,
                    "model_id": snapshot.model_id, "at": now,
                    "cost_records": [
                        {"model_id": r.model_id, "input_tokens": r.input_tokens,
                         "output_tokens": r.output_tokens} for r in cost_records
                    ],
                })
                try:
                    result = link.push(snapshot, now, cost_records)
                except PushError as exc:
                    self._retry[link.name].add(work_key)
                    self._record(actions, {
                        "type": "push_failed", "edge": link.name,
                        "user_id": miss.user_id, "key": miss.key.hex,
                        "version": snapshot.version, "reason": str(exc), "at": now,
                    })
                    continue
                self._retry[link.name].discard(work_key)
                self._record(actions, {
                    "type": "push", "edge": link.name, "user_id": miss.user_id,
                    "key": miss.key.hex, "version": snapshot.version,
                    "result": result if result is not None else "in_flight", "at": now,
                })
        return actions

    def close(self) -> None:
        if self._log_fh is not None:
            self._log_fh.close()
