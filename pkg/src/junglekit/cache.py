"""Embedding-keyed cache with cosine matching, LRU eviction, and TTL expiry.

One instance backs one user's snapshot store at an edge node (and one
browser session in the client). Entry counts stay small at that scope, so
lookups are a straight linear scan over live entries; the test suite holds
the scan to an independent reference implementation.
"""

from __future__ import annotations

from collections import OrderedDict
from dataclasses import dataclass, field

from .core import Embedding, QueryKey, cosine
from .errors import ContractViolation

DEFAULT_SIMILARITY_THRESHOLD = 0.85


@dataclass(frozen=True)
class CacheEntry:
    key: QueryKey
    embedding: Embedding
    payload: bytes
    version: int
    inserted_at: int
    ttl: int = 0  # milliseconds; 0 means no expiry

    def __post_init__(self) -> None:
        if self.version < 0 or self.ttl < 0:
            raise ContractViolation("version and ttl must be non-negative")
        if not isinstance(self.payload, (bytes, bytearray)):
            raise ContractViolation("payload must be bytes")

    def expired(self, now: int) -> bool:
        return self.ttl > 0 and self.inserted_at + self.ttl <= now


@dataclass(frozen=True)
class CacheConfig:
    capacity: int = 128
    similarity_threshold: float = DEFAULT_SIMILARITY_THRESHOLD

    def __post_init__(self) -> None:
        if self.capacity < 1:
            raise ContractViolation("capacity must be >= 1")
        if not 0.0 <= self.similarity_threshold <= 1.0:
            raise ContractViolation("similarity_threshold must be in [0, 1]")


@dataclass(frozen=True)
class PutResult:
    stored: bool
    evicted: tuple[CacheEntry, ...] = ()


@dataclass(frozen=True)
class Hit:
    entry: CacheEntry
    similarity: float


@dataclass
class SemanticCache:
    """LRU + TTL cache matched by cosine similarity over unit-norm embeddings."""

    config: CacheConfig = field(default_factory=CacheConfig)
    _entries: OrderedDict[int, CacheEntry] = field(default_factory=OrderedDict)

    def __len__(self) -> int:
        return len(self._entries)

    def entries(self) -> list[CacheEntry]:
        """Entries in least-recently-used-first order."""
        return list(self._entries.values())

    def get(self, key: QueryKey) -> CacheEntry | None:
        return self._entries.get(key.value)

    def put(self, entry: CacheEntry, now: int) -> PutResult:
        """Insert or version-replace; stale versions replay as no-ops."""
        existing = self._entries.get(entry.key.value)
        if existing is not None and entry.version <= existing.version:
            return PutResult(stored=False)
        self._entries[entry.key.value] = entry
        self._entries.move_to_end(entry.key.value)
        evicted: list[CacheEntry] = []
        while len(self._entries) > self.config.capacity:
            _, victim = self._entries.popitem(last=False)
            evicted.append(victim)
        return PutResult(stored=True, evicted=tuple(evicted))

    def lookup(self, probe: Embedding, now: int) -> Hit | None:
        """Best cosine match among live entries, or None below threshold.

        A zero probe never matches. Ties on similarity go to the smaller
        key so runs are reproducible. A hit counts as a use for LRU.
        """
        if probe.is_zero:
            return None
        best: CacheEntry | None = None
        best_sim = -1.0
        for entry in self._entries.values():
            if entry.expired(now):
                continue
            sim = cosine(probe, entry.embedding)
            if sim > best_sim or (sim == best_sim and best is not None and entry.key < best.key):
                best, best_sim = entry, sim
        if best is None or best_sim < self.config.similarity_threshold:
            return None
        self._entries.move_to_end(best.key.value)
        return Hit(entry=best, similarity=best_sim)

    def expire(self, now: int) -> int:
        """Drop every entry whose TTL has elapsed; returns the count removed."""
        dead = [k for k, e in self._entries.items() if e.expired(now)]
        for k in dead:
            del self._entries[k]
        return len(dead)
