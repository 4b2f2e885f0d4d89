"""Semantic-cache tests, including the linear-scan oracle equivalence fuzz."""

import random

import numpy as np
import pytest

from junglekit.cache import CacheConfig, CacheEntry, SemanticCache
from junglekit.core import DIMS, Embedding, QueryKey, cosine, embed
from junglekit.errors import ContractViolation


def entry(key: int, emb: Embedding, version: int = 1, at: int = 0, ttl: int = 0) -> CacheEntry:
    return CacheEntry(
        key=QueryKey(key), embedding=emb, payload=b"x", version=version, inserted_at=at, ttl=ttl
    )


def unit_vec(rng: random.Random) -> Embedding:
    vals = np.array([rng.gauss(0, 1) for _ in range(DIMS)])
    return Embedding(vals / np.linalg.norm(vals))


# --- reference implementation for the oracle fuzz ---------------------------

class ReferenceCache:
    """Deliberately naive list-based mirror of the cache contract."""

    def __init__(self, capacity: int, threshold: float):
        self.capacity = capacity
        self.threshold = threshold
        self.items: list[CacheEntry] = []  # LRU order: oldest first

    def put(self, e: CacheEntry, now: int):
        for i, old in enumerate(self.items):
            if old.key == e.key:
                if e.version <= old.version:
                    return (False, [])
                del self.items[i]
                self.items.append(e)
                return (True, [])
        self.items.append(e)
        evicted = []
        while len(self.items) > self.capacity:
            evicted.append(self.items.pop(0))
        return (True, evicted)

    def lookup(self, probe: Embedding, now: int):
        if probe.is_zero:
            return None
        live = [e for e in self.items if not (e.ttl > 0 and e.inserted_at + e.ttl <= now)]
        if not live:
            return None
        scored = sorted(live, key=lambda e: (-cosine(probe, e.embedding), e.key.value))
        best = scored[0]
        sim = cosine(probe, best.embedding)
        if sim < self.threshold:
            return None
        self.items.remove(best)
        self.items.append(best)
        return (best.key, sim)

    def expire(self, now: int) -> int:
        dead = [e for e in self.items if e.ttl > 0 and e.inserted_at + e.ttl <= now]
        self.items = [e for e in self.items if e not in dead]
        return len(dead)


# --- direct contract tests ---------------------------------------------------

def test_put_into_empty():
    c = SemanticCache(CacheConfig(capacity=4))
    res = c.put(entry(1, embed("hello there")), now=0)
    assert res.stored and res.evicted == ()
    assert len(c) == 1


def test_capacity_one_evicts_lru():
    c = SemanticCache(CacheConfig(capacity=1))
    c.put(entry(1, embed("first entry")), now=0)
    res = c.put(entry(2, embed("second entry")), now=1)
    assert res.stored
    assert [e.key.value for e in res.evicted] == [1]
    assert len(c) == 1


def test_stale_version_replay_is_noop():
    c = SemanticCache(CacheConfig(capacity=4))
    c.put(entry(1, embed("some text here"), version=5), now=0)
    res = c.put(entry(1, embed("older text"), version=3), now=1)
    assert not res.stored
    assert c.get(QueryKey(1)).version == 5


def test_version_monotone_observable():
    c = SemanticCache(CacheConfig(capacity=4))
    seen = []
    for v in [1, 3, 2, 7, 4]:
        c.put(entry(1, embed("abcdefg"), version=v), now=v)
        seen.append(c.get(QueryKey(1)).version)
    assert seen == sorted(seen)  # never decreases


def test_lookup_identity_hit():
    c = SemanticCache(CacheConfig(capacity=4))
    c.put(entry(1, embed("what is my order status")), now=0)
    hit = c.lookup(embed("what is my order status"), now=1)
    assert hit is not None and hit.similarity == 1.0


def test_lookup_empty_misses():
    c = SemanticCache(CacheConfig(capacity=4))
    assert c.lookup(embed("anything at all"), now=0) is None


def test_zero_probe_always_misses():
    c = SemanticCache(CacheConfig(capacity=4))
    c.put(entry(1, Embedding.zero()), now=0)
    assert c.lookup(Embedding.zero(), now=0) is None


def test_hit_refreshes_recency():
    c = SemanticCache(CacheConfig(capacity=2, similarity_threshold=0.5))
    c.put(entry(1, embed("alpha bravo charlie")), now=0)
    c.put(entry(2, embed("delta echo foxtrot")), now=1)
    assert c.lookup(embed("alpha bravo charlie"), now=2) is not None
    res = c.put(entry(3, embed("golf hotel india")), now=3)
    assert [e.key.value for e in res.evicted] == [2]  # 1 was refreshed by the hit


def test_expire_boundary_inclusive():
    c = SemanticCache(CacheConfig(capacity=4))
    c.put(entry(1, embed("abcdef"), at=100, ttl=10), now=100)
    assert c.expire(now=109) == 0
    assert c.expire(now=110) == 1


def test_expire_none_set():
    c = SemanticCache(CacheConfig(capacity=4))
    c.put(entry(1, embed("abcdef")), now=0)
    assert c.expire(now=10**9) == 0


def test_lookup_skips_expired():
    c = SemanticCache(CacheConfig(capacity=4))
    c.put(entry(1, embed("same text probe"), at=0, ttl=5), now=0)
    assert c.lookup(embed("same text probe"), now=10) is None


def test_threshold_monotonicity():
    rng = random.Random(7)
    entries = [entry(i, unit_vec(rng)) for i in range(10)]
    probe = unit_vec(rng)
    decisions = []
    for threshold in [0.0, 0.3, 0.6, 0.9, 1.0]:
        c = SemanticCache(CacheConfig(capacity=16, similarity_threshold=threshold))
        for e in entries:
            c.put(e, now=0)
        decisions.append(c.lookup(probe, now=1) is not None)
    # once a threshold misses, all higher thresholds miss
    assert decisions == sorted(decisions, reverse=True)


def test_malformed_entry_rejected():
    with pytest.raises(ContractViolation):
        CacheEntry(QueryKey(1), embed("abc"), payload="not-bytes", version=1, inserted_at=0)
    with pytest.raises(ContractViolation):
        CacheConfig(capacity=0)


# --- oracle equivalence fuzz --------------------------------------------------

def test_oracle_equivalence_fuzz():
    rng = random.Random(0xCAFE)
    vocabulary = [unit_vec(rng) for _ in range(40)]
    for round_no in range(200):
        capacity = rng.randint(1, 8)
        threshold = rng.choice([0.0, 0.2, 0.5, 0.85, 0.99])
        real = SemanticCache(CacheConfig(capacity=capacity, similarity_threshold=threshold))
        ref = ReferenceCache(capacity, threshold)
        now = 0
        for step in range(rng.randint(5, 60)):
            now += rng.randint(0, 20)
            op = rng.random()
            if op < 0.5:
                e = entry(
                    rng.randint(1, 12),
                    rng.choice(vocabulary),
                    version=rng.randint(1, 6),
                    at=now,
                    ttl=rng.choice([0, 0, 15, 40]),
                )
                got = real.put(e, now)
                want_stored, want_evicted = ref.put(e, now)
                assert got.stored == want_stored
                assert [x.key for x in got.evicted] == [x.key for x in want_evicted]
            elif op < 0.9:
                probe = rng.choice(vocabulary + [Embedding.zero()])
                got = real.lookup(probe, now)
                want = ref.lookup(probe, now)
                if want is None:
                    assert got is None
                else:
                    assert got is not None
                    assert got.entry.key == want[0]
                    assert got.similarity == want[1]
            else:
                assert real.expire(now) == ref.expire(now)
            assert len(real) <= capacity  # capacity bound after every op
