"""Exercise the semantic cache: threshold matching, LRU eviction, TTL expiry,
and version-gated replays."""

from junglekit.cache import CacheConfig, CacheEntry, SemanticCache
from junglekit.core import embed, query_key

cache = SemanticCache(CacheConfig(capacity=2, similarity_threshold=0.85))


def put(text: str, version: int, now: int, ttl: int = 0):
    entry = CacheEntry(
        key=query_key(text),
        embedding=embed(text),
        payload=f"answer for: {text}".encode(),
        version=version,
        inserted_at=now,
        ttl=ttl,
    )
    result = cache.put(entry, now)
    evicted = [e.key.hex for e in result.evicted]
    print(f"put v{version} {text!r:35} stored={result.stored} evicted={evicted}")


def probe(text: str, now: int):
    hit = cache.lookup(embed(text), now)
    if hit is None:
        print(f"lookup {text!r:38} -> miss")
    else:
        print(f"lookup {text!r:38} -> hit sim={hit.similarity:.3f} "
              f"payload={hit.entry.payload.decode()!r}")


print("== fill to capacity, then overflow evicts the least recently used ==")
put("what is my order status", version=1, now=0)
put("when does my shipment arrive", version=1, now=1)
probe("what is my order status", now=2)          # refreshes recency of the first entry
put("how do i issue a refund", version=1, now=3)  # evicts the shipment entry

print("\n== near-duplicate phrasing still hits ==")
probe("what is my order status ?", now=4)
probe("a totally unrelated question", now=5)

print("\n== stale version replay is a no-op ==")
put("what is my order status", version=5, now=6)
put("what is my order status", version=3, now=7)  # ignored

print("\n== TTL expiry is boundary-inclusive ==")
put("flash sale banner copy", version=1, now=100, ttl=50)
probe("flash sale banner copy", now=149)
print(f"expire(now=150) removed {cache.expire(150)} entries")
probe("flash sale banner copy", now=151)
