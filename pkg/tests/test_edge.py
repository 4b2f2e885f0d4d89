"""Edge node tests: serve/miss/update contracts, dedup, leases, persistence, atomicity."""

import threading

import pytest

from junglekit.cache import CacheConfig
from junglekit.core import LanguageTag, embed, query_key
from junglekit.edge import APPLIED, STALE_IGNORED, EdgeNode, EdgeNodeConfig
from junglekit.edge_types import QueryRequest, Snapshot
from junglekit.errors import PIIRejectedError


def snapshot(text: str, user="u1", version=1, at=0) -> Snapshot:
    return Snapshot(
        user_id=user,
        key=query_key(text),
        answer_text=f"[small-default] {text}",
        language=LanguageTag.EN,
        model_id="small-default",
        embedding=embed(text),
        version=version,
        generated_at=at,
    )


def request(text: str, user="u1") -> QueryRequest:
    return QueryRequest(user_id=user, session_id="s1", query_text=text)


def test_hit_after_update():
    node = EdgeNode("edge-test")
    node.apply_update(snapshot("what is my order status", at=50), now=60)
    res = node.serve_query(request("what is my order status"), now=100)
    assert res.status == "hit"
    assert res.similarity == 1.0
    assert res.age_ms == 50
    assert res.snapshot.model_id == "small-default"


def test_fresh_user_miss_enqueued():
    node = EdgeNode("edge-test")
    res = node.serve_query(request("never seen before"), now=5)
    assert res.status == "miss_enqueued"
    assert res.snapshot is None
    assert node.pending_miss_count() == 1


def test_miss_dedup():
    node = EdgeNode("edge-test")
    for i in range(5):
        node.serve_query(request("same missing query"), now=i)
    assert node.pending_miss_count() == 1
    assert node.misses_enqueued_total == 1


def test_unknown_user_is_miss_not_error():
    node = EdgeNode("edge-test")
    res = node.serve_query(request("anything", user="brand-new"), now=0)
    assert res.status == "miss_enqueued"


def test_pii_rejected_at_ingress():
    node = EdgeNode("edge-test")
    with pytest.raises(PIIRejectedError):
        node.serve_query(request("contact me at leak@example.com"), now=0)
    assert node.pending_miss_count() == 0


def test_apply_version_gate():
    node = EdgeNode("edge-test")
    assert node.apply_update(snapshot("q", version=1), now=0) == APPLIED
    assert node.apply_update(snapshot("q", version=2), now=1) == APPLIED
    assert node.apply_update(snapshot("q", version=1), now=2) == STALE_IGNORED
    assert node.apply_update(snapshot("q", version=2), now=3) == STALE_IGNORED
    assert node.applied_version("u1", query_key("q").value) == 2


def test_apply_clears_pending_miss():
    node = EdgeNode("edge-test")
    node.serve_query(request("pending question"), now=0)
    assert node.pending_miss_count() == 1
    node.apply_update(snapshot("pending question", at=10), now=12)
    assert node.pending_miss_count() == 0
    assert node.misses_cleared_total == 1


def test_drain_fifo_and_max():
    node = EdgeNode("edge-test")
    for i, text in enumerate(["first q", "second q", "third q"]):
        node.serve_query(request(text), now=i)
    drained = node.drain_misses(max_records=2, now=10)
    assert [m.query_text for m in drained] == ["first q", "second q"]
    assert node.pending_miss_count(now=10) == 1  # third still drainable


def test_drain_empty():
    node = EdgeNode("edge-test")
    assert node.drain_misses(max_records=4, now=0) == []


def test_lease_redelivery():
    node = EdgeNode("edge-test", EdgeNodeConfig(lease_ms=100))
    node.serve_query(request("leased question"), now=0)
    first = node.drain_misses(max_records=4, now=10)
    assert len(first) == 1
    # leased: not drainable before expiry
    assert node.drain_misses(max_records=4, now=50) == []
    assert node.leased_miss_count(now=50) == 1
    # lease expired without an apply -> redelivered
    again = node.drain_misses(max_records=4, now=110)
    assert [m.query_text for m in again] == ["leased question"]


def test_semantic_hit_different_wording():
    node = EdgeNode("edge-test", EdgeNodeConfig(cache=CacheConfig(similarity_threshold=0.8)))
    node.apply_update(snapshot("what is the shipping cost for order 12"), now=0)
    res = node.serve_query(request("what is the shipping cost for order 12 ?"), now=5)
    assert res.status == "hit"
    assert res.similarity >= 0.8


def test_persistence_replay(tmp_path):
    log = tmp_path / "edge.log"
    node = EdgeNode("edge-a", EdgeNodeConfig(log_path=log))
    node.apply_update(snapshot("persisted query", version=1, at=10), now=10)
    node.apply_update(snapshot("persisted query", version=2, at=20), now=20)
    node.apply_update(snapshot("other query", version=1, at=30), now=30)
    node.close()

    reborn = EdgeNode("edge-a", EdgeNodeConfig(log_path=log))
    res = reborn.serve_query(request("persisted query"), now=40)
    assert res.status == "hit"
    assert res.snapshot.version == 2
    assert reborn.applied_version("u1", query_key("other query").value) == 1
    reborn.close()


def test_persistence_replay_idempotent_after_reopen(tmp_path):
    log = tmp_path / "edge.log"
    node = EdgeNode("edge-a", EdgeNodeConfig(log_path=log))
    node.apply_update(snapshot("q1", version=3, at=5), now=5)
    node.close()
    # replaying the same log twice (reopen) must not double-apply
    reborn = EdgeNode("edge-a", EdgeNodeConfig(log_path=log))
    assert reborn.apply_update(snapshot("q1", version=3, at=5), now=6) == STALE_IGNORED
    reborn.close()


def test_concurrent_apply_and_serve_atomic():
    node = EdgeNode("edge-test")
    text = "contended query text"
    node.apply_update(snapshot(text, version=1, at=0), now=0)
    stop = threading.Event()
    errors: list[str] = []

    def writer():
        version = 2
        while not stop.is_set():
            node.apply_update(snapshot(text, version=version, at=version), now=version)
            version += 1

    def reader():
        while not stop.is_set():
            res = node.serve_query(request(text), now=10**9)
            # every observed snapshot must be internally consistent:
            # answer text, version and generated_at all from the same apply
            if res.snapshot.generated_at != res.snapshot.version:
                errors.append("torn read")

    threads = [threading.Thread(target=writer)] + [
        threading.Thread(target=reader) for _ in range(3)
    ]
    for t in threads:
        t.start()
    import time

    time.sleep(0.4)
    stop.set()
    for t in threads:
        t.join()
    assert errors == []


def test_serve_path_has_no_llm_calls():
    node = EdgeNode("edge-test")
    node.apply_update(snapshot("observed query"), now=0)
    node.serve_query(request("observed query"), now=1)
    node.serve_query(request("missing query"), now=2)
    assert node.instrumentation.llm_calls_during_serve == 0
