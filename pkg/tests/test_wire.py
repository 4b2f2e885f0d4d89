"""Wire-format round trips and the append-only snapshot log."""

import json

import pytest

from junglekit.core import LanguageTag, embed, query_key
from junglekit.edge_types import MissRecord, QueryRequest, QueryResponse, Snapshot
from junglekit.errors import ContractViolation
from junglekit.storage import SnapshotLog
from junglekit.wire import (
    dumps,
    miss_record_from_wire,
    miss_record_to_wire,
    query_request_from_wire,
    query_request_to_wire,
    query_response_from_wire,
    query_response_to_wire,
    snapshot_from_wire,
    snapshot_to_wire,
)


def sample_snapshot(version=3) -> Snapshot:
    return Snapshot(
        user_id="user-0001",
        key=query_key("what is the shipping cost"),
        answer_text="[small-default] what is the shipping cost",
        language=LanguageTag.EN,
        model_id="small-default",
        embedding=embed("what is the shipping cost"),
        version=version,
        generated_at=60_000,
    )


def test_snapshot_round_trip():
    snap = sample_snapshot()
    data = json.loads(dumps(snapshot_to_wire(snap)))
    assert data["key"] == snap.key.hex
    assert len(data["key"]) == 16
    assert data["generated_at"] == 60_000
    assert snapshot_from_wire(data) == snap


def test_snapshot_malformed_rejected():
    with pytest.raises(ContractViolation):
        snapshot_from_wire({"user_id": "u"})
    good = snapshot_to_wire(sample_snapshot())
    bad = dict(good, key="zz")
    with pytest.raises(ContractViolation):
        snapshot_from_wire(bad)


def test_query_request_round_trip():
    req = QueryRequest("u1", "s1", "quel est le prix", LanguageTag.FR)
    data = query_request_to_wire(req)
    assert data["language_hint"] == "fr"
    assert query_request_from_wire(json.loads(dumps(data))) == req
    bare = QueryRequest("u1", "s1", "hello")
    assert query_request_from_wire(query_request_to_wire(bare)) == bare


def test_query_response_round_trip():
    hit = QueryResponse("hit", sample_snapshot(), 0.91, 1_200)
    data = json.loads(dumps(query_response_to_wire(hit)))
    assert query_response_from_wire(data) == hit
    miss = QueryResponse("miss_enqueued")
    assert query_response_from_wire(json.loads(dumps(query_response_to_wire(miss)))) == miss


def test_miss_record_round_trip():
    rec = MissRecord("u1", query_key("abc"), "abc", None, 17)
    assert miss_record_from_wire(json.loads(dumps(miss_record_to_wire(rec)))) == rec


def test_snapshot_log_replay(tmp_path):
    path = tmp_path / "snapshots.log"
    log = SnapshotLog(path)
    snaps = [sample_snapshot(version=v) for v in (1, 2, 3)]
    for s in snaps:
        log.append(s)
    log.close()
    assert list(SnapshotLog.replay(path)) == snaps


def test_snapshot_log_ignores_torn_tail(tmp_path):
    path = tmp_path / "snapshots.log"
    log = SnapshotLog(path)
    log.append(sample_snapshot(version=1))
    log.close()
    with open(path, "ab") as fh:
        fh.write(b"\x00\x00\x10\x00partial")  # truncated record
    replayed = list(SnapshotLog.replay(path))
    assert [s.version for s in replayed] == [1]


def test_snapshot_log_missing_file_is_empty(tmp_path):
    assert list(SnapshotLog.replay(tmp_path / "absent.log")) == []
