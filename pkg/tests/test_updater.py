"""Updater tests: propagation, refresh, fault retry, idempotent effect."""

import pytest

from junglekit.core import LanguageTag
from junglekit.edge import EdgeNode, EdgeNodeConfig
from junglekit.edge_types import QueryRequest
from junglekit.ensemble import EnsembleNode, LatencyModel, ModelRegistry, ModelSpec
from junglekit.errors import ContractViolation, PushError
from junglekit.updater import InProcessLink, Updater, UpdaterConfig


def make_ensemble() -> EnsembleNode:
    return EnsembleNode(
        ModelRegistry(
            [
                ModelSpec("small-fr", LanguageTag.FR, 0.3, 0.3, LatencyModel(800, 0.4)),
                ModelSpec("small-default", LanguageTag.OTHER, 0.3, 0.3, LatencyModel(700, 0.4)),
            ]
        )
    )


class FlakyLink(InProcessLink):
    """Fails the first N pushes, then behaves."""

    def __init__(self, name, node, fail_first: int):
        super().__init__(name, node)
        self.remaining_failures = fail_first
        self.push_attempts = 0

    def push(self, snapshot, now, cost_records=None):
        self.push_attempts += 1
        if self.remaining_failures > 0:
            self.remaining_failures -= 1
            raise PushError("injected outage")
        return super().push(snapshot, now, cost_records)


def ask(node: EdgeNode, text: str, now: int, user="u1"):
    return node.serve_query(QueryRequest(user_id=user, session_id="s", query_text=text), now=now)


def test_config_validation():
    with pytest.raises(ContractViolation):
        UpdaterConfig(update_period_ms=0)
    with pytest.raises(ContractViolation):
        UpdaterConfig(update_period_ms=60_000, lease_ms=10_000)


def test_empty_tick_no_actions():
    node = EdgeNode("edge-a")
    updater = Updater(make_ensemble(), [InProcessLink("edge-a", node)])
    assert updater.tick(now=60_000) == []


def test_single_miss_one_answer_one_apply():
    node = EdgeNode("edge-a")
    updater = Updater(make_ensemble(), [InProcessLink("edge-a", node)])
    assert ask(node, "what is my balance", now=5).status == "miss_enqueued"
    actions = updater.tick(now=60_000)
    kinds = [a["type"] for a in actions]
    assert kinds == ["drain", "answer", "push"]
    assert actions[-1]["result"] == "applied"
    assert ask(node, "what is my balance", now=61_000).status == "hit"
    assert node.pending_miss_count() == 0


def test_refresh_reanswers_corpus_with_new_versions():
    node = EdgeNode("edge-a")
    updater = Updater(make_ensemble(), [InProcessLink("edge-a", node)])
    ask(node, "first question", now=1)
    updater.tick(now=60_000)
    actions = updater.tick(now=120_000)  # nothing new missed
    answers = [a for a in actions if a["type"] == "answer"]
    assert len(answers) == 1
    assert answers[0]["version"] == 2
    res = ask(node, "first question", now=121_000)
    assert res.snapshot.version == 2
    assert res.age_ms == 1_000


def test_drain_only_tick_skips_refresh():
    node = EdgeNode("edge-a")
    updater = Updater(make_ensemble(), [InProcessLink("edge-a", node)])
    ask(node, "first question", now=1)
    updater.tick(now=60_000)
    assert updater.tick(now=120_000, refresh=False) == []


def test_push_failure_recovers_next_tick_exactly_once():
    node = EdgeNode("edge-a")
    link = FlakyLink("edge-a", node, fail_first=1)
    updater = Updater(make_ensemble(), [link], UpdaterConfig())
    ask(node, "flaky question", now=5)
    first = updater.tick(now=60_000)
    assert [a["type"] for a in first] == ["drain", "answer", "push_failed"]
    assert ask(node, "flaky question", now=61_000).status == "miss_enqueued"
    # miss is leased, not re-drained; the corpus refresh carries the retry
    second = updater.tick(now=120_000)
    kinds = [a["type"] for a in second]
    assert kinds == ["answer", "push"]
    assert second[-1]["result"] == "applied"
    assert second[-1]["version"] == 2
    assert node.pending_miss_count() == 0
    # only one version ever applied for the key
    res = ask(node, "flaky question", now=121_000)
    assert res.snapshot.version == 2


def test_batch_loop_drains_everything():
    node = EdgeNode("edge-a")
    updater = Updater(make_ensemble(), [InProcessLink("edge-a", node)],
                      UpdaterConfig(batch_max=2, update_period_ms=60_000, lease_ms=300_000))
    for i in range(7):
        ask(node, f"question number {i}", now=i)
    actions = updater.tick(now=60_000)
    assert sum(a["count"] for a in actions if a["type"] == "drain") == 7
    assert sum(1 for a in actions if a["type"] == "answer") == 7
    assert node.pending_miss_count() == 0


def test_multiple_edges_processed_in_name_order():
    node_b, node_a = EdgeNode("edge-b"), EdgeNode("edge-a")
    updater = Updater(
        make_ensemble(),
        [InProcessLink("edge-b", node_b), InProcessLink("edge-a", node_a)],
    )
    ask(node_a, "from node a", now=1)
    ask(node_b, "from node b", now=2)
    actions = updater.tick(now=60_000)
    edges_in_order = [a["edge"] for a in actions if a["type"] == "drain"]
    assert edges_in_order == ["edge-a", "edge-b"]


def test_action_log_written(tmp_path):
    log = tmp_path / "actions.jsonl"
    node = EdgeNode("edge-a")
    updater = Updater(make_ensemble(), [InProcessLink("edge-a", node)], action_log_path=log)
    ask(node, "logged question", now=1)
    actions = updater.tick(now=60_000)
    updater.close()
    import json

    lines = [json.loads(l) for l in log.read_text().splitlines()]
    assert lines == actions


def test_replayed_push_is_idempotent():
    node = EdgeNode("edge-a")
    link = InProcessLink("edge-a", node)
    updater = Updater(make_ensemble(), [link])
    ask(node, "replay question", now=1)
    actions = updater.tick(now=60_000)
    push = [a for a in actions if a["type"] == "push"][0]
    # simulate an at-least-once transport re-delivering the same snapshot
    from junglekit.core import query_key
    from junglekit.edge import STALE_IGNORED

    res = ask(node, "replay question", now=61_000)
    assert node.apply_update(res.snapshot, now=62_000) == STALE_IGNORED
    assert node.applied_version("u1", query_key("replay question").value) == push["version"]
