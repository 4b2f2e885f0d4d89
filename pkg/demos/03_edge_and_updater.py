"""The full asynchronous loop in one process: copilot-style requests against
an edge node, misses drained by the updater, answers pushed back lazily."""

from junglekit.core import LanguageTag
from junglekit.edge import EdgeNode
from junglekit.edge_types import QueryRequest
from junglekit.ensemble import EnsembleNode, LatencyModel, ModelRegistry, ModelSpec
from junglekit.updater import InProcessLink, Updater, UpdaterConfig

registry = ModelRegistry([
    ModelSpec("small-fr", LanguageTag.FR, 0.3, 0.3, LatencyModel(800, 0.4)),
    ModelSpec("small-th", LanguageTag.TH, 0.3, 0.3, LatencyModel(800, 0.4)),
    ModelSpec("small-default", LanguageTag.OTHER, 0.3, 0.3, LatencyModel(700, 0.4)),
])
edge = EdgeNode("edge-demo")
updater = Updater(EnsembleNode(registry), [InProcessLink("edge-demo", edge)],
                  UpdaterConfig(update_period_ms=60_000))


def ask(text: str, now: int, user="seller-7"):
    response = edge.serve_query(
        QueryRequest(user_id=user, session_id="s0", query_text=text), now=now
    )
    if response.status == "hit":
        print(f"t={now:>7}  {text!r:45} -> hit v{response.snapshot.version} "
              f"({response.snapshot.model_id}, age {response.age_ms} ms)")
    else:
        print(f"t={now:>7}  {text!r:45} -> miss enqueued")


print("== cold reads miss and are queued exactly once ==")
ask("quel est le prix de la livraison", now=1_000)
ask("quel est le prix de la livraison", now=2_000)
ask("ราคาสินค้า 42", now=3_000)
print(f"pending misses: {edge.pending_miss_count()}")

print("\n== the periodic tick answers misses off the read path ==")
for action in updater.tick(now=60_000):
    summary = {k: v for k, v in action.items() if k not in ("cost_records",)}
    print(f"  action: {summary}")

print("\n== the same questions now hit, tagged by the language-group model ==")
ask("quel est le prix de la livraison", now=61_000)
ask("ราคาสินค้า 42", now=61_500)

print("\n== the next tick refreshes every known answer (bounded staleness) ==")
applied = [a for a in updater.tick(now=120_000) if a["type"] == "push"]
print(f"  refreshed {len(applied)} snapshots, versions now "
      f"{sorted(a['version'] for a in applied)}")
ask("quel est le prix de la livraison", now=121_000)
