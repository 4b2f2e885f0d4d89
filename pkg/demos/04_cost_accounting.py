"""Cost accounting: the budget anchor, exact ledger totals, and the
compound-vs-monolithic ratio."""

from decimal import Decimal

from junglekit.costs import (
    DEFAULT_MONOLITHIC_BLENDED,
    CostRecord,
    Ledger,
    PricingTable,
    cost_ratio,
    format_money,
    tokens_for_budget,
    total_cost,
)

print("== the monthly budget anchor ==")
tokens = tokens_for_budget(100, DEFAULT_MONOLITHIC_BLENDED)
print(f"$100 at {DEFAULT_MONOLITHIC_BLENDED}/1M tokens buys {tokens:,} tokens")

print("\n== a hand-sized ledger, totaled exactly ==")
pricing = PricingTable.build(
    {"small-fr": (Decimal("0.3"), Decimal("0.3")),
     "small-default": (Decimal("0.3"), Decimal("0.3")),
     "reranker": (Decimal("0.05"), Decimal("0.05"))},
)
ledger = Ledger()
monolithic_tokens = 0
for query_tokens in [12, 9, 30, 18]:
    answer_tokens = min(256, 2 * query_tokens)
    # two candidates per query (language model + default), one reranker pass
    ledger.append(CostRecord("small-fr", query_tokens, answer_tokens))
    ledger.append(CostRecord("small-default", query_tokens, answer_tokens))
    ledger.append(CostRecord("reranker", 0, 2 * answer_tokens))
    monolithic_tokens += query_tokens + answer_tokens

compound = total_cost(ledger, pricing)
print(f"compound total: {format_money(compound)} over {len(ledger)} records")

ratio = cost_ratio(ledger, pricing, monolithic_tokens)
print(f"\n== the ratio against a monolithic endpoint ==")
print(f"monolithic volume: {monolithic_tokens} tokens at "
      f"{DEFAULT_MONOLITHIC_BLENDED}/1M")
print(f"cost ratio: {ratio:.6f}  (about 1.5% even in this worst case: "
      "every query freshly answered by two models)")
print("\nthe simulated system lands well under 1% because repeat reads are")
print("served from cache and never touch a model; see demos/05_simulation.py.")
