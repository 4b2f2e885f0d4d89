"""Run a reduced simulation and read the report like an operator would.

The shipped acceptance configuration is configs/default.json (10,000
queries); this demo runs a fifth of that so it finishes in about a second.
"""

import time

from junglekit.sim.config import SimConfig
from junglekit.sim.run import simulate

config = SimConfig(num_queries=2_000, num_users=60, duration_ms=180_000, seed=42)
started = time.monotonic()
result = simulate(config)
elapsed = time.monotonic() - started

print(result.report.to_text())
print(f"wall time              {elapsed:.2f}s for {result.reads} reads")
print(f"backend answers        {result.total_llm_calls} "
      f"(misses {result.misses_generated}, periodic refreshes make up the rest)")
print(f"LLM calls on read path {result.serve_llm_calls}")
print(f"propagation worst case {result.max_propagation_delay_ms:.0f} ms "
      f"(staleness bound = period + this)")

report = result.report
assert report.read_latency_p50_ms < 300
assert report.read_latency_p99_ms < 1000
assert report.cost_ratio < 0.01
print("\nsub-second reads and a <1% cost ratio, same as the full acceptance run")
