"""Run metrics and their serialized forms.

The JSON form is canonical: fixed field order, exact decimal strings for
money, shortest-round-trip floats. Two runs with the same (config, seed)
must produce byte-identical output, and the acceptance suite holds a
golden copy of the default run to that standard.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from decimal import Decimal
from typing import Any

from ..costs import format_money
from ..errors import ContractViolation


def percentile(sorted_values: list[float], q: float) -> float:
    """Nearest-rank percentile over an already-sorted list; 0.0 when empty."""
    if not sorted_values:
        return 0.0
    rank = max(1, math.ceil(q * len(sorted_values)))
    return sorted_values[min(rank, len(sorted_values)) - 1]


@dataclass(frozen=True)
class MetricsReport:
    seed: int
    event_count: int
    read_latency_p50_ms: float
    read_latency_p95_ms: float
    read_latency_p99_ms: float
    hit_rate: float
    staleness_max_ms: float
    staleness_p99_ms: float
    pending_misses_final: int
    compound_cost: Decimal
    monolithic_cost: Decimal
    cost_ratio: float

    def __post_init__(self) -> None:
        if not (self.read_latency_p50_ms <= self.read_latency_p95_ms <= self.read_latency_p99_ms):
            raise ContractViolation("latency percentiles must be monotone")
        if not 0.0 <= self.hit_rate <= 1.0:
            raise ContractViolation("hit_rate must be in [0, 1]")

    def to_wire(self) -> dict[str, Any]:
        return {
            "seed": self.seed,
            "event_count": self.event_count,
            "read_latency": {
                "p50_ms": self.read_latency_p50_ms,
                "p95_ms": self.read_latency_p95_ms,
                "p99_ms": self.read_latency_p99_ms,
            },
            "hit_rate": self.hit_rate,
            "staleness": {
                "max_ms": self.staleness_max_ms,
                "p99_ms": self.staleness_p99_ms,
            },
            "pending_misses_final": self.pending_misses_final,
            "compound_cost": format_money(self.compound_cost),
            "monolithic_cost": format_money(self.monolithic_cost),
            "cost_ratio": self.cost_ratio,
        }

    def to_json(self) -> str:
        return json.dumps(self.to_wire(), ensure_ascii=False, separators=(",", ":")) + "\n"

    def to_text(self) -> str:
        w = self.to_wire()
        lines = [
            "simulation report",
            f"  seed                 {w['seed']}",
            f"  events               {w['event_count']}",
            f"  read latency p50     {w['read_latency']['p50_ms']:.2f} ms",
            f"  read latency p95     {w['read_latency']['p95_ms']:.2f} ms",
            f"  read latency p99     {w['read_latency']['p99_ms']:.2f} ms",
            f"  hit rate             {w['hit_rate']:.4f}",
            f"  staleness max        {w['staleness']['max_ms']:.1f} ms",
            f"  staleness p99        {w['staleness']['p99_ms']:.1f} ms",
            f"  pending misses       {w['pending_misses_final']}",
            f"  compound cost        {w['compound_cost']}",
            f"  monolithic cost      {w['monolithic_cost']}",
            f"  cost ratio           {w['cost_ratio']:.6f}",
        ]
        return "\n".join(lines) + "\n"

    @classmethod
    def from_wire(cls, data: dict[str, Any]) -> "MetricsReport":
        return cls(
            seed=data["seed"],
            event_count=data["event_count"],
            read_latency_p50_ms=data["read_latency"]["p50_ms"],
            read_latency_p95_ms=data["read_latency"]["p95_ms"],
            read_latency_p99_ms=data["read_latency"]["p99_ms"],
            hit_rate=data["hit_rate"],
            staleness_max_ms=data["staleness"]["max_ms"],
            staleness_p99_ms=data["staleness"]["p99_ms"],
            pending_misses_final=data["pending_misses_final"],
            compound_cost=Decimal(data["compound_cost"]),
            monolithic_cost=Decimal(data["monolithic_cost"]),
            cost_ratio=data["cost_ratio"],
        )


def render(report: MetricsReport, fmt: str) -> str:
    if fmt == "json":
        return report.to_json()
    if fmt == "text":
        return report.to_text()
    raise ContractViolation(f"unknown report format {fmt!r}")
