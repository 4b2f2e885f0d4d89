"""The discrete-event simulation of the whole read/update loop.

Single-threaded over a logical clock: query round trips, periodic backend
ticks, and delayed snapshot applies interleave on one event heap in time
order. All randomness comes from labeled streams, so the heap order, and
with it every number in the report, is a pure function of (config, seed).

The run doubles as its own auditor: the privacy boundary, read-path
isolation, the staleness bound, and miss conservation are checked while
events replay, and a violation aborts the run rather than producing a
report that quietly lies.
"""

from __future__ import annotations

import heapq
from dataclasses import dataclass, field
from decimal import Decimal
from typing import Optional

from ..core import LanguageTag, count_tokens, detect_pii, embed, query_key, redact
from ..costs import CostRecord, Ledger, cost_ratio, total_cost
from ..edge import EdgeNode, EdgeNodeConfig, Instrumentation
from ..edge_types import QueryRequest, Snapshot
from ..ensemble import OUTPUT_TOKEN_CAP, EnsembleNode
from ..errors import InvariantViolation, PushError
from ..rng import Stream, stream
from ..updater import Updater, UpdaterConfig
from .config import RegionConfig, SimConfig
from .report import MetricsReport, percentile
from .workload import QUERY, SESSION_START, WRITE, Event, SimUser, build_users, generate_events

_GRACE_TICK_LIMIT = 50

# heap event kinds, in deliberate alphabetical neutrality: ordering between
# simultaneous events is decided by the schedule sequence number alone
_ARRIVE = "arrive"
_TICK = "tick"
_APPLY = "apply"


@dataclass
class TokenTallies:
    """Raw token counts captured outside the cost ledger, for the oracle."""

    per_model: dict[str, tuple[int, int]] = field(default_factory=dict)
    monolithic_tokens: int = 0
    answered_queries: int = 0

    def add(self, model_id: str, input_tokens: int, output_tokens: int) -> None:
        prev_in, prev_out = self.per_model.get(model_id, (0, 0))
        self.per_model[model_id] = (prev_in + input_tokens, prev_out + output_tokens)


@dataclass
class RunResult:
    report: MetricsReport
    config: SimConfig
    ledger: Ledger
    tallies: TokenTallies
    serve_llm_calls: int
    total_llm_calls: int
    max_propagation_delay_ms: float
    reads: int
    hits: int
    writes: int
    apply_counts: dict[tuple[str, int, int], int]
    misses_generated: int
    misses_cleared: int
    misses_pending_end: int


class _SimLink:
    """Edge link that models compute + propagation time on the event heap
    and injects push faults from its own streams."""

    def __init__(self, name: str, engine: "_Engine", node: EdgeNode, region: RegionConfig):
        self.name = name
        self.engine = engine
        self.node = node
        self.region = region

    def drain(self, max_records: int, now: int):
        return self.node.drain_misses(max_records, now)

    def push(self, snapshot: Snapshot, now: int, cost_records=None) -> Optional[str]:
        engine = self.engine
        config = engine.config
        label = (self.name, snapshot.user_id, snapshot.key.hex, snapshot.version)
        fault_stream = stream(config.seed, "fault", *label)
        if config.faults.push_failure_rate and fault_stream.bernoulli(config.faults.push_failure_rate):
            raise PushError("injected push failure")
        llm_ms = engine.llm_service_ms(cost_records or [], label)
        net = stream(config.seed, "pushnet", *label)
        leg = net.lognormal_ms(self.region.edge_backend_latency.median_ms,
                              self.region.edge_backend_latency.sigma)
        deliver_at = now + llm_ms + leg
        engine.schedule(deliver_at, _APPLY, (self.name, snapshot))
        if config.faults.push_duplicate_rate and fault_stream.bernoulli(config.faults.push_duplicate_rate):
            dup_leg = net.lognormal_ms(self.region.edge_backend_latency.median_ms,
                                       self.region.edge_backend_latency.sigma)
            engine.schedule(deliver_at + dup_leg, _APPLY, (self.name, snapshot))
        return None  # in flight


class _Engine:
    def __init__(self, config: SimConfig):
        self.config = config
        self.users: list[SimUser] = build_users(config)
        self.events: list[Event] = generate_events(config, self.users)
        self.instrumentation = Instrumentation()
        registry = config.registry()
        self.models_by_id = {m.model_id: m for m in registry}
        self.ensemble = EnsembleNode(registry, instrumentation=self.instrumentation)

        self.edges: dict[str, EdgeNode] = {}
        self.region_by_edge: dict[str, RegionConfig] = {}
        links = []
        for region in config.regions:
            name = f"edge-{region.name}"
            node = EdgeNode(
                name,
                EdgeNodeConfig(cache=config.cache, lease_ms=config.updater.lease_ms),
                instrumentation=self.instrumentation,
            )
            self.edges[name] = node
            self.region_by_edge[name] = region
            links.append(_SimLink(name, self, node, region))
        self.updater = Updater(self.ensemble, links, config.updater)

        self._region_by_name = {r.name: r for r in config.regions}
        self._heap: list[tuple[float, int, str, object]] = []
        self._seq = 0
        self._prepared: dict[str, tuple[str, object, object]] = {}

        # metrics accumulation
        self.read_latencies: list[float] = []
        self.hit_ages: list[int] = []
        self.hits = 0
        self.reads = 0
        self.writes = 0
        self.sessions = 0
        self.ledger = Ledger()
        self.tallies = TokenTallies()
        self.max_prop_ms = 0.0
        self.apply_counts: dict[tuple[str, int, int], int] = {}
        self.query_volume: list[tuple[str, int, int]] = []  # (user_id, key, input_tokens)

    # -- scheduling --------------------------------------------------------

    def schedule(self, at: float, kind: str, payload: object) -> None:
        heapq.heappush(self._heap, (at, self._seq, kind, payload))
        self._seq += 1

    def llm_service_ms(self, cost_records, label) -> float:
        """Answer latency: slowest candidate model, scaled by config."""
        worst = 0.0
        llm_stream = stream(self.config.seed, "llm", *label)
        for record in cost_records:
            model = self.models_by_id.get(record.model_id)
            if model is None:  # the reranker row
                continue
            sample = llm_stream.lognormal_ms(model.sim_latency_ms.median_ms,
                                             model.sim_latency_ms.sigma)
            worst = max(worst, sample)
        return worst * self.config.llm_latency_scale

    # -- the copilot side of a query ---------------------------------------

    def prepare_outbound(self, raw_text: str):
        """Redact like the copilot does; memoized per raw text."""
        cached = self._prepared.get(raw_text)
        if cached is None:
            redacted, _originals = redact(raw_text, detect_pii(raw_text))
            cached = (redacted, query_key(redacted), embed(redacted))
            self._prepared[raw_text] = cached
        return cached

    # -- event handlers -------------------------------------------------------

    def handle_query(self, event: Event) -> None:
        user = self.users[event.user_index]
        raw = event.raw_text(self.users)
        redacted, key, _probe = self.prepare_outbound(raw)
        if detect_pii(redacted):
            raise InvariantViolation("outbound payload still contains PII")
        region = self._region_by_name[user.region]
        net = stream(self.config.seed, "net", event.seq)
        leg_out = net.lognormal_ms(region.user_edge_latency.median_ms,
                                   region.user_edge_latency.sigma)
        leg_back = net.lognormal_ms(region.user_edge_latency.median_ms,
                                    region.user_edge_latency.sigma)
        self.schedule(event.time_ms + leg_out, _ARRIVE,
                      (event, user, redacted, key, leg_out + leg_back))

    def handle_arrival(self, at: float, payload) -> None:
        event, user, redacted, key, round_trip = payload
        edge = self.edges[f"edge-{user.region}"]
        request = QueryRequest(
            user_id=user.user_id,
            session_id=f"{user.user_id}-s0",
            query_text=redacted,
            language_hint=user.language,
        )
        response = edge.serve_query(request, now=int(at))
        self.reads += 1
        self.read_latencies.append(round_trip)
        input_tokens = count_tokens(redacted)
        self.query_volume.append((user.user_id, key.value, input_tokens))
        if response.status == "hit":
            self.hits += 1
            self.hit_ages.append(response.age_ms)

    def handle_tick(self, at: float, refresh: bool) -> None:
        actions = self.updater.tick(int(at), refresh=refresh)
        for action in actions:
            if action["type"] != "answer":
                continue
            for rec in action["cost_records"]:
                record = CostRecord(rec["model_id"], rec["input_tokens"],
                                    rec["output_tokens"], occurred_at=int(at))
                self.ledger.append(record)
                self.tallies.add(record.model_id, record.input_tokens, record.output_tokens)
        self._check_conservation()

    def handle_apply(self, at: float, payload) -> None:
        edge_name, snapshot = payload
        node = self.edges[edge_name]
        result = node.apply_update(snapshot, now=int(at))
        ident = (snapshot.user_id, snapshot.key.value, snapshot.version)
        if result == "applied":
            self.apply_counts[ident] = self.apply_counts.get(ident, 0) + 1
            prop = at - snapshot.generated_at
            self.max_prop_ms = max(self.max_prop_ms, prop)

    def _check_conservation(self) -> None:
        for node in self.edges.values():
            pending = node.pending_miss_count()
            if node.misses_enqueued_total != node.misses_cleared_total + pending:
                raise InvariantViolation(
                    f"{node.node_id}: enqueued {node.misses_enqueued_total} != "
                    f"cleared {node.misses_cleared_total} + outstanding {pending}"
                )

    # -- main loop ------------------------------------------------------------

    def run(self) -> RunResult:
        config = self.config
        for event in self.events:
            if event.kind == QUERY:
                self.handle_query(event)
            elif event.kind == WRITE:
                self.writes += 1  # data refresh; picked up by the periodic re-answer
            elif event.kind == SESSION_START:
                self.sessions += 1
        period = config.updater.update_period_ms
        tick_time = period
        while tick_time <= config.duration_ms:
            self.schedule(float(tick_time), _TICK, True)
            tick_time += period
        last_tick = tick_time - period if tick_time > period else 0

        grace_used = 0
        while self._heap:
            at, _seq, kind, payload = heapq.heappop(self._heap)
            if kind == _ARRIVE:
                self.handle_arrival(at, payload)
            elif kind == _TICK:
                self.handle_tick(at, refresh=bool(payload))
            elif kind == _APPLY:
                self.handle_apply(at, payload)
            if not self._heap:
                pending = sum(n.pending_miss_count() for n in self.edges.values())
                if pending:
                    grace_used += 1
                    if grace_used > _GRACE_TICK_LIMIT:
                        raise InvariantViolation(
                            f"{pending} misses still pending after {_GRACE_TICK_LIMIT} settle rounds"
                        )
                    last_tick += period
                    self.schedule(float(last_tick), _TICK, False)

        return self._finish()

    def _finish(self) -> RunResult:
        config = self.config
        self._check_conservation()
        if self.instrumentation.llm_calls_during_serve:
            raise InvariantViolation("LLM call observed on the serve path")

        # staleness bound: no served hit older than one period + worst push
        # delay. Injected push failures legitimately stretch freshness (the
        # edge keeps serving the last good version), so the strict bound is
        # asserted only for failure-free runs.
        if self.hit_ages and config.faults.push_failure_rate == 0.0:
            bound = config.updater.update_period_ms + self.max_prop_ms
            worst = max(self.hit_ages)
            if worst > bound:
                raise InvariantViolation(
                    f"staleness bound violated: served age {worst} ms > {bound:.1f} ms"
                )

        # exactly-once: the version gate must have deduplicated every replay
        for ident, count in self.apply_counts.items():
            if count > 1:
                raise InvariantViolation(f"snapshot {ident} applied {count} times")

        answered = {
            (user_id, key) for (user_id, key, _v) in self.apply_counts
        }
        monolithic_tokens = 0
        answered_queries = 0
        for user_id, key, input_tokens in self.query_volume:
            if (user_id, key) in answered:
                monolithic_tokens += input_tokens + min(OUTPUT_TOKEN_CAP, 2 * input_tokens)
                answered_queries += 1
        self.tallies.monolithic_tokens = monolithic_tokens
        self.tallies.answered_queries = answered_queries

        compound = total_cost(self.ledger, config.pricing)
        if monolithic_tokens > 0 and self.ledger.records:
            mono_cost = (Decimal(monolithic_tokens)
                         * Decimal(config.pricing.monolithic_blended_micro)).scaleb(-12)
            ratio = cost_ratio(self.ledger, config.pricing, monolithic_tokens)
        else:
            mono_cost = Decimal(0)
            ratio = 0.0

        latencies = sorted(self.read_latencies)
        ages = sorted(float(a) for a in self.hit_ages)
        report = MetricsReport(
            seed=config.seed,
            event_count=self.reads + self.writes + self.sessions,
            read_latency_p50_ms=percentile(latencies, 0.50),
            read_latency_p95_ms=percentile(latencies, 0.95),
            read_latency_p99_ms=percentile(latencies, 0.99),
            hit_rate=(self.hits / self.reads) if self.reads else 0.0,
            staleness_max_ms=ages[-1] if ages else 0.0,
            staleness_p99_ms=percentile(ages, 0.99),
            pending_misses_final=sum(n.pending_miss_count() for n in self.edges.values()),
            compound_cost=compound,
            monolithic_cost=mono_cost,
            cost_ratio=ratio,
        )
        return RunResult(
            report=report,
            config=config,
            ledger=self.ledger,
            tallies=self.tallies,
            serve_llm_calls=self.instrumentation.llm_calls_during_serve,
            total_llm_calls=self.instrumentation.llm_calls_total,
            max_propagation_delay_ms=self.max_prop_ms,
            reads=self.reads,
            hits=self.hits,
            writes=self.writes,
            apply_counts=self.apply_counts,
            misses_generated=sum(n.misses_enqueued_total for n in self.edges.values()),
            misses_cleared=sum(n.misses_cleared_total for n in self.edges.values()),
            misses_pending_end=sum(n.pending_miss_count() for n in self.edges.values()),
        )


def simulate(config: SimConfig) -> RunResult:
    """Run one full simulation; deterministic in (config, seed)."""
    return _Engine(config).run()
