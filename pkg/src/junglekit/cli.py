"""Command-line interface.

Exit codes: 0 success, 2 configuration problems, 3 a run aborted on an
internal invariant violation.
"""

from __future__ import annotations

import dataclasses
import json
import sys
from decimal import Decimal
from pathlib import Path

import click

from .costs import CostRecord, Ledger, cost_ratio, format_money, total_cost, total_cost_pico
from .errors import ConfigError, ContractViolation, InvariantViolation
from .sim.config import load_pricing, load_sim_config
from .sim.report import render
from .sim.run import simulate
from .sim.workload import build_users, event_to_wire, generate_events
from .wire import dumps

EXIT_CONFIG = 2
EXIT_INVARIANT = 3


@click.group()
def main() -> None:
    """Tiered-cache assistant toolkit: simulate, account, serve."""


@main.group()
def sim() -> None:
    """Deterministic workload simulation."""


@sim.command("run")
@click.option("--config", "config_path", required=True, type=click.Path(exists=True))
@click.option("--seed", type=int, default=None, help="Override the config seed.")
@click.option("--format", "fmt", type=click.Choice(["text", "json"]), default="text")
@click.option("--out", "out_path", type=click.Path(), default=None)
@click.option("--ledger-out", type=click.Path(), default=None,
              help="Also dump the run's cost records as JSON lines.")
def sim_run(config_path: str, seed: int | None, fmt: str, out_path: str | None,
            ledger_out: str | None) -> None:
    """Run one simulation and report latency, staleness, hit rate, and cost."""
    try:
        config = load_sim_config(config_path)
        if seed is not None:
            config = dataclasses.replace(config, seed=seed)
    except ConfigError as exc:
        click.echo(f"config error: {exc}", err=True)
        sys.exit(EXIT_CONFIG)
    try:
        result = simulate(config)
    except InvariantViolation as exc:
        click.echo(f"invariant violation: {exc}", err=True)
        sys.exit(EXIT_INVARIANT)
    rendered = render(result.report, fmt)
    if out_path:
        Path(out_path).write_text(rendered, encoding="utf-8")
    else:
        click.echo(rendered, nl=False)
    if ledger_out:
        with open(ledger_out, "w", encoding="utf-8") as fh:
            for rec in result.ledger.records:
                fh.write(dumps({
                    "model_id": rec.model_id,
                    "input_tokens": rec.input_tokens,
                    "output_tokens": rec.output_tokens,
                    "occurred_at": rec.occurred_at,
                }) + "\n")


@sim.command("workload")
@click.option("--config", "config_path", required=True, type=click.Path(exists=True))
@click.option("--seed", type=int, default=None, help="Override the config seed.")
@click.option("--out", "out_path", type=click.Path(), default=None)
def sim_workload(config_path: str, seed: int | None, out_path: str | None) -> None:
    """Dump the generated event stream as JSON lines."""
    try:
        config = load_sim_config(config_path)
        if seed is not None:
            config = dataclasses.replace(config, seed=seed)
        users = build_users(config)
        events = generate_events(config, users)
    except ConfigError as exc:
        click.echo(f"config error: {exc}", err=True)
        sys.exit(EXIT_CONFIG)
    lines = "".join(dumps(event_to_wire(e, users)) + "\n" for e in events)
    if out_path:
        Path(out_path).write_text(lines, encoding="utf-8")
    else:
        click.echo(lines, nl=False)


@main.group()
def cost() -> None:
    """Cost accounting over recorded ledgers."""


@cost.command("report")
@click.option("--ledger", "ledger_path", required=True, type=click.Path(exists=True))
@click.option("--pricing", "pricing_path", required=True, type=click.Path(exists=True))
@click.option("--monolithic-tokens", type=int, default=None,
              help="User-visible token volume for the monolithic comparison.")
@click.option("--format", "fmt", type=click.Choice(["text", "json"]), default="text")
def cost_report(ledger_path: str, pricing_path: str, monolithic_tokens: int | None,
                fmt: str) -> None:
    """Total a cost ledger and, given a token volume, the monolithic ratio."""
    try:
        pricing = load_pricing(pricing_path)
        ledger = Ledger()
        with open(ledger_path, encoding="utf-8") as fh:
            for line_no, line in enumerate(fh, start=1):
                line = line.strip()
                if not line:
                    continue
                try:
                    raw = json.loads(line)
                    ledger.append(CostRecord(
                        model_id=raw["model_id"],
                        input_tokens=int(raw["input_tokens"]),
                        output_tokens=int(raw["output_tokens"]),
                        occurred_at=int(raw.get("occurred_at", 0)),
                    ))
                except (json.JSONDecodeError, KeyError, TypeError, ValueError) as exc:
                    raise ConfigError(f"{ledger_path}:{line_no}: bad record: {exc}") from exc
    except ConfigError as exc:
        click.echo(f"config error: {exc}", err=True)
        sys.exit(EXIT_CONFIG)

    try:
        compound = total_cost(ledger, pricing)
        per_model: dict[str, int] = {}
        for rec in ledger.records:
            pico = total_cost_pico(Ledger([rec]), pricing)
            per_model[rec.model_id] = per_model.get(rec.model_id, 0) + pico
        ratio = None
        if monolithic_tokens is not None and ledger.records:
            ratio = cost_ratio(ledger, pricing, monolithic_tokens)
    except ContractViolation as exc:
        click.echo(f"config error: {exc}", err=True)
        sys.exit(EXIT_CONFIG)

    if fmt == "json":
        out = {
            "records": len(ledger),
            "total_cost": format_money(compound),
            "by_model": {
                mid: format_money(Decimal(p).scaleb(-12)) for mid, p in sorted(per_model.items())
            },
        }
        if ratio is not None:
            out["monolithic_tokens"] = monolithic_tokens
            out["cost_ratio"] = ratio
        click.echo(json.dumps(out, ensure_ascii=False, separators=(",", ":")))
    else:
        click.echo(f"records            {len(ledger)}")
        click.echo(f"total cost         {format_money(compound)}")
        for mid, pico in sorted(per_model.items()):
            click.echo(f"  {mid:<18} {format_money(Decimal(pico).scaleb(-12))}")
        if ratio is not None:
            click.echo(f"monolithic tokens  {monolithic_tokens}")
            click.echo(f"cost ratio         {ratio:.6f}")


@main.group()
def serve() -> None:
    """Run wire-protocol processes."""


@serve.command("edge")
@click.option("--config", "config_path", required=True, type=click.Path(exists=True))
def serve_edge(config_path: str) -> None:
    """Start an edge caching node (HTTP)."""
    from .serve import load_edge_serve_config, run_edge

    try:
        config = load_edge_serve_config(config_path)
    except ConfigError as exc:
        click.echo(f"config error: {exc}", err=True)
        sys.exit(EXIT_CONFIG)
    run_edge(config)


@serve.command("backend")
@click.option("--config", "config_path", required=True, type=click.Path(exists=True))
@click.option("--ticks", type=int, default=None, help="Stop after N ticks (default: run forever).")
def serve_backend(config_path: str, ticks: int | None) -> None:
    """Start the backend updater loop against configured edges."""
    from .serve import load_backend_serve_config, run_backend

    try:
        config = load_backend_serve_config(config_path)
    except ConfigError as exc:
        click.echo(f"config error: {exc}", err=True)
        sys.exit(EXIT_CONFIG)
    run_backend(config, max_ticks=ticks)


if __name__ == "__main__":
    main()
