"""Simulation configuration: a JSON tree mirroring the component configs.

Everything a run depends on is in the config (or defaulted here), so one
(config, seed) pair pins a run completely. Prices, thresholds, and latency
medians are configuration, not facts: the shipped defaults are the ones the
acceptance suite quotes.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from decimal import Decimal, InvalidOperation
from pathlib import Path
from typing import Any, Mapping

from ..cache import CacheConfig
from ..core import LanguageTag
from ..costs import DEFAULT_MONOLITHIC_BLENDED, ModelPrice, PricingTable, to_micro
from ..ensemble import LatencyModel, ModelRegistry, ModelSpec
from ..errors import ConfigError
from ..updater import UpdaterConfig


@dataclass(frozen=True)
class RegionConfig:
    name: str
    user_weight: float
    user_edge_latency: LatencyModel
    edge_backend_latency: LatencyModel

    def __post_init__(self) -> None:
        if self.user_weight < 0:
            raise ConfigError(f"region {self.name!r} has negative weight")


@dataclass(frozen=True)
class ParetoSpec:
    alpha: float = 1.2
    min_tokens: int = 50_000

    def __post_init__(self) -> None:
        if self.alpha <= 0 or self.min_tokens <= 0:
            raise ConfigError("pareto parameters must be positive")


@dataclass(frozen=True)
class FaultConfig:
    push_failure_rate: float = 0.0
    push_duplicate_rate: float = 0.0

    def __post_init__(self) -> None:
        for rate in (self.push_failure_rate, self.push_duplicate_rate):
            if not 0.0 <= rate < 1.0:
                raise ConfigError("fault rates must be in [0, 1)")


def default_models() -> list[ModelSpec]:
    lat = LatencyModel(800.0, 0.4)
    return [
        ModelSpec("small-fr", LanguageTag.FR, 0.3, 0.3, lat),
        ModelSpec("small-hi", LanguageTag.HI, 0.3, 0.3, lat),
        ModelSpec("small-th", LanguageTag.TH, 0.3, 0.3, lat),
        ModelSpec("small-zh", LanguageTag.ZH, 0.3, 0.3, lat),
        ModelSpec("small-ta", LanguageTag.TA, 0.3, 0.3, lat),
        ModelSpec("small-default", LanguageTag.OTHER, 0.3, 0.3, LatencyModel(700.0, 0.4)),
    ]


def default_regions() -> list[RegionConfig]:
    return [
        RegionConfig("na-east", 0.35, LatencyModel(40.0, 0.5), LatencyModel(120.0, 0.5)),
        RegionConfig("eu-west", 0.30, LatencyModel(45.0, 0.5), LatencyModel(110.0, 0.5)),
        RegionConfig("apac", 0.35, LatencyModel(55.0, 0.5), LatencyModel(150.0, 0.5)),
    ]


def default_languages() -> dict[LanguageTag, float]:
    return {
        LanguageTag.EN: 0.40,
        LanguageTag.FR: 0.12,
        LanguageTag.HI: 0.12,
        LanguageTag.TH: 0.12,
        LanguageTag.ZH: 0.12,
        LanguageTag.TA: 0.12,
    }


def pricing_for_models(models: list[ModelSpec],
                       monolithic_blended=DEFAULT_MONOLITHIC_BLENDED,
                       reranker_price=Decimal("0.05")) -> PricingTable:
    table = {m.model_id: ModelPrice(to_micro(m.price_in), to_micro(m.price_out)) for m in models}
    table["reranker"] = ModelPrice(to_micro(reranker_price), to_micro(reranker_price))
    return PricingTable(models=table, monolithic_blended_micro=to_micro(monolithic_blended))


@dataclass(frozen=True)
class SimConfig:
    seed: int = 20240601
    duration_ms: int = 180_000
    num_users: int = 100
    num_queries: int = 10_000
    read_write_ratio: float = 50.0
    smb_fraction: float = 0.98
    pii_injection_rate: float = 0.02
    regions: tuple[RegionConfig, ...] = field(default_factory=lambda: tuple(default_regions()))
    data_size_distribution: ParetoSpec = field(default_factory=ParetoSpec)
    languages: Mapping[LanguageTag, float] = field(default_factory=default_languages)
    updater: UpdaterConfig = field(default_factory=UpdaterConfig)
    cache: CacheConfig = field(default_factory=lambda: CacheConfig(capacity=256))
    models: tuple[ModelSpec, ...] = field(default_factory=lambda: tuple(default_models()))
    pricing: PricingTable = field(default_factory=lambda: pricing_for_models(default_models()))
    llm_latency_scale: float = 1.0
    faults: FaultConfig = field(default_factory=FaultConfig)

    def __post_init__(self) -> None:
        if self.duration_ms < 0 or self.num_users < 1 or self.num_queries < 0:
            raise ConfigError("duration must be >= 0, users >= 1, queries >= 0")
        if self.read_write_ratio <= 0:
            raise ConfigError("read_write_ratio must be positive")
        if not 0.0 <= self.smb_fraction <= 1.0:
            raise ConfigError("smb_fraction must be in [0, 1]")
        if not 0.0 <= self.pii_injection_rate <= 1.0:
            raise ConfigError("pii_injection_rate must be in [0, 1]")
        if not self.regions:
            raise ConfigError("at least one region is required")
        if sum(r.user_weight for r in self.regions) <= 0:
            raise ConfigError("region weights must have positive sum")
        weights = list(self.languages.values())
        if any(w < 0 for w in weights) or sum(weights) <= 0:
            raise ConfigError("language weights must be non-negative with positive sum")
        if self.llm_latency_scale <= 0:
            raise ConfigError("llm_latency_scale must be positive")
        ModelRegistry(list(self.models))  # validates the default-model invariant

    def registry(self) -> ModelRegistry:
        return ModelRegistry(list(self.models))


# -- parsing ------------------------------------------------------------------

def _latency(data: Any, context: str) -> LatencyModel:
    try:
        return LatencyModel(float(data["median_ms"]), float(data["sigma"]))
    except (KeyError, TypeError, ValueError) as exc:
        raise ConfigError(f"bad latency spec in {context}: {exc}") from exc


def parse_model_record(data: Any, context: str) -> ModelSpec:
    try:
        lat = data["sim_latency_ms"]
        return ModelSpec(
            model_id=data["model_id"],
            language=LanguageTag.from_code(data["language"]),
            price_in=float(data["price_in"]),
            price_out=float(data["price_out"]),
            sim_latency_ms=LatencyModel(float(lat["median"]), float(lat["sigma"])),
        )
    except (KeyError, TypeError, ValueError, ConfigError) as exc:
        raise ConfigError(f"malformed model record {context}: {exc}") from exc


def load_registry(path: Path | str) -> ModelRegistry:
    """Load a model registry file (JSON array of model records)."""
    try:
        raw = json.loads(Path(path).read_text(encoding="utf-8"))
    except (OSError, json.JSONDecodeError) as exc:
        raise ConfigError(f"cannot read registry {path}: {exc}") from exc
    if not isinstance(raw, list):
        raise ConfigError(f"registry {path} must be a JSON array of model records")
    models = []
    for i, record in enumerate(raw):
        name = record.get("model_id", f"#{i}") if isinstance(record, dict) else f"#{i}"
        models.append(parse_model_record(record, context=f"{name!r} (index {i})"))
    return ModelRegistry(models)


def parse_pricing(data: Any) -> PricingTable:
    try:
        models = {
            model_id: ModelPrice(to_micro(spec["price_in"]), to_micro(spec["price_out"]))
            for model_id, spec in data.get("models", {}).items()
        }
        blended = data.get("monolithic_blended", DEFAULT_MONOLITHIC_BLENDED)
        return PricingTable(models=models, monolithic_blended_micro=to_micro(blended))
    except (KeyError, TypeError, ValueError, InvalidOperation) as exc:
        raise ConfigError(f"malformed pricing table: {exc}") from exc


def load_pricing(path: Path | str) -> PricingTable:
    try:
        raw = json.loads(Path(path).read_text(encoding="utf-8"))
    except (OSError, json.JSONDecodeError) as exc:
        raise ConfigError(f"cannot read pricing {path}: {exc}") from exc
    return parse_pricing(raw)


def sim_config_from_dict(data: Mapping[str, Any]) -> SimConfig:
    kwargs: dict[str, Any] = {}
    simple = [
        "seed", "duration_ms", "num_users", "num_queries", "read_write_ratio",
        "smb_fraction", "pii_injection_rate", "llm_latency_scale",
    ]
    for key in simple:
        if key in data:
            kwargs[key] = data[key]
    if "regions" in data:
        kwargs["regions"] = tuple(
            RegionConfig(
                name=r["name"],
                user_weight=float(r["user_weight"]),
                user_edge_latency=_latency(r["user_edge_latency"], f"region {r.get('name')}"),
                edge_backend_latency=_latency(r["edge_backend_latency"], f"region {r.get('name')}"),
            )
            for r in data["regions"]
        )
    if "data_size_distribution" in data:
        d = data["data_size_distribution"]
        kwargs["data_size_distribution"] = ParetoSpec(
            alpha=float(d.get("alpha", 1.2)), min_tokens=int(d.get("min_tokens", 50_000))
        )
    if "languages" in data:
        kwargs["languages"] = {
            LanguageTag.from_code(code): float(w) for code, w in data["languages"].items()
        }
    if "updater" in data:
        u = data["updater"]
        period = int(u.get("update_period_ms", 60_000))
        kwargs["updater"] = UpdaterConfig(
            update_period_ms=period,
            batch_max=int(u.get("batch_max", 64)),
            lease_ms=int(u.get("lease_ms", 5 * period)),
        )
    if "cache" in data:
        c = data["cache"]
        kwargs["cache"] = CacheConfig(
            capacity=int(c.get("capacity", 256)),
            similarity_threshold=float(c.get("similarity_threshold", 0.85)),
        )
    if "models" in data:
        kwargs["models"] = tuple(
            parse_model_record(r, context=f"index {i}") for i, r in enumerate(data["models"])
        )
    if "pricing" in data:
        kwargs["pricing"] = parse_pricing(data["pricing"])
    elif "models" in data:
        kwargs["pricing"] = pricing_for_models(list(kwargs["models"]))
    if "faults" in data:
        f = data["faults"]
        kwargs["faults"] = FaultConfig(
            push_failure_rate=float(f.get("push_failure_rate", 0.0)),
            push_duplicate_rate=float(f.get("push_duplicate_rate", 0.0)),
        )
    try:
        return SimConfig(**kwargs)
    except ConfigError:
        raise
    except (TypeError, ValueError) as exc:
        raise ConfigError(f"invalid simulation config: {exc}") from exc


def load_sim_config(path: Path | str) -> SimConfig:
    try:
        raw = json.loads(Path(path).read_text(encoding="utf-8"))
    except (OSError, json.JSONDecodeError) as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from exc
    if not isinstance(raw, dict):
        raise ConfigError(f"config {path} must be a JSON object")
    return sim_config_from_dict(raw)


def sim_config_to_dict(config: SimConfig) -> dict[str, Any]:
    """Full config tree, suitable for writing a complete config file."""
    def lat(l: LatencyModel) -> dict[str, float]:
        return {"median_ms": l.median_ms, "sigma": l.sigma}

    return {
        "seed": config.seed,
        "duration_ms": config.duration_ms,
        "num_users": config.num_users,
        "num_queries": config.num_queries,
        "read_write_ratio": config.read_write_ratio,
        "smb_fraction": config.smb_fraction,
        "pii_injection_rate": config.pii_injection_rate,
        "regions": [
            {
                "name": r.name,
                "user_weight": r.user_weight,
                "user_edge_latency": lat(r.user_edge_latency),
                "edge_backend_latency": lat(r.edge_backend_latency),
            }
            for r in config.regions
        ],
        "data_size_distribution": {
            "alpha": config.data_size_distribution.alpha,
            "min_tokens": config.data_size_distribution.min_tokens,
        },
        "languages": {tag.value: w for tag, w in config.languages.items()},
        "updater": {
            "update_period_ms": config.updater.update_period_ms,
            "batch_max": config.updater.batch_max,
            "lease_ms": config.updater.lease_ms,
        },
        "cache": {
            "capacity": config.cache.capacity,
            "similarity_threshold": config.cache.similarity_threshold,
        },
        "models": [
            {
                "model_id": m.model_id,
                "language": m.language.value,
                "price_in": m.price_in,
                "price_out": m.price_out,
                "sim_latency_ms": {"median": m.sim_latency_ms.median_ms,
                                   "sigma": m.sim_latency_ms.sigma},
            }
            for m in config.models
        ],
        "pricing": {
            "models": {
                model_id: {
                    "price_in": str(Decimal(p.price_in_micro).scaleb(-6).normalize()),
                    "price_out": str(Decimal(p.price_out_micro).scaleb(-6).normalize()),
                }
                for model_id, p in sorted(config.pricing.models.items())
            },
            "monolithic_blended": str(
                Decimal(config.pricing.monolithic_blended_micro).scaleb(-6).normalize()
            ),
        },
        "llm_latency_scale": config.llm_latency_scale,
        "faults": {
            "push_failure_rate": config.faults.push_failure_rate,
            "push_duplicate_rate": config.faults.push_duplicate_rate,
        },
    }
