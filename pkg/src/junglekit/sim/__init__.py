"""Deterministic discrete-event simulation of the full system."""

from .config import SimConfig, load_sim_config, sim_config_from_dict, sim_config_to_dict
from .report import MetricsReport, render
from .run import RunResult, simulate

__all__ = [
    "SimConfig",
    "load_sim_config",
    "sim_config_from_dict",
    "sim_config_to_dict",
    "MetricsReport",
    "render",
    "RunResult",
    "simulate",
]
