"""Scenario dispatch."""

from __future__ import annotations

from dataclasses import asdict

from ..errors import ConfigError, MsmError
from .config import ExperimentConfig
from .report import RunReport
from .scenarios import SCENARIO_FUNCS


def run_scenario(config: ExperimentConfig, write: bool = True) -> RunReport:
    """Run one scenario over its eps values; writes CSV artifacts and ``report.json``."""
    if config.scenario not in SCENARIO_FUNCS:
        raise ConfigError(f"unknown scenario {config.scenario!r}")
    out = config.out
    out.mkdir(parents=True, exist_ok=True)
    cfg_dict = asdict(config)
    cfg_dict["out"] = str(out)
    report = RunReport(config.scenario, cfg_dict)
    try:
        report.records = SCENARIO_FUNCS[config.scenario](config, out)
    except MsmError as exc:
        raise type(exc)(f"scenario {config.scenario}: {exc}") from exc
    if write:
        report.write_json(out / "report.json")
    return report


def bench_speedup(config: ExperimentConfig) -> RunReport:
    if config.scenario != "bench-speedup":
        config = config.with_overrides(scenario="bench-speedup")
    return run_scenario(config)
