"""Configuration-driven scenarios, reports and the ``msm`` CLI."""

from .bench import bench_duffing, bench_kg, coarsest_step
from .config import SCENARIOS, ExperimentConfig, load_config
from .report import Check, Record, RunReport
from .runner import bench_speedup, run_scenario

__all__ = [
    "SCENARIOS",
    "Check",
    "ExperimentConfig",
    "Record",
    "RunReport",
    "bench_duffing",
    "bench_kg",
    "bench_speedup",
    "coarsest_step",
    "load_config",
    "run_scenario",
]
