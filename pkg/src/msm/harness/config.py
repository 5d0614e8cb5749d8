"""Experiment configuration: TOML files plus command-line overrides."""

from __future__ import annotations

import sys
from dataclasses import dataclass, field, replace
from pathlib import Path
from typing import Sequence

from ..errors import ConfigError

if sys.version_info >= (3, 11):
    import tomllib
else:  # pragma: no cover - exercised on 3.10 only
    import tomli as tomllib

SCENARIOS = (
    "roots-table",
    "euler-figure",
    "damped-table",
    "duffing-figures",
    "kg-packet",
    "fourth-order-packet",
    "phase-matched-pair",
    "maxwell-te",
    "bench-speedup",
)

EPS_RANGE = (0.0, 0.5)


@dataclass(frozen=True)
class ExperimentConfig:
    scenario: str
    eps: tuple | None = None  # None selects the scenario's defaults
    out: Path = Path("msm-out")
    seed: int = 0
    tol: float | None = None  # reference ODE solver tolerance override
    params: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.scenario not in SCENARIOS:
            raise ConfigError(f"unknown scenario {self.scenario!r}; choose from {', '.join(SCENARIOS)}")
        if self.eps is not None:
            eps = tuple(float(e) for e in self.eps)
            for e in eps:
                if not EPS_RANGE[0] < e <= EPS_RANGE[1]:
                    raise ConfigError(f"eps={e} outside (0, 0.5]")
            object.__setattr__(self, "eps", eps)
        object.__setattr__(self, "out", Path(self.out))
        if not isinstance(self.seed, int):
            raise ConfigError("seed must be an integer")
        if self.tol is not None and not 0 < self.tol < 1:
            raise ConfigError("tol must lie in (0, 1)")

    def eps_values(self, default: Sequence) -> tuple:
        return tuple(default) if self.eps is None else self.eps

    def param(self, name: str, default):
        return self.params.get(name, default)

    def with_overrides(self, **kw) -> "ExperimentConfig":
        kw = {k: v for k, v in kw.items() if v is not None}
        return replace(self, **kw)


def load_config(path=None, **overrides) -> ExperimentConfig:
    """Read a TOML file (keys: scenario, eps, out, seed, tol, [params]) and apply overrides."""
    data: dict = {}
    if path is not None:
        try:
            with open(path, "rb") as fh:
                data = tomllib.load(fh)
        except OSError as exc:
            raise ConfigError(f"cannot read config {path}: {exc}") from exc
        except tomllib.TOMLDecodeError as exc:
            raise ConfigError(f"invalid TOML in {path}: {exc}") from exc
    known = {"scenario", "eps", "out", "seed", "tol", "params"}
    extra = set(data) - known
    if extra:
        raise ConfigError(f"unknown config keys: {sorted(extra)}")
    merged = {**data, **{k: v for k, v in overrides.items() if v is not None}}
    if "scenario" not in merged:
        raise ConfigError("no scenario given")
    eps = merged.get("eps")
    if isinstance(eps, (int, float)):
        eps = [eps]
    return ExperimentConfig(
        scenario=merged["scenario"],
        eps=None if eps is None else tuple(eps),
        out=Path(merged.get("out", "msm-out")),
        seed=int(merged.get("seed", 0)),
        tol=merged.get("tol"),
        params=dict(merged.get("params", {})),
    )

