"""Run reports: per-run records whose numeric claims carry tolerances and verdicts."""

from __future__ import annotations

import csv
import json
import math
from dataclasses import asdict, dataclass, field
from pathlib import Path

import numpy as np

SCHEMA_VERSION = "1.0"


@dataclass
class Check:
    name: str
    value: float
    target: float | None
    tolerance: float
    kind: str  # "abs" |value - target| <= tol, "le" value <= tol, "ge" value >= tol, "gt" value > tol
    passed: bool = False

    def __post_init__(self):
        v = float(self.value)
        self.value = v
        if not math.isfinite(v):
            self.passed = False
        elif self.kind == "abs":
            self.passed = abs(v - float(self.target)) <= self.tolerance
        elif self.kind == "le":
            self.passed = v <= self.tolerance
        elif self.kind == "ge":
            self.passed = v >= self.tolerance
        elif self.kind == "gt":
            self.passed = v > self.tolerance
        else:
            raise ValueError(f"unknown check kind {self.kind!r}")
        self.passed = bool(self.passed)


@dataclass
class Record:
    scenario: str
    eps: float | None
    inputs: dict = field(default_factory=dict)
    outputs: dict = field(default_factory=dict)
    checks: list = field(default_factory=list)
    steps: dict = field(default_factory=dict)
    wall_time: float = 0.0
    artifacts: list = field(default_factory=list)

    def check(self, name, value, tolerance, target=None, kind=None) -> Check:
        kind = kind or ("abs" if target is not None else "le")
        c = Check(name, value, target, tolerance, kind)
        self.checks.append(c)
        return c

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.checks)


@dataclass
class RunReport:
    scenario: str
    config: dict
    records: list = field(default_factory=list)
    schema_version: str = SCHEMA_VERSION

    @property
    def passed(self) -> bool:
        return all(r.passed for r in self.records)

    def checks(self):
        for r in self.records:
            for c in r.checks:
                yield r, c

    def to_dict(self) -> dict:
        return {
            "schema_version": self.schema_version,
            "scenario": self.scenario,
            "config": self.config,
            "passed": self.passed,
            "records": [asdict(r) | {"passed": r.passed} for r in self.records],
        }

    def write_json(self, path) -> Path:
        path = Path(path)
        path.write_text(json.dumps(self.to_dict(), indent=2, sort_keys=True, default=_plain) + "\n")
        return path

    def summary_lines(self) -> list[str]:
        lines = []
        for r, c in self.checks():
            eps = "" if r.eps is None else f" eps={r.eps:g}"
            tgt = "" if c.target is None else f" target={c.target:.6g}"
            lines.append(
                f"[{'PASS' if c.passed else 'FAIL'}] {r.scenario}{eps} {c.name}: value={c.value:.6g}{tgt} "
                f"{c.kind} tol={c.tolerance:.3g}"
            )
        return lines


def _plain(o):
    if isinstance(o, (np.floating, np.integer)):
        return o.item()
    if isinstance(o, np.ndarray):
        return o.tolist()
    if isinstance(o, Path):
        return str(o)
    if isinstance(o, complex):
        return [o.real, o.imag]
    return str(o)


def fmt(v) -> str:
    """Deterministic text form of a CSV cell."""
    if isinstance(v, str):
        return v
    if isinstance(v, (bool, np.bool_)):
        return "true" if v else "false"
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    return f"{float(v):.12g}"


def write_csv(path, header, rows) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with path.open("w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(header)
        for row in rows:
            w.writerow([fmt(v) for v in row])
    return path
