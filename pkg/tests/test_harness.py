import json
import math

import pytest

from msm.errors import BenchFailure, ConfigError
from msm.harness import (
    SCENARIOS,
    Check,
    ExperimentConfig,
    Record,
    bench_duffing,
    coarsest_step,
    load_config,
    run_scenario,
)
from msm.harness.cli import main
from msm.harness.report import fmt, write_csv


# --- configuration ------------------------------------------------------------


def test_config_validation():
    with pytest.raises(ConfigError):
        ExperimentConfig("no-such-scenario")
    for bad in ([0.0], [0.6], [-0.1]):
        with pytest.raises(ConfigError):
            ExperimentConfig("roots-table", eps=bad)
    with pytest.raises(ConfigError):
        ExperimentConfig("roots-table", tol=2.0)
    c = ExperimentConfig("roots-table", eps=[0.5, 0.1])
    assert c.eps == (0.5, 0.1)
    assert c.eps_values((0.01,)) == (0.5, 0.1)
    assert ExperimentConfig("roots-table").eps_values((0.01,)) == (0.01,)


def test_load_config_toml(tmp_path):
    p = tmp_path / "c.toml"
    p.write_text('scenario = "damped-table"\neps = 0.01\nseed = 3\n[params]\nt_end = 40.0\n')
    c = load_config(p)
    assert (c.scenario, c.eps, c.seed, c.param("t_end", 0)) == ("damped-table", (0.01,), 3, 40.0)
    c = load_config(p, eps=[0.02], out=str(tmp_path / "o"))
    assert c.eps == (0.02,) and c.out == tmp_path / "o"
    p.write_text('scenario = "damped-table"\nbogus = 1\n')
    with pytest.raises(ConfigError):
        load_config(p)
    p.write_text("scenario = \n")
    with pytest.raises(ConfigError):
        load_config(p)
    with pytest.raises(ConfigError):
        load_config(tmp_path / "missing.toml")
    with pytest.raises(ConfigError):
        load_config(None)


def test_registered_scenarios():
    assert set(SCENARIOS) == {
        "roots-table",
        "euler-figure",
        "damped-table",
        "duffing-figures",
        "kg-packet",
        "fourth-order-packet",
        "phase-matched-pair",
        "maxwell-te",
        "bench-speedup",
    }


# --- reports ------------------------------------------------------------------


def test_check_kinds():
    assert Check("a", 1.0, 1.05, 0.1, "abs").passed
    assert not Check("a", 1.0, 1.2, 0.1, "abs").passed
    assert Check("b", 0.01, None, 0.02, "le").passed
    assert Check("c", 11.0, None, 10.0, "ge").passed
    assert not Check("d", 0.0, None, 0.0, "gt").passed
    assert not Check("e", float("nan"), None, 1.0, "le").passed
    with pytest.raises(ValueError):
        Check("f", 1.0, None, 1.0, "approx")


def test_record_default_kind():
    r = Record("roots-table", 0.1)
    assert r.check("x", 0.5, 1e-3, target=0.5).kind == "abs"
    assert r.check("y", 0.5, 1.0).kind == "le"
    assert r.passed


def test_fmt_is_deterministic(tmp_path):
    assert fmt(0.1) == "0.1"
    assert fmt(True) == "true"
    assert fmt(3) == "3"
    assert fmt(1 / 3) == "0.333333333333"
    p = write_csv(tmp_path / "sub" / "t.csv", ["a", "b"], [(1, 0.5)])
    assert p.read_text() == "a,b\n1,0.5\n"


def test_report_schema(tmp_path):
    rep = run_scenario(ExperimentConfig("roots-table", out=tmp_path))
    data = json.loads((tmp_path / "report.json").read_text())
    assert data["schema_version"] == "1.0"
    assert data["scenario"] == "roots-table"
    assert data["passed"] is rep.passed is True
    for rec in data["records"]:
        assert {"inputs", "outputs", "checks", "steps", "wall_time", "passed"} <= set(rec)
        for c in rec["checks"]:
            assert {"name", "value", "tolerance", "passed", "kind"} <= set(c)
            assert isinstance(c["passed"], bool)


def test_roots_table_csv_rows(tmp_path):
    run_scenario(ExperimentConfig("roots-table", out=tmp_path))
    lines = (tmp_path / "roots_table.csv").read_text().splitlines()
    assert lines[0] == "problem,eps,exact,series"
    quad = [ln.split(",") for ln in lines[1:] if ln.startswith("quadratic,")]
    assert [round(float(r[3]), 6) for r in quad] == [0.998999, 0.9899, 0.89]
    assert [round(float(r[2]), 6) for r in quad] == [0.998999, 0.989898, 0.887298]


# --- runner and CLI -----------------------------------------------------------


def test_empty_eps_list(tmp_path, capsys):
    rep = run_scenario(ExperimentConfig("damped-table", eps=[], out=tmp_path))
    assert rep.records == [] and rep.passed
    assert main(["kg-packet", "--eps", "--out", str(tmp_path), "--quiet"]) == 0
    assert "PASS (0 checks" in capsys.readouterr().out


def test_cli_exit_codes(tmp_path, capsys):
    assert main(["roots-table", "--out", str(tmp_path / "a")]) == 0
    out = capsys.readouterr().out
    assert "[PASS]" in out and out.strip().endswith(f"report at {tmp_path / 'a' / 'report.json'})")
    assert main(["--scenario", "roots-table", "--out", str(tmp_path / "b"), "--quiet"]) == 0
    assert main(["roots-table", "--eps", "0.7", "--out", str(tmp_path)]) == 2
    assert main(["--out", str(tmp_path)]) == 2
    with pytest.raises(SystemExit):
        main(["bogus"])


def test_cli_failure_exit_code(tmp_path):
    # A reference tolerance far too loose makes the damped table miss its printed digits.
    assert main(["damped-table", "--eps", "0.01", "--tol", "0.5", "--out", str(tmp_path), "--quiet"]) == 1


def test_cli_reads_config(tmp_path):
    p = tmp_path / "c.toml"
    p.write_text(f'scenario = "euler-figure"\neps = [0.1]\nout = "{tmp_path / "o"}"\n')
    assert main(["--config", str(p), "--quiet"]) == 0
    assert (tmp_path / "o" / "report.json").exists()


def test_determinism(tmp_path):
    for name in ("a", "b"):
        run_scenario(ExperimentConfig("duffing-figures", eps=[0.1], seed=7, out=tmp_path / name))
    files = sorted(p.name for p in (tmp_path / "a").glob("*.csv"))
    assert files
    for f in files:
        assert (tmp_path / "a" / f).read_bytes() == (tmp_path / "b" / f).read_bytes()


# --- benchmark search ---------------------------------------------------------


def test_coarsest_step_on_power_law():
    h, e, evals, capped = coarsest_step(lambda h: h**2, 1e-4, 1.0, 0.01)
    assert 0.1 / 1.02 <= h <= 0.1 and e <= 0.01 and not capped
    h, e, _, capped = coarsest_step(lambda h: h**2, 1e-4, 1.0, 10.0)
    assert h == 1.0 and capped
    with pytest.raises(BenchFailure):
        coarsest_step(lambda h: 1.0, 1e-4, 1.0, 0.01)


def test_coarsest_step_treats_failures_as_inaccurate():
    def run(h):
        if h > 0.5:
            raise ArithmeticError
        return math.inf if h > 0.2 else h

    h, _, _, _ = coarsest_step(run, 1e-3, 1.0, 0.2)
    assert 0.19 <= h <= 0.2


def test_loose_target_ratio_at_least_one():
    res, info = bench_duffing(0.1, 100.0, target=10.0)
    assert res["envelope"].dt / res["direct"].dt >= 1.0
    assert res["envelope"].steps <= res["direct"].steps
