"""The ``msm`` command line: run a scenario, print its checks, exit 0 iff all pass."""

from __future__ import annotations

import argparse
import sys

from ..errors import ConfigError, MsmError
from .config import SCENARIOS, load_config
from .runner import run_scenario


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="msm", description="Multiple-scale reproductions and benchmarks.")
    p.add_argument("scenario", nargs="?", choices=SCENARIOS, help="scenario to run (or give it in the config file)")
    p.add_argument("--config", help="TOML configuration file")
    p.add_argument("--scenario", dest="scenario_opt", choices=SCENARIOS, help="scenario (alternative to the positional)")
    p.add_argument("--eps", type=float, nargs="*", help="eps values (an empty list runs nothing)")
    p.add_argument("--out", help="output directory")
    p.add_argument("--seed", type=int, help="seed for sampled checks")
    p.add_argument("--tol", type=float, help="reference ODE solver tolerance")
    p.add_argument("--quiet", action="store_true", help="print only the final verdict")
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    scenario = args.scenario or args.scenario_opt
    try:
        cfg = load_config(args.config, scenario=scenario, eps=args.eps, out=args.out, seed=args.seed, tol=args.tol)
        report = run_scenario(cfg)
    except ConfigError as exc:
        print(f"msm: config error: {exc}", file=sys.stderr)
        return 2
    except MsmError as exc:
        print(f"msm: {exc}", file=sys.stderr)
        return 1
    if not args.quiet:
        for line in report.summary_lines():
            print(line)
    verdict = "PASS" if report.passed else "FAIL"
    print(f"{cfg.scenario}: {verdict} ({sum(1 for _ in report.checks())} checks, report at {cfg.out / 'report.json'})")
    return 0 if report.passed else 1


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
