"""Command-line front end: run scenarios and property-check suites.

Exit codes: 0 success, 1 validation error, 2 runtime/simulation error,
3 property failure.
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

from . import checks, config, sim
from .errors import ConfigError, FormationSimError

EXIT_OK = 0
EXIT_VALIDATION = 1
EXIT_RUNTIME = 2
EXIT_PROPERTY = 3


def _parse_set(raw: str) -> tuple:
    if "=" not in raw:
        raise ConfigError(f"override {raw!r} must look like key.path=value")
    key, _, value = raw.partition("=")
    key = key.strip()
    if not key:
        raise ConfigError(f"override {raw!r} has an empty key")
    return key, value.strip()


def cmd_run(args) -> int:
    try:
        overrides = [_parse_set(s) for s in args.set]
        scenario, resolved = config.load_scenario(args.scenario, overrides)
    except ConfigError as err:
        print(f"error: {err}", file=sys.stderr)
        return EXIT_VALIDATION
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    try:
        log = sim.run(scenario, decimate=args.decimate)
    except ConfigError as err:
        print(f"error: {err}", file=sys.stderr)
        return EXIT_VALIDATION
    except FormationSimError as err:
        print(f"simulation error: {err}", file=sys.stderr)
        return EXIT_RUNTIME
    log.to_csv(out / "log.csv")
    window = min(20.0, float(log.t[-1] - log.t[0]))
    sim.write_metrics(sim.metrics(log, window=window), out / "metrics.json")
    config.dump_resolved(resolved, out / "scenario_resolved.cfg")
    print(f"wrote {out / 'log.csv'}, {out / 'metrics.json'}, "
          f"{out / 'scenario_resolved.cfg'}")
    return EXIT_OK


def cmd_check(args) -> int:
    try:
        results = checks.run_suite(args.suite)
    except ValueError as err:
        print(f"error: {err}", file=sys.stderr)
        return EXIT_VALIDATION
    failed = 0
    for name, ok, detail in results:
        status = "PASS" if ok else "FAIL"
        print(f"[{status}] {name}: {detail}")
        failed += 0 if ok else 1
    print(f"{len(results) - failed}/{len(results)} properties passed")
    return EXIT_OK if failed == 0 else EXIT_PROPERTY


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(
        prog="formation-sim",
        description="Deterministic multi-vehicle formation flight simulator.",
    )
    sub = p.add_subparsers(dest="command", required=True)

    run_p = sub.add_parser("run", help="integrate a scenario and export artifacts")
    run_p.add_argument("--scenario", required=True, help="scenario file path")
    run_p.add_argument("--out", default="out", help="output directory")
    run_p.add_argument(
        "--set", action="append", default=[], metavar="KEY=VALUE",
        help="override a scenario value by dotted key (repeatable)",
    )
    run_p.add_argument(
        "--decimate", type=int, default=1,
        help="log every Nth step (integration grid is unaffected)",
    )
    run_p.add_argument(
        "--seed", type=int, default=None,
        help="seed for stochastic disturbance kinds (ignored by the "
             "deterministic kinds)",
    )
    run_p.set_defaults(func=cmd_run)

    check_p = sub.add_parser("check", help="run a property suite")
    check_p.add_argument("suite", choices=checks.SUITES)
    check_p.set_defaults(func=cmd_check)
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except ConfigError as err:
        print(f"error: {err}", file=sys.stderr)
        return EXIT_VALIDATION
    except FormationSimError as err:
        print(f"error: {err}", file=sys.stderr)
        return EXIT_RUNTIME


if __name__ == "__main__":
    sys.exit(main())
