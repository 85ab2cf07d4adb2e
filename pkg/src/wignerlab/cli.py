"""Command line entry point: ``wignerlab run|list|validate``."""

from __future__ import annotations

import argparse
import json
import sys

from .scenarios import SCENARIOS, ConfigError, run_scenario, validate_config, write_report


def _load(path: str) -> dict:
    try:
        with open(path) as fh:
            return json.load(fh)
    except OSError as e:
        raise ConfigError(f"cannot read config: {e}") from None
    except json.JSONDecodeError as e:
        raise ConfigError(f"config is not valid JSON: {e}") from None


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(prog="wignerlab", description="Semiclassical measure experiments")
    sub = parser.add_subparsers(dest="cmd", required=True)
    p_run = sub.add_parser("run", help="run a scenario and write CSV + JSON summary")
    p_run.add_argument("--config", required=True)
    p_run.add_argument("--out", required=True)
    sub.add_parser("list", help="print the scenario catalog")
    p_val = sub.add_parser("validate", help="check a config without running it")
    p_val.add_argument("--config", required=True)
    args = parser.parse_args(argv)

    if args.cmd == "list":
        for name, desc in SCENARIOS.items():
            print(f"{name:22s} {desc}")
        return 0
    try:
        cfg = _load(args.config)
        if args.cmd == "validate":
            validate_config(cfg)
            print(f"ok: {cfg['scenario']}")
            return 0
        report = run_scenario(cfg)
    except ConfigError as e:
        print(f"config error: {e}", file=sys.stderr)
        return 2
    csv_path, json_path = write_report(report, args.out)
    s = report.summary()
    print(f"{s['scenario']}: {s['rows']} rows, max_abs_error={s['max_abs_error']:.3e}, all_pass={s['all_pass']}")
    print(f"wrote {csv_path} and {json_path}")
    return 0 if report.all_pass else 1


if __name__ == "__main__":
    sys.exit(main())
