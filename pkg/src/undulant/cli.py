"""Command-line entry point: undulant run|validate|selftest."""

from __future__ import annotations

import argparse
import json
import sys

from . import harness
from .errors import ConfigError, UndulantError


def _cmd_run(args) -> int:
    try:
        cfg = harness.load_config(args.config)
        issues = harness.validate(_load_raw(args.config))
    except (ConfigError, OSError, json.JSONDecodeError) as err:
        print(f"config error: {err}", file=sys.stderr)
        return 2
    errors = [d for d in issues if d["level"] == "error"]
    for d in issues:
        print(f"{d['level']}: {d['path']}: {d['message']}", file=sys.stderr)
    if errors:
        return 2
    try:
        report = harness.run(cfg)
    except UndulantError as err:
        print(f"run failed: {err}", file=sys.stderr)
        return 2
    print(json.dumps(report.summary, indent=2, default=str))
    print(f"artifacts written to {report.output_dir}", file=sys.stderr)
    return report.exit_code


def _load_raw(path) -> dict:
    with open(path) as fh:
        return json.load(fh)


def _cmd_validate(args) -> int:
    try:
        issues = harness.validate(_load_raw(args.config))
    except (OSError, json.JSONDecodeError) as err:
        print(f"config error: {err}", file=sys.stderr)
        return 2
    for d in issues:
        print(f"{d['level']}: {d['path']}: {d['message']}")
    return 2 if any(d["level"] == "error" for d in issues) else 0


def _cmd_selftest(args) -> int:
    cfg = harness.config_from_dict(
        {"scenario": "operator_selftest", "seed": args.seed,
         "output_dir": args.output_dir}
    )
    try:
        report = harness.run(cfg)
    except UndulantError as err:
        print(f"selftest failed to run: {err}", file=sys.stderr)
        return 2
    print(json.dumps(report.summary, indent=2, default=str))
    return report.exit_code


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(
        prog="undulant",
        description="FitzHugh-Nagumo on undulated cylinders: simulation "
        "scenarios and Lyapunov diagnostics",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p_run = sub.add_parser("run", help="execute an experiment configuration")
    p_run.add_argument("config", help="path to a JSON experiment config")
    p_run.set_defaults(func=_cmd_run)

    p_val = sub.add_parser("validate", help="check a configuration file")
    p_val.add_argument("config", help="path to a JSON experiment config")
    p_val.set_defaults(func=_cmd_validate)

    p_self = sub.add_parser("selftest", help="run the operator invariant suite")
    p_self.add_argument("--seed", type=int, default=0)
    p_self.add_argument("--output-dir", default="out/selftest")
    p_self.set_defaults(func=_cmd_selftest)

    args = parser.parse_args(argv)
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
