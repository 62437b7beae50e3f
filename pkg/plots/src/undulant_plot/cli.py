"""Command-line entry point: undulant-plot <spec.json>."""

from __future__ import annotations

import argparse
import json
import sys

from .errors import EmptySeries, MissingColumn, SpecError
from .render import render
from .spec import load_spec


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(
        prog="undulant-plot",
        description="Render figures from simulation harness CSV artifacts",
    )
    parser.add_argument("spec", help="path to a JSON plot specification")
    args = parser.parse_args(argv)

    try:
        spec = load_spec(args.spec)
    except (SpecError, OSError, json.JSONDecodeError) as err:
        print(f"spec error: {err}", file=sys.stderr)
        return 2
    try:
        result = render(spec)
    except (MissingColumn, EmptySeries) as err:
        print(f"render error: {err}", file=sys.stderr)
        return 1
    print(json.dumps({"output": result.output, "kind": result.kind,
                      "metadata": result.metadata}))
    return 0


if __name__ == "__main__":
    sys.exit(main())
