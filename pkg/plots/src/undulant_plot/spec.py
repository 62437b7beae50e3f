"""Plot specifications loaded from JSON.

A spec names the figure kind, the input CSVs (written by the simulation
harness), the output image path and the reference-line parameters:

    {
      "kind": "decay",
      "inputs": ["out/symmetrization/diagnostics.csv"],
      "output": "figures/decay.png",
      "reference": {"gamma": 0.01, "eps": 0.01}
    }

Kinds and their inputs:
  decay             diagnostics.csv (t, perp_h10); reference rate gamma*eps/2
  gap_scaling       one comparison_delta_<d>.csv per amplitude; "deltas" and
                    "compare_time" select the sampled gap values
  pulse_speed       crossing.csv (t, x_front); optional reference "speed"
  profile_snapshot  snapshots.csv (x, u1_t<t> columns)
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path

from .errors import SpecError

KINDS = ("decay", "gap_scaling", "pulse_speed", "profile_snapshot")


@dataclass(frozen=True)
class PlotSpec:
    kind: str
    inputs: tuple
    output: str
    reference: dict = field(default_factory=dict)
    deltas: tuple = ()
    compare_time: float | None = None
    title: str | None = None

    def __post_init__(self):
        if self.kind not in KINDS:
            raise SpecError(f"kind must be one of {KINDS}, got {self.kind!r}")
        if not self.inputs:
            raise SpecError("at least one input CSV is required")
        if not self.output:
            raise SpecError("an output image path is required")
        if self.kind == "gap_scaling" and len(self.deltas) != len(self.inputs):
            raise SpecError("gap_scaling needs one delta per input CSV")

    @property
    def reference_rate(self) -> float | None:
        """Decay reference slope gamma*eps/2, exact in the config values."""
        ref = self.reference
        if "rate" in ref:
            return float(ref["rate"])
        if "gamma" in ref and "eps" in ref:
            return float(ref["gamma"]) * float(ref["eps"]) / 2.0
        return None

    @property
    def reference_speed(self) -> float | None:
        speed = self.reference.get("speed")
        return None if speed is None else float(speed)


def spec_from_dict(raw: dict) -> PlotSpec:
    try:
        return PlotSpec(
            kind=raw["kind"],
            inputs=tuple(raw["inputs"]),
            output=str(raw["output"]),
            reference=dict(raw.get("reference", {})),
            deltas=tuple(raw.get("deltas", ())),
            compare_time=raw.get("compare_time"),
            title=raw.get("title"),
        )
    except KeyError as err:
        raise SpecError(f"missing required field {err.args[0]!r}") from err
    except TypeError as err:
        raise SpecError(str(err)) from err


def load_spec(path) -> PlotSpec:
    with open(path) as fh:
        raw = json.load(fh)
    spec = spec_from_dict(raw)
    missing = [p for p in spec.inputs if not Path(p).is_file()]
    if missing:
        raise SpecError(f"input CSVs not found: {missing}")
    return spec
