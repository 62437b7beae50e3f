"""Figure rendering for undulant simulation artifacts.

Consumes only the harness's documented CSV schema; produces static PNG or
SVG files with the reference lines (decay slope, theoretical speed) drawn
from exact config values.
"""

from .errors import EmptySeries, MissingColumn, PlotError, SpecError
from .render import RenderResult, read_csv_columns, render
from .spec import KINDS, PlotSpec, load_spec, spec_from_dict

__all__ = [
    "EmptySeries", "MissingColumn", "PlotError", "SpecError",
    "RenderResult", "read_csv_columns", "render",
    "KINDS", "PlotSpec", "load_spec", "spec_from_dict",
]

__version__ = "0.1.0"
