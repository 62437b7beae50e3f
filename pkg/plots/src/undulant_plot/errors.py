"""Error types for the figure pipeline."""


class PlotError(Exception):
    """Base class for rendering failures."""


class MissingColumn(PlotError):
    """A referenced CSV column does not exist."""


class EmptySeries(PlotError):
    """A referenced series contains no finite samples."""


class SpecError(PlotError):
    """The plot specification is malformed."""
