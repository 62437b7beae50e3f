"""Exception types shared across the package."""


class UndulantError(Exception):
    """Base class for all package errors."""


class NonPositiveRadius(UndulantError):
    """A radius profile evaluated to a non-positive value somewhere."""


class PeriodicityMismatch(UndulantError):
    """A profile does not close periodically on the x-domain."""


class ShapeMismatch(UndulantError):
    """Field shape does not match the grid it is used with."""


class ParamMismatch(UndulantError):
    """Two states carry incompatible FHN parameters."""


class LinearSolveDiverged(UndulantError):
    """The conjugate-gradient solve exceeded its iteration budget."""


class NonFiniteState(UndulantError):
    """The integrator produced a non-finite value (dt too large)."""


class NoCrossing(UndulantError):
    """No level crossing found inside the fit window."""


class WrapDetected(UndulantError):
    """The tracked front approached the periodic seam inside the fit window."""


class DomainError(UndulantError):
    """An argument falls outside its mathematical domain."""


class InsufficientData(UndulantError):
    """Not enough samples above the floor for a meaningful fit."""


class TimeGridMismatch(UndulantError):
    """Two trajectories were not sampled at identical times."""


class ConfigError(UndulantError):
    """Experiment configuration failed validation."""

    def __init__(self, message, field=None):
        super().__init__(message if field is None else f"{field}: {message}")
        self.field = field
