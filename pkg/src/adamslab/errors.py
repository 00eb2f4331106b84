"""Exception types raised by the laboratory."""


class LabError(Exception):
    """Base class for all errors raised by adamslab."""


class GridError(LabError, ValueError):
    """Invalid grid or field (bad parameters, too coarse, non-decaying)."""


class OverflowGuardError(LabError, FloatingPointError):
    """An exponential argument exceeded the overflow guard."""


class ConvergenceError(LabError, RuntimeError):
    """An iterative solve or quadrature did not settle."""


class ConfigError(LabError, ValueError):
    """An experiment configuration failed validation."""
