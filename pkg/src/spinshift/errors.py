"""
spinshift errors - exception hierarchy shared by the library and the CLI.
"""


class SpinShiftError(Exception):
    """Base class for every error raised by spinshift."""

    kind = "error"
    exit_code = 1


class UsageError(SpinShiftError):
    """Command line could not be parsed."""

    kind = "usage"
    exit_code = 1


class DomainError(SpinShiftError, ValueError):
    """Arguments outside the domain of an operation."""

    kind = "domain"
    exit_code = 3


class ConfigError(DomainError):
    """Invalid configuration value (file, flag or dataclass field)."""

    kind = "config"
    exit_code = 1


class ConvergenceError(SpinShiftError, RuntimeError):
    """Quadrature or extrapolation did not reach the requested tolerance."""

    kind = "convergence"
    exit_code = 2


class CalibrationError(SpinShiftError, RuntimeError):
    """The frozen TE contour constant is missing or invalid."""

    kind = "calibration"
    exit_code = 2


class NoPeakError(SpinShiftError, LookupError):
    """Enhancement requested where the susceptibility scan has no interior peak."""

    kind = "no-peak"
    exit_code = 3
