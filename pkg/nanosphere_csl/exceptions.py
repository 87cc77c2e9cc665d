# exceptions.py
"""Exceptions and warnings raised by nanosphere_csl.

The CLI maps each exception class onto a distinct exit code.
"""


class NanosphereCSLError(Exception):
    """Base class for all errors raised by this package."""
    exit_code = 1


class ConfigError(NanosphereCSLError, ValueError):
    """Invalid, unknown or conflicting configuration value."""
    exit_code = 2


class InstabilityError(NanosphereCSLError):
    """The drift matrix has no stable steady state."""
    exit_code = 3


class SweepError(NanosphereCSLError, ValueError):
    """A sweep could not be set up: empty or unordered grid, missing variant,
    or too few points for a slope estimate."""
    exit_code = 2


class NumericalIntegrityError(NanosphereCSLError):
    """A numerical cross-check failed (residual, path agreement, physicality)."""
    exit_code = 4


class OutputError(NanosphereCSLError):
    """Result files could not be written."""
    exit_code = 5


class ValidityWarning(UserWarning):
    """A parameter leaves the regime where the entangling scheme is valid."""


class ConditioningWarning(UserWarning):
    """A linear solve is ill-conditioned; results may have lost precision."""
