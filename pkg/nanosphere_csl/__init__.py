"""Steady-state entanglement of two levitated nanospheres under collapse noise."""
from .constants import CONSTANTS_VERSION
from .exceptions import (
    NanosphereCSLError,
    ConfigError,
    InstabilityError,
    SweepError,
    NumericalIntegrityError,
    OutputError,
    ValidityWarning,
    ConditioningWarning,
)

__version__ = "0.1"

__all__ = [
    'CONSTANTS_VERSION',
    'NanosphereCSLError', 'ConfigError', 'InstabilityError', 'SweepError',
    'NumericalIntegrityError', 'OutputError', 'ValidityWarning', 'ConditioningWarning',
]
