# physics_modules/scaling.py
"""Log-log scaling of the diffusion rates with sphere radius and trap
frequency, and the location of the CSL maximum in R."""
from dataclasses import dataclass, replace
from typing import Callable, Dict, List, Optional, Tuple

import numpy as np
from scipy.optimize import minimize_scalar

from ..exceptions import SweepError
from .noise import budget, csl_bracket, csl_diffusion
from .parameters import SystemConfig, derive

QUANTITIES = ("D_t", "D_c", "D_a", "lambda_sph")
SCALING_PARAMETERS = ("R", "omega")

# (quantity, parameter, exponent); D_c at fixed couplings
SCALING_LAWS = (
    ("D_t", "omega", 1.0),
    ("D_a", "omega", -1.0),
    ("lambda_sph", "omega", -1.0),
    ("D_t", "R", 3.0),
    ("D_a", "R", -1.0),
    ("D_c", "R", 0.0),
    ("D_c", "omega", 0.0),
)
EXPONENT_TOL = 1e-6


@dataclass(frozen=True)
class ScalingFit:
    quantity: str
    parameter: str
    exponent: float
    grid: Tuple[float, ...]
    values: Tuple[float, ...]


def _rate(quantity: str) -> Callable:
    def extract(config: SystemConfig, omega1: float) -> float:
        return getattr(budget(derive(config, omega1), config, 1), quantity)
    return extract


def scaling_check(quantity: str, parameter: str, config: SystemConfig, omega1: float = 1.0e4,
                  window: Optional[Tuple[float, float]] = None, points: int = 11) -> ScalingFit:
    """Least-squares slope of log(quantity) against log(parameter) for mode 1.

    The default window is one decade upward from the config's radius or from
    omega1. Couplings are set through their ratios, so G stays fixed while R
    or omega moves.
    """
    if parameter == "omega1":
        parameter = "omega"
    if quantity not in QUANTITIES:
        raise SweepError(f"unknown quantity {quantity!r}, expected one of {QUANTITIES}")
    if parameter not in SCALING_PARAMETERS:
        raise SweepError(f"unknown scaling parameter {parameter!r}, expected one of {SCALING_PARAMETERS}")
    if points < 2:
        raise SweepError("a slope needs at least two points")

    start = config.radius if parameter == "R" else omega1
    low, high = window if window is not None else (start, 10.0 * start)
    if not 0 < low < high:
        raise SweepError(f"scaling window must satisfy 0 < low < high, got ({low!r}, {high!r})")
    grid = np.logspace(np.log10(low), np.log10(high), points)

    extract = _rate(quantity)
    if parameter == "R":
        values = np.array([extract(replace(config, radius=float(r)), omega1) for r in grid])
    else:
        values = np.array([extract(config, float(w)) for w in grid])

    if np.any(~(values > 0)):
        raise SweepError(f"{quantity} is not positive across the fit window; no log-log slope")
    slope, _ = np.polyfit(np.log(grid), np.log(values), 1)
    return ScalingFit(
        quantity=quantity,
        parameter=parameter,
        exponent=float(slope),
        grid=tuple(float(g) for g in grid),
        values=tuple(float(v) for v in values),
    )


def scaling_suite(config: SystemConfig, omega1: float = 1.0e4) -> List[Dict]:
    rows = []
    for quantity, parameter, expected in SCALING_LAWS:
        fit = scaling_check(quantity, parameter, config, omega1=omega1)
        rows.append({
            "quantity": quantity,
            "parameter": parameter,
            "expected": expected,
            "fitted": fit.exponent,
            "passed": abs(fit.exponent - expected) <= EXPONENT_TOL,
        })
    return rows


def _csl_shape(r_over_rc: float) -> float:
    # lambda_sph at fixed omega, lambda and r_c, up to a constant factor
    return csl_bracket(r_over_rc ** 2) / r_over_rc ** 3


def csl_radius_profile(config: SystemConfig, r_over_rc, omega: float = 1.0e4) -> np.ndarray:
    unit = replace(config, csl_rate=1.0, csl_enabled=True)
    return np.array([
        csl_diffusion(replace(unit, radius=float(r) * config.csl_length), omega)
        for r in np.atleast_1d(r_over_rc)
    ])


def csl_radius_maximum(config: SystemConfig) -> float:
    """Radius that maximizes lambda_sph, by golden-section search (about 2.38 r_c)."""
    result = minimize_scalar(lambda r: -_csl_shape(r), bracket=(0.5, 2.4, 5.0), method="golden")
    return float(result.x) * config.csl_length
