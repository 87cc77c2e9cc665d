# physics_modules/noise.py
"""Momentum-diffusion rates acting on each trapped sphere: residual gas,
trap-light scattering, cavity-photon scattering and CSL collapse noise."""
from dataclasses import dataclass, replace

import numpy as np

from ..constants import Constants
from ..exceptions import ConfigError
from .parameters import DerivedQuantities, SystemConfig

# below this x = R^2/r_c^2 the CSL bracket is summed as a series
CSL_SERIES_THRESHOLD = 1e-4


@dataclass(frozen=True)
class NoiseBudget:
    mode_index: int
    D_a: float
    D_t: float
    D_c: float
    lambda_sph: float

    @property
    def total_without_csl(self) -> float:
        return self.D_a + self.D_t + self.D_c

    @property
    def total_with_csl(self) -> float:
        return self.total_without_csl + self.lambda_sph

    def total(self, csl_on: bool) -> float:
        return self.total_with_csl if csl_on else self.total_without_csl


def _mode_frequency(dq: DerivedQuantities, mode: int) -> float:
    omega = dq.omega(mode)
    if not omega > 0:
        raise ConfigError(f"trap frequency of mode {mode} must be > 0, got {omega!r}")
    return omega


def gas_diffusion(dq: DerivedQuantities, mode: int) -> float:
    """D_a = 2 gamma k_B T / (hbar omega), high-temperature limit."""
    omega = _mode_frequency(dq, mode)
    return 2.0 * dq.gamma * Constants.k_B * dq.config.gas_temperature / (Constants.hbar * omega)


def _scattering_prefactor(dq: DerivedQuantities, omega: float) -> float:
    cfg = dq.config
    return dq.eps_c ** 2 * dq.k_c ** 6 * cfg.radius ** 3 / (9.0 * cfg.density * omega)


def trap_diffusion(dq: DerivedQuantities, mode: int) -> float:
    omega = _mode_frequency(dq, mode)
    return 8.0 * _scattering_prefactor(dq, omega) * dq.trap_intensity(mode) / dq.omega_trap_laser


def cavity_diffusion(dq: DerivedQuantities, mode: int) -> float:
    omega = _mode_frequency(dq, mode)
    return 2.0 * _scattering_prefactor(dq, omega) * Constants.hbar * dq.n_ph * Constants.c / dq.mode_volume


def csl_bracket(x: float) -> float:
    """e^-x - 1 + (x/2)(e^-x + 1), positive for every x > 0."""
    if x < CSL_SERIES_THRESHOLD:
        return x ** 3 / 12.0 - x ** 4 / 24.0 + x ** 5 / 80.0
    # expm1 form: e^-x - 1 + (x/2)(e^-x + 1) = m (1 + x/2) + x
    m = np.expm1(-x)
    return float(m * (1.0 + 0.5 * x) + x)


def csl_diffusion(config: SystemConfig, omega: float) -> float:
    if not config.radius > 0:
        raise ConfigError(f"sphere radius must be > 0, got {config.radius!r}")
    if not omega > 0:
        raise ConfigError(f"trap frequency must be > 0, got {omega!r}")
    if not config.csl_enabled or config.csl_rate == 0:
        return 0.0
    R, r_c = config.radius, config.csl_length
    x = R ** 2 / r_c ** 2
    prefactor = (Constants.hbar / omega) * 8.0 * np.pi * config.csl_rate * config.density / Constants.amu ** 2
    return float(prefactor * csl_bracket(x) * r_c ** 4 / R ** 3)


def budget(dq: DerivedQuantities, config: SystemConfig, mode: int) -> NoiseBudget:
    return NoiseBudget(
        mode_index=mode,
        D_a=float(gas_diffusion(dq, mode)),
        D_t=float(trap_diffusion(dq, mode)),
        D_c=float(cavity_diffusion(dq, mode)),
        lambda_sph=csl_diffusion(config, dq.omega(mode)),
    )


def budgets(dq: DerivedQuantities) -> tuple:
    return budget(dq, dq.config, 1), budget(dq, dq.config, 2)


def csl_gas_parity_rate(dq: DerivedQuantities) -> float:
    """Collapse rate at which lambda_sph equals the gas diffusion D_a.

    Both rates scale as 1/omega, so the result does not depend on the trap
    frequency. Zero gas pressure gives 0.
    """
    unit_rate = replace(dq.config, csl_rate=1.0, csl_enabled=True)
    per_unit = csl_diffusion(unit_rate, dq.omega1)
    return gas_diffusion(dq, 1) / per_unit
