# physics_modules/parameters.py
"""System parameters of the two-nanosphere cavity and the quantities derived
from them at a given trapping frequency.

All rates are angular rates in s^-1, all lengths in meters.
"""
import hashlib
import json
import warnings
from dataclasses import asdict, dataclass
from typing import Optional

import numpy as np

from ..constants import Constants, Units
from ..exceptions import ConfigError, ValidityWarning


@dataclass(frozen=True)
class SystemConfig:
    # sphere
    radius: float = 15e-9
    density: float = 3500.0
    permittivity: float = 5.76
    # cavity
    cavity_length: float = 0.04
    kappa: Optional[float] = 2.0e4
    finesse: Optional[float] = None
    mirror_curvature: float = 0.04 / 1.5
    cavity_wavelength: float = 1064e-9
    # trap
    trap_wavelength: Optional[float] = None
    numerical_aperture: float = 0.8
    omega2_over_omega1: float = 2.0
    # feedback
    feedback_reflectivity: float = 0.99
    feedback_phase: float = 0.0
    # drive
    G2_over_keff: float = 1.2
    G1_over_G2: float = 0.72
    detuning: float = 0.0
    # gas
    gas_temperature: float = 10e-3
    gas_pressure: float = 1e-12 * Units.TORR_TO_PA
    gas_molecule_mass: float = 28.97 * Constants.amu
    # csl
    csl_rate: float = 1e-8
    csl_length: float = 100e-9
    csl_enabled: bool = True

    @property
    def cavity_decay(self) -> float:
        """kappa, taken directly or from the finesse as pi c / (2 F L)."""
        if self.kappa is not None:
            return self.kappa
        return np.pi * Constants.c / (2.0 * self.finesse * self.cavity_length)

    @property
    def trap_laser_wavelength(self) -> float:
        return self.cavity_wavelength if self.trap_wavelength is None else self.trap_wavelength


def validate(config: SystemConfig) -> None:
    """Raise ConfigError on the first violated invariant.

    The coupling-ratio precondition |G1/G2| in (0, 1) only warns: stability is
    decided on the drift matrix.
    """
    positive = {
        "sphere.radius": config.radius,
        "sphere.density": config.density,
        "cavity.length": config.cavity_length,
        "cavity.wavelength": config.cavity_wavelength,
        "gas.temperature": config.gas_temperature,
        "gas.molecule_mass": config.gas_molecule_mass,
        "csl.length": config.csl_length,
    }
    for name, value in positive.items():
        if not value > 0:
            raise ConfigError(f"{name} must be > 0, got {value!r}")
    if config.kappa is None and config.finesse is None:
        raise ConfigError("cavity needs either kappa or finesse")
    if config.kappa is not None and config.finesse is not None:
        raise ConfigError("cavity.kappa and cavity.finesse are mutually exclusive")
    if config.kappa is not None and not config.kappa > 0:
        raise ConfigError(f"cavity.kappa must be > 0, got {config.kappa!r}")
    if config.finesse is not None and not config.finesse > 0:
        raise ConfigError(f"cavity.finesse must be > 0, got {config.finesse!r}")
    if config.trap_wavelength is not None and not config.trap_wavelength > 0:
        raise ConfigError(f"trap.wavelength must be > 0, got {config.trap_wavelength!r}")
    if not config.permittivity > 1:
        raise ConfigError(f"sphere.permittivity must be > 1, got {config.permittivity!r}")
    if not config.gas_pressure >= 0:
        raise ConfigError(f"gas.pressure must be >= 0, got {config.gas_pressure!r}")
    if not 0 < config.numerical_aperture <= 1:
        raise ConfigError(f"trap.numerical_aperture must be in (0, 1], got {config.numerical_aperture!r}")
    if not 0 <= config.feedback_reflectivity <= 1:
        raise ConfigError(f"feedback.reflectivity must be in [0, 1], got {config.feedback_reflectivity!r}")
    if not config.csl_rate >= 0:
        raise ConfigError(f"csl.rate must be >= 0, got {config.csl_rate!r}")
    if not config.omega2_over_omega1 > 0:
        raise ConfigError(f"trap.omega2_over_omega1 must be > 0, got {config.omega2_over_omega1!r}")
    if not config.G2_over_keff >= 0:
        raise ConfigError(f"drive.G2_over_keff must be >= 0, got {config.G2_over_keff!r}")
    if not 2.0 * config.mirror_curvature / config.cavity_length - 1.0 > 0:
        raise ConfigError("cavity mode waist undefined: need 2 Rc / L > 1")
    if config.feedback_reflectivity * np.cos(config.feedback_phase) >= 1.0:
        raise ConfigError("feedback cancels the cavity decay entirely (kappa_eff = 0)")
    if not 0 < abs(config.G1_over_G2) < 1:
        warnings.warn(
            f"|G1/G2| = {abs(config.G1_over_G2)} is outside (0, 1); "
            "the steady state may be unstable or unentangled",
            ValidityWarning, stacklevel=2,
        )


@dataclass(frozen=True)
class DerivedQuantities:
    config: SystemConfig
    kappa: float
    kappa_eff: float
    mass: float
    sphere_volume: float
    waist_cavity: float
    waist_trap: float
    mode_volume: float
    gamma: float
    mean_gas_speed: float
    omega1: float
    omega2: float
    trap_intensity1: float
    trap_intensity2: float
    bare_coupling1: float
    bare_coupling2: float
    G1: float
    G2: float
    alpha1: float
    alpha2: float
    n_ph: float
    eps_c: float
    k_c: float
    omega_cavity: float
    omega_trap_laser: float

    def omega(self, mode: int) -> float:
        return _pick(mode, self.omega1, self.omega2)

    def trap_intensity(self, mode: int) -> float:
        return _pick(mode, self.trap_intensity1, self.trap_intensity2)

    def bare_coupling(self, mode: int) -> float:
        return _pick(mode, self.bare_coupling1, self.bare_coupling2)

    def coupling(self, mode: int) -> float:
        return _pick(mode, self.G1, self.G2)


def _pick(mode: int, first: float, second: float) -> float:
    if mode == 1:
        return first
    if mode == 2:
        return second
    raise ValueError(f"mode index must be 1 or 2, got {mode!r}")


def mean_gas_speed(config: SystemConfig) -> float:
    return float(np.sqrt(3.0 * Constants.k_B * config.gas_temperature / config.gas_molecule_mass))


def damping_rate(config: SystemConfig) -> float:
    """Gas friction damping gamma = (16/pi) P_a / (v_bar R rho0)."""
    if not (config.gas_temperature > 0 and config.radius > 0 and config.density > 0):
        raise ConfigError("damping rate needs T > 0, R > 0 and rho0 > 0")
    v_bar = mean_gas_speed(config)
    return float(16.0 / np.pi * config.gas_pressure / (v_bar * config.radius * config.density))


def effective_decay(config: SystemConfig) -> float:
    return float(config.cavity_decay * (1.0 - config.feedback_reflectivity * np.cos(config.feedback_phase)))


def trap_intensity_for(omega: float, config: SystemConfig, eps_c: float, waist_trap: float) -> float:
    # inverse of omega = [4 eps_c I / (rho0 c Wt^2)]^(1/2)
    return omega ** 2 * config.density * Constants.c * waist_trap ** 2 / (4.0 * eps_c)


def derive(config: SystemConfig, omega1: float) -> DerivedQuantities:
    validate(config)
    if not omega1 > 0:
        raise ConfigError(f"omega1 must be > 0, got {omega1!r}")

    kappa = float(config.cavity_decay)
    kappa_eff = effective_decay(config)

    sphere_volume = 4.0 / 3.0 * np.pi * config.radius ** 3
    mass = sphere_volume * config.density

    L = config.cavity_length
    lam = config.cavity_wavelength
    waist_cavity = np.sqrt(lam * L * np.sqrt(2.0 * config.mirror_curvature / L - 1.0) / (2.0 * np.pi))
    mode_volume = np.pi * L * waist_cavity ** 2 / 4.0
    waist_trap = lam / (np.pi * config.numerical_aperture)

    clausius = (config.permittivity - 1.0) / (config.permittivity + 2.0)
    eps_c = 3.0 * clausius
    k_c = 2.0 * np.pi / lam
    omega_cavity = 2.0 * np.pi * Constants.c / lam
    omega_trap_laser = 2.0 * np.pi * Constants.c / config.trap_laser_wavelength

    omega2 = config.omega2_over_omega1 * omega1

    def bare(omega):
        return (omega_cavity * np.sqrt(Constants.hbar / (mass * omega)) * k_c
                * clausius * 3.0 * sphere_volume / (4.0 * mode_volume))

    g1, g2 = bare(omega1), bare(omega2)
    G2 = config.G2_over_keff * kappa_eff
    G1 = config.G1_over_G2 * G2
    alpha1, alpha2 = G1 / g1, G2 / g2

    return DerivedQuantities(
        config=config,
        kappa=kappa,
        kappa_eff=kappa_eff,
        mass=float(mass),
        sphere_volume=float(sphere_volume),
        waist_cavity=float(waist_cavity),
        waist_trap=float(waist_trap),
        mode_volume=float(mode_volume),
        gamma=damping_rate(config),
        mean_gas_speed=mean_gas_speed(config),
        omega1=float(omega1),
        omega2=float(omega2),
        trap_intensity1=float(trap_intensity_for(omega1, config, eps_c, waist_trap)),
        trap_intensity2=float(trap_intensity_for(omega2, config, eps_c, waist_trap)),
        bare_coupling1=float(g1),
        bare_coupling2=float(g2),
        G1=float(G1),
        G2=float(G2),
        alpha1=float(alpha1),
        alpha2=float(alpha2),
        n_ph=float(alpha1 ** 2 + alpha2 ** 2),
        eps_c=float(eps_c),
        k_c=float(k_c),
        omega_cavity=float(omega_cavity),
        omega_trap_laser=float(omega_trap_laser),
    )


def config_hash(config: SystemConfig, **settings) -> str:
    """sha256 of the canonical JSON of the config plus any run settings."""
    payload = {"system": asdict(config), "settings": settings}
    canonical = json.dumps(payload, sort_keys=True, separators=(",", ":"), default=repr)
    return hashlib.sha256(canonical.encode("utf-8")).hexdigest()
