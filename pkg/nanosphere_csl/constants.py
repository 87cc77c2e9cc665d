# constants.py
"""Physical constants (CODATA 2018, fixed) and unit conversion factors.

Usage:
    pressure_pa = pressure_torr * Units.TORR_TO_PA
    energy = Constants.hbar * omega
"""

CONSTANTS_VERSION = "CODATA-2018/fixed-v1"


class Constants:
    c = 299792458.0  # speed of light [m/s]
    hbar = 1.054571817e-34  # reduced Planck constant [J s]
    k_B = 1.380649e-23  # Boltzmann constant [J/K]
    amu = 1.66053906660e-27  # atomic mass unit [kg]


class Units:
    # --- Length ---
    NM_TO_METER = 1e-9
    UM_TO_METER = 1e-6
    MM_TO_METER = 1e-3
    CM_TO_METER = 1e-2

    # --- Pressure ---
    # Base is Pascal [Pa]
    TORR_TO_PA = 133.322
    PA_TO_TORR = 1.0 / TORR_TO_PA

    # --- Temperature ---
    MK_TO_KELVIN = 1e-3

    # --- Rates ---
    # "Hz" labels are read as angular rates in s^-1
    KHZ_TO_RATE = 1e3
    MHZ_TO_RATE = 1e6

    # --- Density ---
    G_PER_CM3_TO_KG_PER_M3 = 1e3
