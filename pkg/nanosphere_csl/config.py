# config.py
import copy
import json
import os
import re
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Dict, Iterable, List, Optional

import jsonschema
import yaml
from dotenv import find_dotenv, load_dotenv

from .constants import CONSTANTS_VERSION, Constants, Units
from .exceptions import ConfigError
from .physics_modules.parameters import SystemConfig, config_hash, validate

OUTPUT_ENV_VAR = "NANOSPHERE_CSL_OUTPUT"

DEFAULT_CONFIG = {
    "sphere": {
        "radius_over_rc": 0.15,
        "density": "3500 kg/m3",
        "permittivity": 5.76,
    },
    "cavity": {
        "length": "4 cm",
        "kappa": "20 kHz",
        "length_over_mirror_curvature": 1.5,
        "wavelength": "1064 nm",
    },
    "trap": {
        "wavelength": None,  # defaults to the cavity wavelength
        "numerical_aperture": 0.8,
        "omega2_over_omega1": 2.0,
    },
    "feedback": {
        "reflectivity": 0.99,
        "phase": 0.0,
    },
    "drive": {
        "G2_over_keff": 1.2,
        "G1_over_G2": 0.72,
        "detuning": 0.0,
    },
    "gas": {
        "temperature": "10 mK",
        "pressure": "1e-12 Torr",
        "molecule_mass": "28.97 amu",
    },
    "csl": {
        "rate": "1e-8 Hz",
        "length": "100 nm",
        "enabled": True,
    },
    "sweep": {
        "omega1": "10 kHz",
        "points": 40,
        "min_over_keff": 10.0,
        "max_over_keff": 500.0,
        "window": 0.2,
        "gap_threshold": 0.10,
    },
    "output": {
        "directory": "output",
        "format": "csv",
    },
}

# Figure presets: overrides on top of DEFAULT_CONFIG plus the omega1 grid.
# (a)/(d), (b)/(e), (c)/(f) share parameters; the letters name the noise and
# entanglement panels of the same run.
_FIG3_LOW = {"csl": {"rate": "1e-9 Hz"}, "sphere": {"radius_over_rc": 0.15},
             "feedback": {"reflectivity": 0.996}, "drive": {"G2_over_keff": 1.2, "G1_over_G2": 0.77}}
_FIG3_MID = {"csl": {"rate": "1e-10 Hz"}, "sphere": {"radius_over_rc": 0.18},
             "feedback": {"reflectivity": 0.999}, "drive": {"G2_over_keff": 2.2, "G1_over_G2": 0.79}}
_FIG3_HIGH = {"csl": {"rate": "1e-11 Hz"}, "sphere": {"radius_over_rc": 0.22},
              "feedback": {"reflectivity": 0.999}, "drive": {"G2_over_keff": 2.0, "G1_over_G2": 0.79}}

PRESETS = {
    "fig2": {
        "config": {"csl": {"rate": "1e-8 Hz"}, "sphere": {"radius_over_rc": 0.15},
                   "feedback": {"reflectivity": 0.99}, "drive": {"G2_over_keff": 1.2, "G1_over_G2": 0.72}},
        "grid": {"min": 3.0e3, "max": 5.0e4, "points": 40},
    },
    "fig3a": {"config": _FIG3_LOW, "grid": {"min": 2.65e3, "max": 1.5e4, "points": 40}},
    "fig3d": {"config": _FIG3_LOW, "grid": {"min": 2.65e3, "max": 1.5e4, "points": 40}},
    "fig3b": {"config": _FIG3_MID, "grid": {"min": 5.0e2, "max": 1.0e4, "points": 40}},
    "fig3e": {"config": _FIG3_MID, "grid": {"min": 5.0e2, "max": 1.0e4, "points": 40}},
    "fig3c": {"config": _FIG3_HIGH, "grid": {"min": 3.0e2, "max": 3.0e3, "points": 40}},
    "fig3f": {"config": _FIG3_HIGH, "grid": {"min": 3.0e2, "max": 3.0e3, "points": 40}},
}

# --- Units ---
UNITS = {
    "length": {"nm": Units.NM_TO_METER, "um": Units.UM_TO_METER, "mm": Units.MM_TO_METER,
               "cm": Units.CM_TO_METER, "m": 1.0},
    # Hz labels are angular rates in s^-1
    "rate": {"Hz": 1.0, "kHz": Units.KHZ_TO_RATE, "MHz": Units.MHZ_TO_RATE, "1/s": 1.0},
    "temperature": {"mK": Units.MK_TO_KELVIN, "K": 1.0},
    "pressure": {"Torr": Units.TORR_TO_PA, "Pa": 1.0},
    "mass": {"amu": Constants.amu, "kg": 1.0},
    "density": {"g/cm3": Units.G_PER_CM3_TO_KG_PER_M3, "kg/m3": 1.0},
    "number": {},
}

FIELD_KINDS = {
    "sphere": {"radius": "length", "radius_over_rc": "number", "density": "density", "permittivity": "number"},
    "cavity": {"length": "length", "kappa": "rate", "finesse": "number", "mirror_curvature": "length",
               "length_over_mirror_curvature": "number", "wavelength": "length"},
    "trap": {"wavelength": "length", "numerical_aperture": "number", "omega2_over_omega1": "number"},
    "feedback": {"reflectivity": "number", "phase": "number"},
    "drive": {"G2_over_keff": "number", "G1_over_G2": "number", "detuning": "rate"},
    "gas": {"temperature": "temperature", "pressure": "pressure", "molecule_mass": "mass"},
    "csl": {"rate": "rate", "length": "length", "enabled": "boolean"},
    "sweep": {"omega1": "rate", "points": "integer", "min_over_keff": "number", "max_over_keff": "number",
              "window": "number", "gap_threshold": "number"},
    "output": {"directory": "text", "format": "text"},
}

# setting one key of a group in a layer removes the others from lower layers
EXCLUSIVE_GROUPS = (
    ("cavity", ("kappa", "finesse")),
    ("sphere", ("radius", "radius_over_rc")),
    ("cavity", ("mirror_curvature", "length_over_mirror_curvature")),
)

NULLABLE = {("trap", "wavelength"), ("cavity", "kappa"), ("cavity", "finesse")}

_QUANTITY = re.compile(r"^\s*([-+]?(?:\d+\.?\d*|\.\d+)(?:[eE][-+]?\d+)?)\s*([A-Za-z/0-9^-]*)\s*$")


def _schema_for(kind: str, nullable: bool) -> Dict:
    types = {
        "boolean": ["boolean"],
        "integer": ["integer"],
        "text": ["string"],
    }.get(kind, ["number", "string"])
    if nullable:
        types = types + ["null"]
    return {"type": types}


CONFIG_SCHEMA = {
    "type": "object",
    "additionalProperties": False,
    "properties": {
        section: {
            "type": "object",
            "additionalProperties": False,
            "properties": {key: _schema_for(kind, (section, key) in NULLABLE) for key, kind in keys.items()},
        }
        for section, keys in FIELD_KINDS.items()
    },
}
CONFIG_SCHEMA["properties"]["output"]["properties"]["format"]["enum"] = ["csv", "table"]


def parse_quantity(value: Any, kind: str, name: str = "value") -> float:
    """Convert a number or a '<number> <unit>' string to SI (rates in s^-1)."""
    if isinstance(value, bool):
        raise ConfigError(f"{name}: expected a number, got {value!r}")
    if isinstance(value, (int, float)):
        return float(value)
    if not isinstance(value, str):
        raise ConfigError(f"{name}: expected a number, got {value!r}")
    match = _QUANTITY.match(value)
    if not match:
        raise ConfigError(f"{name}: cannot parse quantity {value!r}")
    number, unit = match.groups()
    if not unit:
        return float(number)
    units = UNITS.get(kind, {})
    if unit not in units:
        allowed = ", ".join(units) or "none"
        raise ConfigError(f"{name}: unit {unit!r} not accepted (allowed: {allowed})")
    return float(number) * units[unit]


def load_config_file(path) -> Dict:
    path = Path(path)
    try:
        with open(path) as f:
            data = yaml.safe_load(f)
    except FileNotFoundError:
        raise ConfigError(f"config file not found: {path}")
    except yaml.YAMLError as e:
        raise ConfigError(f"config file {path} is not valid YAML: {e}")
    if data is None:
        return {}
    if not isinstance(data, dict):
        raise ConfigError(f"config file {path} must hold a mapping of sections")
    validate_layer(data, source=str(path))
    return data


def validate_layer(layer: Dict, source: str = "config") -> None:
    try:
        jsonschema.validate(layer, CONFIG_SCHEMA)
    except jsonschema.ValidationError as e:
        where = ".".join(str(p) for p in e.absolute_path) or "<root>"
        raise ConfigError(f"{source}: {where}: {e.message}")
    for section, keys in EXCLUSIVE_GROUPS:
        present = [k for k in keys if k in layer.get(section, {})]
        if len(present) > 1:
            raise ConfigError(f"{source}: {section}.{present[0]} and {section}.{present[1]} conflict; give one")


def parse_override(text: str) -> Dict:
    """'section.key=value' into a one-entry nested layer."""
    if "=" not in text:
        raise ConfigError(f"override {text!r} must look like section.key=value")
    dotted, raw = text.split("=", 1)
    parts = dotted.strip().split(".")
    if len(parts) != 2 or not all(parts):
        raise ConfigError(f"override key {dotted!r} must look like section.key")
    try:
        value = yaml.safe_load(raw) if raw.strip() else None
    except yaml.YAMLError:
        value = raw
    return {parts[0]: {parts[1]: value}}


def merge_layers(layers: Iterable[Dict]) -> Dict:
    merged = copy.deepcopy(DEFAULT_CONFIG)
    for layer in layers:
        for section, values in layer.items():
            target = merged.setdefault(section, {})
            for group_section, keys in EXCLUSIVE_GROUPS:
                if group_section != section:
                    continue
                if any(k in values for k in keys):
                    for k in keys:
                        if k not in values:
                            target.pop(k, None)
            target.update(copy.deepcopy(values))
    return merged


def _combine(layers: List[Dict]) -> Dict:
    # several flag layers count as one layer for conflict checks
    combined: Dict = {}
    for layer in layers:
        for section, values in layer.items():
            combined.setdefault(section, {}).update(values)
    return combined


def resolve(merged: Dict) -> Dict:
    """Nested config with every quantity converted to SI floats."""
    resolved: Dict = {}
    for section, values in merged.items():
        out = {}
        for key, value in values.items():
            kind = FIELD_KINDS[section][key]
            name = f"{section}.{key}"
            if value is None or kind in ("boolean", "text"):
                out[key] = value
            elif kind == "integer":
                number = parse_quantity(value, "number", name)
                if not number.is_integer():
                    raise ConfigError(f"{name}: expected an integer, got {value!r}")
                out[key] = int(number)
            else:
                out[key] = parse_quantity(value, kind, name)
        resolved[section] = out
    return resolved


def to_system_config(resolved: Dict) -> SystemConfig:
    sphere, cavity, trap = resolved["sphere"], resolved["cavity"], resolved["trap"]
    feedback, drive, gas, csl = resolved["feedback"], resolved["drive"], resolved["gas"], resolved["csl"]
    radius = sphere.get("radius")
    if radius is None:
        radius = sphere["radius_over_rc"] * csl["length"]
    curvature = cavity.get("mirror_curvature")
    if curvature is None:
        ratio = cavity["length_over_mirror_curvature"]
        if not ratio > 0:
            raise ConfigError(f"cavity.length_over_mirror_curvature must be > 0, got {ratio!r}")
        curvature = cavity["length"] / ratio
    return SystemConfig(
        radius=radius,
        density=sphere["density"],
        permittivity=sphere["permittivity"],
        cavity_length=cavity["length"],
        kappa=cavity.get("kappa"),
        finesse=cavity.get("finesse"),
        mirror_curvature=curvature,
        cavity_wavelength=cavity["wavelength"],
        trap_wavelength=trap.get("wavelength"),
        numerical_aperture=trap["numerical_aperture"],
        omega2_over_omega1=trap["omega2_over_omega1"],
        feedback_reflectivity=feedback["reflectivity"],
        feedback_phase=feedback["phase"],
        G2_over_keff=drive["G2_over_keff"],
        G1_over_G2=drive["G1_over_G2"],
        detuning=drive["detuning"],
        gas_temperature=gas["temperature"],
        gas_pressure=gas["pressure"],
        gas_molecule_mass=gas["molecule_mass"],
        csl_rate=csl["rate"],
        csl_length=csl["length"],
        csl_enabled=bool(csl["enabled"]),
    )


def preset_layer(name: str) -> Dict:
    if name not in PRESETS:
        raise ConfigError(f"unknown preset {name!r}, expected one of {sorted(PRESETS)}")
    return copy.deepcopy(PRESETS[name]["config"])


def output_directory(flag: Optional[str] = None, resolved: Optional[Dict] = None) -> Path:
    if flag:
        return Path(flag)
    load_dotenv(find_dotenv(usecwd=True))
    env = os.environ.get(OUTPUT_ENV_VAR)
    if env:
        return Path(env)
    if resolved is not None:
        return Path(resolved["output"]["directory"])
    return Path(DEFAULT_CONFIG["output"]["directory"])


@dataclass
class RunManifest:
    config: Dict
    subcommand: str
    settings: Dict = field(default_factory=dict)
    output_paths: List[str] = field(default_factory=list)
    constants_version: str = CONSTANTS_VERSION

    @property
    def system_config(self) -> SystemConfig:
        return to_system_config(self.config)

    @property
    def config_hash(self) -> str:
        return config_hash(self.system_config, **self.settings)

    def to_dict(self) -> Dict:
        return {
            "subcommand": self.subcommand,
            "constants_version": self.constants_version,
            "config_hash": self.config_hash,
            "config": self.config,
            "settings": self.settings,
            "output_paths": list(self.output_paths),
        }

    def to_yaml(self) -> str:
        return yaml.safe_dump(self.to_dict(), sort_keys=False)

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2)

    @classmethod
    def from_yaml(cls, text: str) -> "RunManifest":
        data = yaml.safe_load(text)
        config = data["config"]
        validate_layer(config, source="manifest")
        manifest = cls(
            config=resolve(merge_layers([config])),
            subcommand=data["subcommand"],
            settings=data.get("settings") or {},
            output_paths=list(data.get("output_paths") or []),
            constants_version=data.get("constants_version", CONSTANTS_VERSION),
        )
        if data.get("config_hash") and data["config_hash"] != manifest.config_hash:
            raise ConfigError("manifest config_hash does not match its config")
        return manifest


def parse_and_resolve(subcommand: str, config_path=None, overrides: Iterable[str] = (),
                      flag_layers: Iterable[Dict] = (), preset: Optional[str] = None,
                      settings: Optional[Dict] = None) -> RunManifest:
    """Resolve defaults < preset < file < flags into a RunManifest.

    `overrides` are '--set section.key=value' strings; `flag_layers` are
    nested dicts from the named convenience flags.
    """
    layers = []
    if preset is not None:
        layers.append(preset_layer(preset))
    if config_path is not None:
        layers.append(load_config_file(config_path))
    flags = [parse_override(text) for text in overrides] + list(flag_layers)
    if flags:
        combined = _combine(flags)
        validate_layer(combined, source="command line")
        layers.append(combined)
    resolved = resolve(merge_layers(layers))
    manifest = RunManifest(config=resolved, subcommand=subcommand, settings=dict(settings or {}))
    # fail early on bad physics, before any output is written
    validate(manifest.system_config)
    return manifest
