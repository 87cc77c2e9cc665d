from dataclasses import fields
from pathlib import Path

import pytest
import yaml

from nanosphere_csl.config import (
    DEFAULT_CONFIG,
    OUTPUT_ENV_VAR,
    PRESETS,
    RunManifest,
    load_config_file,
    merge_layers,
    output_directory,
    parse_and_resolve,
    parse_override,
    parse_quantity,
    resolve,
    to_system_config,
)
from nanosphere_csl.exceptions import ConfigError
from nanosphere_csl.physics_modules.parameters import SystemConfig


def test_defaults_match_the_baseline():
    config = to_system_config(resolve(merge_layers([])))
    baseline = SystemConfig()
    for f in fields(SystemConfig):
        expected = getattr(baseline, f.name)
        actual = getattr(config, f.name)
        if isinstance(expected, float):
            assert actual == pytest.approx(expected, rel=1e-12), f.name
        else:
            assert actual == expected, f.name


@pytest.mark.parametrize("value,kind,expected", [
    (3.0, "length", 3.0),
    (2, "rate", 2.0),
    ("100 nm", "length", 1e-7),
    ("4cm", "length", 0.04),
    ("20 kHz", "rate", 2.0e4),
    ("1e-8 Hz", "rate", 1e-8),
    ("1e-12 Torr", "pressure", 1.33322e-10),
    ("10 mK", "temperature", 0.01),
    ("3.5 g/cm3", "density", 3500.0),
    ("0.72", "number", 0.72),
])
def test_parse_quantity(value, kind, expected):
    assert parse_quantity(value, kind) == pytest.approx(expected, rel=1e-12)


@pytest.mark.parametrize("value,kind", [
    ("10 furlongs", "length"),
    ("20 kHz", "length"),
    ("fast", "rate"),
    (True, "number"),
    ([1, 2], "number"),
])
def test_parse_quantity_rejects(value, kind):
    with pytest.raises(ConfigError):
        parse_quantity(value, kind, "field")


def test_unknown_key_is_named():
    with pytest.raises(ConfigError, match="colour"):
        parse_and_resolve("rates", overrides=["sphere.colour=red"])


def test_unknown_section_is_rejected():
    with pytest.raises(ConfigError):
        parse_and_resolve("rates", overrides=["laser.power=1"])


def test_kappa_and_finesse_conflict_in_one_layer():
    with pytest.raises(ConfigError, match="conflict"):
        parse_and_resolve("rates", overrides=["cavity.kappa=2e4", "cavity.finesse=5.9e5"])


def test_finesse_replaces_default_kappa():
    manifest = parse_and_resolve("rates", overrides=["cavity.finesse=5.9e5"])
    config = manifest.system_config
    assert config.kappa is None
    assert config.finesse == 5.9e5
    assert config.cavity_decay == pytest.approx(2.0e4, rel=5e-3)


def test_radius_replaces_ratio():
    manifest = parse_and_resolve("rates", overrides=["sphere.radius=20 nm"])
    assert manifest.system_config.radius == pytest.approx(2e-8)


def test_zero_collapse_rate_override():
    manifest = parse_and_resolve("entanglement", overrides=["csl.rate=0"])
    assert manifest.system_config.csl_rate == 0.0


def test_parse_override():
    assert parse_override("csl.rate=1e-9 Hz") == {"csl": {"rate": "1e-9 Hz"}}
    assert parse_override("csl.enabled=false") == {"csl": {"enabled": False}}
    assert parse_override("sweep.points=12") == {"sweep": {"points": 12}}
    for bad in ("csl.rate", "rate=1", "a.b.c=1"):
        with pytest.raises(ConfigError):
            parse_override(bad)


def test_file_with_preset_values_equals_preset(tmp_path):
    path = tmp_path / "fig3c.yaml"
    path.write_text(yaml.safe_dump(PRESETS["fig3c"]["config"]))
    from_file = parse_and_resolve("reproduce", config_path=path)
    from_preset = parse_and_resolve("reproduce", preset="fig3c")
    assert from_file.system_config == from_preset.system_config
    assert from_file.config_hash == from_preset.config_hash


def test_resolution_order(tmp_path):
    path = tmp_path / "run.yaml"
    path.write_text("csl:\n  rate: 1e-10 Hz\ndrive:\n  G1_over_G2: 0.5\n")
    manifest = parse_and_resolve("rates", config_path=path, preset="fig3c",
                                 overrides=["csl.rate=2e-10"])
    config = manifest.system_config
    # flag beats file beats preset beats defaults
    assert config.csl_rate == 2e-10
    assert config.G1_over_G2 == 0.5
    assert config.radius == pytest.approx(0.22 * 100e-9)
    assert config.numerical_aperture == 0.8


def test_missing_and_malformed_files(tmp_path):
    with pytest.raises(ConfigError, match="not found"):
        parse_and_resolve("rates", config_path=tmp_path / "absent.yaml")
    bad = tmp_path / "bad.yaml"
    bad.write_text("csl: [unclosed\n")
    with pytest.raises(ConfigError):
        parse_and_resolve("rates", config_path=bad)
    listing = tmp_path / "list.yaml"
    listing.write_text("- 1\n- 2\n")
    with pytest.raises(ConfigError):
        parse_and_resolve("rates", config_path=listing)


def test_empty_file_means_defaults(tmp_path):
    path = tmp_path / "empty.yaml"
    path.write_text("")
    assert parse_and_resolve("rates", config_path=path).system_config == parse_and_resolve("rates").system_config


def test_points_must_be_an_integer():
    with pytest.raises(ConfigError):
        parse_and_resolve("sweep", overrides=["sweep.points=12.5"])


def test_physical_invariants_fail_early():
    with pytest.raises(ConfigError):
        parse_and_resolve("rates", overrides=["sphere.permittivity=0.5"])
    with pytest.raises(ConfigError):
        parse_and_resolve("rates", overrides=["cavity.length_over_mirror_curvature=3"])


def test_unknown_preset():
    with pytest.raises(ConfigError):
        parse_and_resolve("reproduce", preset="fig9")


def test_manifest_round_trip():
    manifest = parse_and_resolve("sweep", preset="fig3a", overrides=["cavity.finesse=5.9e5"],
                                 settings={"parameter": "omega1", "grid": [1e3, 2e3]})
    manifest.output_paths = ["output/fig3a.csv"]
    again = RunManifest.from_yaml(manifest.to_yaml())
    assert again.system_config == manifest.system_config
    assert again.config_hash == manifest.config_hash
    assert again.settings == manifest.settings
    assert again.output_paths == manifest.output_paths


def test_tampered_manifest_is_rejected():
    manifest = parse_and_resolve("rates")
    data = yaml.safe_load(manifest.to_yaml())
    data["config"]["csl"]["rate"] = 5e-9
    with pytest.raises(ConfigError, match="config_hash"):
        RunManifest.from_yaml(yaml.safe_dump(data))


def test_hash_depends_on_settings():
    a = parse_and_resolve("rates", settings={"omega1": 1e4})
    b = parse_and_resolve("rates", settings={"omega1": 2e4})
    assert a.config_hash != b.config_hash


def test_output_directory_precedence(monkeypatch, tmp_path):
    monkeypatch.chdir(tmp_path)
    monkeypatch.delenv(OUTPUT_ENV_VAR, raising=False)
    resolved = parse_and_resolve("sweep", overrides=["output.directory=from_config"]).config
    assert str(output_directory(None, resolved)) == "from_config"
    assert str(output_directory(None)) == "output"
    monkeypatch.setenv(OUTPUT_ENV_VAR, "from_env")
    assert str(output_directory(None, resolved)) == "from_env"
    assert str(output_directory("from_flag", resolved)) == "from_flag"


def test_shipped_project_file_matches_defaults():
    path = Path(__file__).resolve().parent.parent / "project.yaml"
    assert resolve(merge_layers([load_config_file(path)])) == resolve(merge_layers([DEFAULT_CONFIG]))


def test_dotenv_in_working_directory_is_honoured(monkeypatch, tmp_path):
    monkeypatch.chdir(tmp_path)
    # registered with monkeypatch so the value load_dotenv sets is undone afterwards
    monkeypatch.setenv(OUTPUT_ENV_VAR, "placeholder")
    monkeypatch.delenv(OUTPUT_ENV_VAR)
    (tmp_path / ".env").write_text(f"{OUTPUT_ENV_VAR}=from_dotenv\n")
    assert str(output_directory(None)) == "from_dotenv"
    assert str(output_directory("from_flag")) == "from_flag"
