from dataclasses import replace

import numpy as np
import pytest

from nanosphere_csl.exceptions import ConfigError
from nanosphere_csl.physics_modules.noise import (
    CSL_SERIES_THRESHOLD,
    budget,
    budgets,
    cavity_diffusion,
    csl_bracket,
    csl_diffusion,
    csl_gas_parity_rate,
    gas_diffusion,
    trap_diffusion,
)
from nanosphere_csl.physics_modules.parameters import derive


def test_fig2_budget_at_10k(fig2_dq):
    b = budget(fig2_dq, fig2_dq.config, 1)
    assert b.mode_index == 1
    assert b.D_t == pytest.approx(17.8, rel=1e-2)
    assert b.D_c == pytest.approx(1.8, rel=5e-2)
    assert b.D_a == pytest.approx(1.15, rel=1e-2)
    assert b.lambda_sph == pytest.approx(93.6, rel=1e-2)


def test_trap_diffusion_slope(fig2_config):
    assert trap_diffusion(derive(fig2_config, 1e4), 1) / 1e4 == pytest.approx(1.78e-3, rel=1e-2)


def test_totals(fig2_dq):
    b = budget(fig2_dq, fig2_dq.config, 1)
    assert b.total_without_csl == b.D_a + b.D_t + b.D_c
    assert b.total_with_csl - b.total_without_csl == pytest.approx(b.lambda_sph, rel=1e-12)
    assert b.total(True) == b.total_with_csl
    assert b.total(False) == b.total_without_csl


def test_all_sources_off_gives_zero_budget(fig2_config):
    config = replace(fig2_config, gas_pressure=0.0, G2_over_keff=0.0, csl_rate=0.0)
    dq = derive(config, 1e4)
    # a zero trap intensity means no trap; D_t is exercised by its own tests
    dq = replace(dq, trap_intensity1=0.0)
    b = budget(dq, config, 1)
    assert (b.D_a, b.D_t, b.D_c, b.lambda_sph) == (0.0, 0.0, 0.0, 0.0)
    assert b.total_with_csl == 0.0


def test_vanishing_sources(fig2_config):
    assert gas_diffusion(derive(replace(fig2_config, gas_pressure=0.0), 1e4), 1) == 0.0
    assert cavity_diffusion(derive(replace(fig2_config, G2_over_keff=0.0), 1e4), 1) == 0.0
    assert csl_diffusion(replace(fig2_config, csl_rate=0.0), 1e4) == 0.0
    assert csl_diffusion(replace(fig2_config, csl_enabled=False), 1e4) == 0.0


def test_frequency_ratios(fig2_config):
    low, high = derive(fig2_config, 1e4), derive(fig2_config, 2e4)
    assert gas_diffusion(high, 1) / gas_diffusion(low, 1) == pytest.approx(0.5, rel=1e-12)
    assert trap_diffusion(high, 1) / trap_diffusion(low, 1) == pytest.approx(2.0, rel=1e-12)
    assert csl_diffusion(fig2_config, 2e4) / csl_diffusion(fig2_config, 1e4) == pytest.approx(0.5, rel=1e-12)


def test_mode_two_sits_at_twice_the_frequency(fig2_dq):
    first, second = budgets(fig2_dq)
    assert second.mode_index == 2
    assert second.D_t == pytest.approx(2 * first.D_t, rel=1e-12)
    assert second.D_a == pytest.approx(first.D_a / 2, rel=1e-12)


def test_radius_ratios(fig2_config):
    small = derive(fig2_config, 1e4)
    large = derive(replace(fig2_config, radius=2 * fig2_config.radius), 1e4)
    assert trap_diffusion(large, 1) / trap_diffusion(small, 1) == pytest.approx(8.0, rel=1e-12)
    # at fixed couplings R^3 cancels against n_ph
    assert cavity_diffusion(large, 1) / cavity_diffusion(small, 1) == pytest.approx(1.0, rel=1e-12)


def test_bracket_is_positive():
    for x in np.logspace(-8, 3, 200):
        assert csl_bracket(x) > 0


def test_bracket_series_matches_closed_form_near_threshold():
    for x in (2e-4, 5e-4, 1e-3, 1e-2):
        series = x ** 3 / 12 - x ** 4 / 24 + x ** 5 / 80
        assert csl_bracket(x) == pytest.approx(series, rel=1e-6)


def test_bracket_matches_textbook_form():
    for x in (1e-2, 0.5, 5.0, 40.0):
        e = np.exp(-x)
        assert csl_bracket(x) == pytest.approx(e - 1.0 + 0.5 * x * (e + 1.0), rel=1e-9)


def test_bracket_series_below_threshold():
    x = CSL_SERIES_THRESHOLD / 10
    assert csl_bracket(x) == pytest.approx(x ** 3 / 12, rel=1e-5)


def test_tiny_radius_stays_finite(fig2_config):
    value = csl_diffusion(replace(fig2_config, radius=1e-4 * fig2_config.csl_length), 1e4)
    assert np.isfinite(value) and value > 0


def test_invalid_inputs(fig2_config, fig2_dq):
    with pytest.raises(ConfigError):
        csl_diffusion(replace(fig2_config, radius=0.0), 1e4)
    with pytest.raises(ConfigError):
        csl_diffusion(fig2_config, -1.0)
    with pytest.raises(ConfigError):
        gas_diffusion(replace(fig2_dq, omega1=0.0), 1)


def test_parity_rate_is_frequency_independent(fig2_config):
    low = csl_gas_parity_rate(derive(fig2_config, 1e4))
    high = csl_gas_parity_rate(derive(fig2_config, 3e4))
    assert low == pytest.approx(high, rel=1e-12)


def test_parity_rate_matches_gas_diffusion(fig2_config, fig2_dq):
    rate = csl_gas_parity_rate(fig2_dq)
    matched = csl_diffusion(replace(fig2_config, csl_rate=rate), fig2_dq.omega1)
    assert matched == pytest.approx(gas_diffusion(fig2_dq, 1), rel=1e-12)
    assert rate == pytest.approx(1.23e-10, rel=2e-2)
