from dataclasses import replace

import numpy as np
import pytest

from nanosphere_csl.exceptions import InstabilityError, SweepError, ValidityWarning
from nanosphere_csl.physics_modules.dynamics import LinearModel, build_model, solve_lyapunov
from nanosphere_csl.physics_modules.entanglement import log_negativity, mechanical_block
from nanosphere_csl.physics_modules.noise import budgets
from nanosphere_csl.physics_modules.parameters import derive
from nanosphere_csl.physics_modules.sweep import (
    SweepSpec,
    check_scheme_validity,
    default_omega_grid,
    evaluate_point,
    make_grid,
    relative_difference,
    run_sweep,
    slope_sign_changes,
    slope_sign_discriminator,
)
from nanosphere_csl.reporting import emit, sweep_frame


def _omega_sweep(config, points=8, csl="both", workers=1):
    grid = make_grid(2.0e3, 1.0e5, points)
    return run_sweep(SweepSpec(base=config, grid=grid, csl=csl), workers=workers)


def test_make_grid():
    grid = make_grid(1.0, 100.0, 3)
    assert grid == pytest.approx((1.0, 10.0, 100.0), rel=1e-12)
    assert make_grid(0.0, 1.0, 3, log=False) == pytest.approx((0.0, 0.5, 1.0))
    assert make_grid(5.0, 5.0, 1) == (5.0,)


@pytest.mark.parametrize("args", [(1.0, 2.0, 0), (2.0, 1.0, 3), (0.0, 1.0, 3)])
def test_make_grid_rejects_bad_ranges(args):
    with pytest.raises(SweepError):
        make_grid(*args)


def test_default_grid_spans_ten_to_five_hundred_decay_rates(fig2_config):
    grid = default_omega_grid(fig2_config)
    assert len(grid) == 40
    assert grid[0] == pytest.approx(2.0e3, rel=1e-12)
    assert grid[-1] == pytest.approx(1.0e5, rel=1e-12)


@pytest.mark.parametrize("kwargs", [
    {"grid": ()},
    {"grid": (2.0, 1.0)},
    {"grid": (1.0, 1.0)},
    {"grid": (float("nan"),)},
    {"grid": (0.0, 1.0)},
    {"grid": (1e4,), "parameter": "pressure"},
    {"grid": (1e4,), "csl": "maybe"},
    {"grid": (-1e-9, 0.0), "parameter": "lambda"},
])
def test_sweep_spec_validation(fig2_config, kwargs):
    with pytest.raises(SweepError):
        SweepSpec(base=fig2_config, **kwargs)


def test_single_point_sweep(fig2_config):
    result = run_sweep(SweepSpec(base=fig2_config, grid=(1.0e4,), csl="off"))
    assert len(result.points) == 1
    point = result.points[0]
    assert point.stable
    assert point.E_N_off > 0
    assert np.isnan(point.E_N_on)
    assert result.omega1[0] == 1.0e4


def test_missing_variant_is_an_error(fig2_config):
    result = _omega_sweep(fig2_config, points=4, csl="off")
    with pytest.raises(SweepError):
        result.E_N(True)
    with pytest.raises(SweepError):
        slope_sign_discriminator(result)


def test_point_matches_direct_evaluation(fig2_config):
    point = evaluate_point(fig2_config, 1.0e4)
    dq = derive(fig2_config, 1.0e4)
    for csl_on in (False, True):
        direct = log_negativity(mechanical_block(solve_lyapunov(build_model(dq, budgets(dq), csl_on))))
        assert point.E_N(csl_on) == direct


def test_zero_collapse_rate_leaves_entanglement_unchanged(fig2_config):
    spec = SweepSpec(base=fig2_config, grid=(0.0, 1e-9, 1e-8), parameter="lambda")
    result = run_sweep(spec)
    rel = relative_difference(result)
    assert rel[0] == 0.0
    assert np.all(rel[1:] >= 0)
    assert rel[2] > rel[1]
    frame = sweep_frame(result)
    assert list(frame.columns[:2]) == ["lambda", "omega1"]
    assert frame["omega1"].eq(1.0e4).all()


def test_collapse_noise_never_helps(fig2_config):
    result = _omega_sweep(fig2_config)
    assert result.stable.all()
    assert np.all(result.E_N(True) <= result.E_N(False))
    rel = relative_difference(result)
    assert np.all(rel[np.isfinite(rel)] >= 0)


def test_extra_mechanical_diffusion_never_increases_entanglement(fig2_dq):
    model = build_model(fig2_dq, budgets(fig2_dq), csl_on=False)
    base = log_negativity(mechanical_block(solve_lyapunov(model)))
    for delta in (0.1, 1.0, 10.0):
        extra = np.diag([delta, delta, delta, delta, 0.0, 0.0])
        noisier = LinearModel(drift=model.drift, diffusion=model.diffusion + extra,
                              ordering=model.ordering, rate_scale=model.rate_scale)
        assert log_negativity(mechanical_block(solve_lyapunov(noisier))) <= base


@pytest.mark.filterwarnings("ignore::nanosphere_csl.exceptions.ValidityWarning")
def test_all_unstable_sweep_raises(fig2_config):
    with pytest.raises(InstabilityError):
        _omega_sweep(replace(fig2_config, G1_over_G2=1.5), points=3)


def test_parallel_sweep_is_byte_identical(fig2_config):
    serial = _omega_sweep(fig2_config, points=6)
    parallel = _omega_sweep(fig2_config, points=6, workers=2)
    assert serial.metadata.config_hash == parallel.metadata.config_hash
    assert emit(sweep_frame(serial), serial.metadata.config_hash) == \
        emit(sweep_frame(parallel), parallel.metadata.config_hash)


def test_zero_collapse_rate_is_indistinguishable(fig2_config):
    result = _omega_sweep(replace(fig2_config, csl_rate=0.0))
    report = slope_sign_discriminator(result)
    assert report.verdict == "indistinguishable"
    assert report.mean_gap == 0.0
    assert len(report.window) == 3


def test_discriminator_needs_three_entangled_points(fig2_config):
    result = _omega_sweep(fig2_config, points=2)
    with pytest.raises(SweepError):
        slope_sign_discriminator(result)


def test_discriminator_rejects_bad_window(fig2_config):
    result = _omega_sweep(fig2_config, points=4)
    with pytest.raises(SweepError):
        slope_sign_discriminator(result, window=0.0)


def test_slope_sign_changes():
    assert slope_sign_changes([0, 0, 1, 2, 1, 0, 0]) == 1
    assert slope_sign_changes([3, 2, 1]) == 0
    assert slope_sign_changes([1, 2, 1, 2]) == 2
    assert slope_sign_changes([1.0]) == 0


def test_scheme_validity_gate(fig2_config):
    assert check_scheme_validity(derive(fig2_config, 1.0e4)) == []
    kinds = [kind for kind, _ in check_scheme_validity(derive(fig2_config, 300.0))]
    assert "omega-kappa" in kinds
    assert "coupling-omega" in kinds


def test_low_frequency_sweep_warns(fig2_config):
    with pytest.warns(ValidityWarning, match="omega1"):
        run_sweep(SweepSpec(base=fig2_config, grid=(300.0, 400.0), csl="off"))


def test_discriminator_window_counts_entangled_points_only(fig2_config):
    # E_N is zero on this stretch of the baseline, so a five-point grid still has no window
    result = run_sweep(SweepSpec(base=fig2_config, grid=make_grid(5.0e4, 1.0e5, 5)))
    assert np.all(result.E_N(False) == 0.0)
    with pytest.raises(SweepError, match="entangled"):
        slope_sign_discriminator(result)


def test_window_starts_at_first_entangled_point(fig2_config):
    result = run_sweep(SweepSpec(base=fig2_config, grid=make_grid(2.0e3, 1.0e5, 12)))
    report = slope_sign_discriminator(result)
    off, on = result.E_N(False), result.E_N(True)
    entangled = result.values[(off > 0) & (on > 0)]
    assert report.window == tuple(entangled[:3])


@pytest.mark.parametrize("workers", [1, 2])
def test_point_warnings_reach_the_caller(fig2_config, workers):
    config = replace(fig2_config, G1_over_G2=0.0)
    with pytest.warns(ValidityWarning, match="outside"):
        result = run_sweep(SweepSpec(base=config, grid=(5.0e3, 1.0e4), csl="off"), workers=workers)
    assert result.stable.all()
