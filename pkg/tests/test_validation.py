import numpy as np
import pytest

from gksl_reduce import reduce_model, zoo_build
from gksl_reduce.propagate import default_initial_state
from gksl_reduce.validation import (
    default_time_grid,
    effective_decay_rate,
    exact_map_diagnostics,
    fit_decay_rate,
    fit_loglog_slope,
    order_scaling,
    slow_coordinate_error,
    validate_closeness,
    validate_second_order,
)


@pytest.fixture(scope="module")
def unperturbed():
    return reduce_model(zoo_build("purcell_two_qubit", g=0.0), order=3)


def test_fit_decay_rate_recovers_exponent():
    t = np.linspace(0, 10, 20)
    rate, mask = fit_decay_rate(t, 3.0 * np.exp(-0.7 * t))
    assert np.isclose(rate, 0.7)
    assert mask.all()


def test_fit_decay_rate_ignores_floor_points():
    t = np.linspace(0, 10, 11)
    err = np.exp(-2.0 * t)
    err[err < 1e-8] = 1e-13
    rate, mask = fit_decay_rate(t, err)
    assert np.isclose(rate, 2.0)
    assert mask.sum() == 10 and not mask[-1]


def test_fit_decay_rate_needs_two_points():
    rate, mask = fit_decay_rate([1.0, 2.0], [1e-20, 1e-20])
    assert rate is None and not mask.any()


def test_loglog_slope():
    x = np.array([0.01, 0.02, 0.04])
    assert np.isclose(fit_loglog_slope(x, 5 * x ** 2), 2.0)
    assert fit_loglog_slope(x, np.zeros(3), 1e-12) is None


def test_closeness_without_perturbation_is_at_floor(unperturbed):
    rho0 = default_initial_state(unperturbed.split)
    rep = validate_closeness(unperturbed, 0.05, rho0)
    assert max(rep.errors) <= 1e-12
    assert rep.status == "pass_at_floor" and rep.passed


def test_closeness_damped_qubit_passes():
    r = reduce_model(zoo_build("damped_qubit"), order=8)
    rep = validate_closeness(r, 0.05, default_initial_state(r.split))
    assert rep.passed
    assert rep.status in ("pass", "pass_at_floor")


def test_closeness_purcell_rate_near_fast_rate():
    r = reduce_model(zoo_build("purcell_two_qubit"), order=8)
    rep = validate_closeness(r, 0.05, default_initial_state(r.split))
    assert rep.status == "pass"
    assert rep.fitted_rate >= 0.8 * r.gamma
    assert rep.prefactor > 0


def test_closeness_single_time_point_skips_fit(unperturbed):
    rep = validate_closeness(unperturbed, 0.05, default_initial_state(unperturbed.split), times=[3.0])
    assert rep.status == "fit_skipped" and rep.passed is None
    assert rep.warnings


def test_closeness_rejects_state_outside_slow_span(zoo_reductions):
    r = zoo_reductions["purcell_two_qubit"]
    with pytest.raises(ValueError, match="span"):
        validate_closeness(r, 0.05, np.eye(4) / 4)


def test_closeness_initial_error_is_second_order():
    r = reduce_model(zoo_build("purcell_two_qubit"), order=2)
    rho0 = default_initial_state(r.split)
    e1 = slow_coordinate_error(r, 0.02, rho0, 0.0, 2)
    e2 = slow_coordinate_error(r, 0.04, rho0, 0.0, 2)
    assert 1.7 <= np.log2(e2 / e1) <= 2.3


def test_second_order_without_perturbation_is_at_floor(unperturbed):
    rep = validate_second_order(unperturbed, [0.02, 0.04, 0.08, 0.16])
    assert max(rep.state_error.values) <= 1e-11
    assert rep.state_error.status == "pass_at_floor"
    assert rep.passed


def test_second_order_purcell_slope():
    r = reduce_model(zoo_build("purcell_two_qubit"), order=2)
    rep = validate_second_order(r, [0.02, 0.04, 0.08, 0.16], tbar=1.0)
    assert 1.7 <= rep.state_error.slope <= 2.3
    assert rep.trace_defect.passed and rep.choi_negativity.passed


def test_order_scaling_lambda():
    r = reduce_model(zoo_build("lambda_system"), order=3)
    rep = order_scaling(r, [1, 2, 3], [0.01, 0.02, 0.04, 0.08])
    assert np.isclose(rep.horizon, 10.0 / r.gamma)
    assert all(rep.passed().values()), rep.slopes


def test_default_time_grid():
    grid = default_time_grid(0.5)
    assert np.isclose(grid[0], 4.0) and np.isclose(grid[-1], 40.0) and len(grid) == 10


def test_exact_map_diagnostics(zoo_reductions):
    diag = exact_map_diagnostics(zoo_reductions["two_photon_loss"], 0.05, 3.0)
    assert diag["min_choi_eigenvalue"] >= -1e-10 and diag["trace_defect"] <= 1e-10


def test_effective_decay_rate():
    assert np.isclose(effective_decay_rate(np.diag([0.0, -1.0, -0.5])), 1.0)
