import numpy as np
import pytest
import scipy.linalg as sla

from gksl_reduce import reduce_model, zoo_build
from gksl_reduce.exceptions import ExponentialRangeError
from gksl_reduce.lindblad import GeneratorSpec, build_lindbladian
from gksl_reduce.operators import Superoperator, cp_tp_diagnostics
from gksl_reduce.propagate import (
    default_initial_state,
    exact_slow_coordinates,
    full_slow_map,
    matrix_exponential_apply,
    propagator,
    reduced_trajectory,
    second_order_reduced_map,
)
from gksl_reduce.zoo import SIGMA_MINUS

from .conftest import random_density, random_hermitian


def _damping():
    return build_lindbladian(GeneratorSpec(np.zeros((2, 2)), [SIGMA_MINUS]))


def test_exponential_at_zero_time_is_identity(rng):
    X = random_hermitian(rng, 2)
    np.testing.assert_array_equal(matrix_exponential_apply(_damping(), 0.0, X), X)


def test_exponential_long_time_limit_is_ground_state(rng):
    X = random_density(rng, 2) * 3.0
    out = matrix_exponential_apply(_damping(), 60.0, X)
    np.testing.assert_allclose(out, np.trace(X) * np.diag([1.0, 0.0]), atol=1e-12)


def test_semigroup_property(rng):
    L = build_lindbladian(GeneratorSpec(random_hermitian(rng, 3), [rng.normal(size=(3, 3))]))
    X = random_hermitian(rng, 3)
    lhs = matrix_exponential_apply(L, 0.7, X)
    rhs = matrix_exponential_apply(L, 0.3, matrix_exponential_apply(L, 0.4, X))
    np.testing.assert_allclose(lhs, rhs, atol=1e-10)


def test_exponential_against_eigendecomposition(rng):
    """Independent route for a diagonalizable generator."""
    L = build_lindbladian(GeneratorSpec(random_hermitian(rng, 2), [rng.normal(size=(2, 2))]))
    w, V = np.linalg.eig(L.matrix)
    ref = V @ np.diag(np.exp(1.3 * w)) @ np.linalg.inv(V)
    np.testing.assert_allclose(propagator(L, 1.3).matrix, ref, atol=1e-10)


def test_negative_time_rejected():
    with pytest.raises(ValueError):
        propagator(_damping(), -1.0)


def test_overflow_raises_range_error():
    S = Superoperator(1, np.array([[1.0]]))
    with pytest.raises(ExponentialRangeError):
        propagator(S, 1e6)


def test_full_slow_map_limits(zoo_reductions):
    r = zoo_reductions["lambda_system"]
    K = r.split.Kbar.matrix
    np.testing.assert_allclose(full_slow_map(r, 0.05, 0.0).matrix, K, atol=1e-15)
    np.testing.assert_allclose(full_slow_map(r, 0.0, 50.0 / r.gamma).matrix, K, atol=1e-12)
    short = full_slow_map(r, 0.0, 1.0).matrix
    np.testing.assert_allclose(short, K @ sla.expm(r.L0.matrix), atol=1e-12)


@pytest.mark.parametrize("eps,T", [(0.02, 1.0), (0.05, 10.0), (0.1, 40.0)])
def test_full_slow_map_is_tpcp(zoo_reductions, eps, T):
    for r in zoo_reductions.values():
        diag = cp_tp_diagnostics(full_slow_map(r, eps, T))
        assert diag["min_choi_eigenvalue"] >= -1e-10
        assert diag["trace_defect"] <= 1e-10


def test_reduced_trajectory_without_perturbation_is_constant():
    model = zoo_build("purcell_two_qubit", g=0.0)
    r = reduce_model(model, order=2)
    x0 = np.array([0.7, 0.1, -0.2, 0.3])
    for T in (0.0, 5.0, 100.0):
        np.testing.assert_allclose(reduced_trajectory(r.slow, r.pairing(0.1), x0, 0.1, T), x0, atol=1e-14)


def test_reduced_trajectory_at_zero_time_is_second_order_close(zoo_reductions):
    """E = I + O(eps^2): exact identity at first order, an eps^2 offset at second order."""
    r = zoo_reductions["lambda_system"]
    x0 = np.array([0.7, 0.1, -0.2, 0.3])
    z0 = reduced_trajectory(r.slow, r.pairing(0.05, 1), x0, 0.05, 0.0, 1)
    np.testing.assert_allclose(z0, x0, atol=1e-14)
    gaps = []
    for eps in (0.01, 0.02):
        z0 = reduced_trajectory(r.slow, r.pairing(eps, 2), x0, eps, 0.0, 2)
        gaps.append(np.abs(z0 - x0).sum())
    assert 0 < gaps[0] < 1e-3
    assert 3.5 < gaps[1] / gaps[0] < 4.5


def test_product_truncation_differs_only_beyond_order(zoo_reductions):
    r = zoo_reductions["lambda_system"]
    diffs = [np.abs(r.pairing(e, 2).E - r.pairing(e, 2, truncation="product").E).max() for e in (0.01, 0.02)]
    assert diffs[0] < 1e-5
    assert np.log2(diffs[1] / diffs[0]) > 2.7
    with pytest.raises(ValueError):
        r.pairing(0.01, truncation="bogus")


def test_purcell_reduced_trajectory_within_envelope(zoo_reductions):
    """Exact slow coordinates and z(T) differ by a transient that decays at the fast rate."""
    r = zoo_reductions["purcell_two_qubit"]
    rho0 = default_initial_state(r.split, seed=3)
    x0 = r.split.slow_coordinates(rho0)
    eps = 0.05
    errors = []
    for T in (2.0, 8.0, 14.0):
        z = reduced_trajectory(r.slow, r.pairing(eps), x0, eps, T)
        errors.append(np.abs(exact_slow_coordinates(r, eps, rho0, T) - z).sum())
    assert errors[1] < errors[0] * np.exp(-0.8 * r.gamma * 6.0)


def test_second_order_map_small_eps_limit(zoo_reductions):
    r = zoo_reductions["lambda_system"]
    M, _ = second_order_reduced_map(r.split, r.slow, 1e-7, 1.0)
    np.testing.assert_allclose(M, sla.expm(r.slow.F[1]), atol=1e-6)


def test_second_order_map_without_perturbation_is_identity():
    r = reduce_model(zoo_build("lambda_system", omega1=0.0, omega2=0.0, delta=0.0), order=2)
    M, lifted = second_order_reduced_map(r.split, r.slow, 0.05, 1.0)
    np.testing.assert_allclose(M, np.eye(4), atol=1e-14)
    np.testing.assert_allclose(lifted.matrix, r.split.Kbar.matrix, atol=1e-12)


def test_second_order_map_needs_order_two(zoo_reductions):
    r1 = reduce_model(zoo_build("purcell_two_qubit"), order=1)
    with pytest.raises(ValueError):
        second_order_reduced_map(r1.split, r1.slow, 0.05, 1.0)


def test_default_initial_state_lies_in_slow_span(zoo_reductions):
    for r in zoo_reductions.values():
        rho = default_initial_state(r.split, seed=7)
        np.testing.assert_allclose(r.split.lift(r.split.slow_coordinates(rho)), rho, atol=1e-12)
        assert np.isclose(np.trace(rho), 1.0)
        np.testing.assert_array_equal(rho, default_initial_state(r.split, seed=7))


def test_exact_slow_coordinates_of_kernel_state_at_zero_time(zoo_reductions):
    r = zoo_reductions["two_photon_loss"]
    rho = default_initial_state(r.split)
    x = exact_slow_coordinates(r, 0.05, rho, 0.0)
    np.testing.assert_allclose(x, [np.vdot(s, rho).real for s in r.split.S], atol=1e-13)
