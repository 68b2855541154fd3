import numpy as np
import pytest

from bregprox.analytic import PowerProxSpec, make_power_prox_solver
from bregprox.envelopes import (composed_left_envelope_value,
                                envelope_complement_convexity_check,
                                fd_gradient, left_env_grad,
                                left_env_grad_composed, left_envelope_value,
                                oracle_solver, right_env_grad,
                                right_envelope_value)
from bregprox.errors import DomainError
from bregprox.kernels import make_kernel
from bregprox.objectives import power_lp, scaled_abs
from bregprox.proxcore import SearchConfig

EUCLID = make_kernel("half_squared_norm")
SEARCH = SearchConfig(box=[(-8.0, 8.0)], resolution=2e-3)


def huber_value(c, y):
    # Moreau envelope of c|x| at step 1
    return c * abs(y) - c * c / 2.0 if abs(y) >= c else 0.5 * y * y


def huber_grad(c, y):
    return np.sign(y) * c if abs(y) >= c else y


def test_left_envelope_of_abs_is_huber():
    solver = oracle_solver(SEARCH)
    f = scaled_abs(0.6)
    for y in (-2.0, -0.3, 0.4, 1.9):
        env = left_envelope_value(f, EUCLID, 1.0, np.array([y]), solver)
        assert np.isclose(env, huber_value(0.6, y), atol=1e-9)


def test_left_gradient_formula_matches_huber_gradient():
    solver = oracle_solver(SEARCH)
    f = scaled_abs(0.6)
    for y in (-2.0, -0.3, 0.4, 1.9):
        g = left_env_grad(f, EUCLID, 1.0, np.array([y]), solver)
        assert np.isclose(g[0], huber_grad(0.6, y), atol=1e-6)


def test_composed_left_gradient_euclidean_case():
    # for the Euclidean kernel, conj_grad is the identity and the composed
    # expression reduces to (y - prox(y)) / lam
    solver = oracle_solver(SEARCH)
    f = scaled_abs(0.6)
    y = np.array([1.4])
    g1 = left_env_grad_composed(f, EUCLID, 1.0, y, solver)
    g2 = left_env_grad(f, EUCLID, 1.0, y, solver)
    assert np.allclose(g1, g2, atol=1e-7)


def test_all_three_formulas_match_finite_differences():
    spec = PowerProxSpec(0.5, 2, 1.0)
    f, k = power_lp(0.5), spec.kernel()
    solver = make_power_prox_solver(0.5, 2)
    for y in (2.8, 4.5, -3.4):
        yv = np.array([y])
        g = left_env_grad(f, k, 1.0, yv, solver)
        fd = fd_gradient(lambda z: left_envelope_value(f, k, 1.0, z, solver), yv)
        assert np.allclose(g, fd["grad"], rtol=1e-6, atol=1e-8)

        g = left_env_grad_composed(f, k, 1.0, yv, solver)
        fd = fd_gradient(
            lambda z: composed_left_envelope_value(f, k, 1.0, z, solver), yv)
        assert np.allclose(g, fd["grad"], rtol=1e-6, atol=1e-8)

        g = right_env_grad(f, k, 1.0, yv, SEARCH)
        fd = fd_gradient(lambda z: right_envelope_value(f, k, 1.0, z, SEARCH), yv)
        assert np.allclose(g, fd["grad"], rtol=1e-4, atol=1e-6)


def test_fd_gradient_on_smooth_function():
    fd = fd_gradient(lambda z: float(np.sum(np.sin(z))), np.array([0.3, -1.1]))
    assert np.allclose(fd["grad"], np.cos([0.3, -1.1]), atol=1e-9)
    assert fd["spread"] < 1e-8


def test_complement_convexity_left_side():
    spec = PowerProxSpec(0.5, 2, 1.0)
    ok = envelope_complement_convexity_check(
        power_lp(0.5), spec.kernel(), 1.0, "left", n_pairs=200, tol=1e-8,
        box=[(-6.0, 6.0)], seed=3, solver=make_power_prox_solver(0.5, 2))
    assert ok


def test_complement_convexity_right_side():
    ok = envelope_complement_convexity_check(
        scaled_abs(0.5), EUCLID, 1.0, "right", n_pairs=60, tol=1e-6,
        box=[(-4.0, 4.0)], seed=3, search=SearchConfig(box=[(-8.0, 8.0)],
                                                       resolution=2e-3))
    assert ok


def test_left_complement_needs_supercoercive_kernel():
    # the left-side statement lives on dom phi* = R^m
    with pytest.raises(DomainError):
        envelope_complement_convexity_check(
            scaled_abs(0.5), make_kernel("burg"), 1.0, "left", n_pairs=10,
            tol=1e-6, box=[(0.5, 2.0)], seed=0,
            solver=oracle_solver(SearchConfig(box=[(0.1, 5.0)],
                                              resolution=2e-3)))


def test_step_size_above_threshold_is_rejected():
    from bregprox.objectives import neg_quadratic
    with pytest.raises(DomainError):
        envelope_complement_convexity_check(
            neg_quadratic(a=0.5), EUCLID, 3.0, "left", n_pairs=10, tol=1e-6,
            box=[(-2.0, 2.0)], seed=0, solver=oracle_solver(SEARCH))
