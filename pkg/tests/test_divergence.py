import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from bregprox.divergence import (bregman, bregman_batch, bregman_dual_gap,
                                 quadratic_bounds)
from bregprox.errors import DomainError
from bregprox.kernels import make_kernel


def test_half_squared_norm_reduces_to_euclidean():
    k = make_kernel("half_squared_norm", dim=2)
    x, y = np.array([1.0, -2.0]), np.array([0.5, 1.0])
    assert np.isclose(bregman(k, x, y), 0.5 * np.sum((x - y) ** 2))


def test_boltzmann_shannon_is_kullback_leibler():
    k = make_kernel("boltzmann_shannon")
    x, y = np.array([2.0]), np.array([3.0])
    expected = 2.0 * np.log(2.0 / 3.0) - 2.0 + 3.0
    assert np.isclose(bregman(k, x, y), expected)


@pytest.mark.parametrize("kind,q", [("half_squared_norm", None),
                                    ("power", 1.5), ("power", 3.0),
                                    ("boltzmann_shannon", None),
                                    ("burg", None), ("fermi_dirac", None),
                                    ("hellinger", None),
                                    ("exponential", None)])
def test_nonnegative_and_zero_on_diagonal(kind, q):
    k = make_kernel(kind, q=q)
    rng = np.random.default_rng(3)
    lo, hi = k.components[0].sample_interval
    for _ in range(50):
        x = rng.uniform(lo, hi, size=1)
        y = rng.uniform(lo, hi, size=1)
        d = bregman(k, x, y)
        assert d >= -1e-12
        assert abs(bregman(k, x, x)) <= 1e-12


def test_noninterior_second_argument_raises():
    k = make_kernel("burg")
    with pytest.raises(DomainError):
        bregman(k, np.array([1.0]), np.array([0.0]))


def test_outside_domain_first_argument_is_infinite():
    k = make_kernel("burg")
    assert bregman(k, np.array([-1.0]), np.array([2.0])) == np.inf


def test_batch_matches_pointwise():
    k = make_kernel("fermi_dirac", dim=2)
    rng = np.random.default_rng(5)
    X = rng.uniform(0.1, 0.9, size=(40, 2))
    y = np.array([0.4, 0.6])
    batch = bregman_batch(k, X, y)
    for xi, di in zip(X, batch):
        assert np.isclose(di, bregman(k, xi, y))


@pytest.mark.parametrize("kind,q", [("half_squared_norm", None),
                                    ("power", 1.5),
                                    ("boltzmann_shannon", None),
                                    ("burg", None), ("fermi_dirac", None),
                                    ("hellinger", None),
                                    ("exponential", None)])
def test_dual_identity(kind, q):
    # D_phi(x, y) = D_{phi*}(grad phi(y), grad phi(x))
    k = make_kernel(kind, q=q)
    rng = np.random.default_rng(11)
    lo, hi = k.components[0].sample_interval
    for _ in range(50):
        x = rng.uniform(lo, hi, size=1)
        y = rng.uniform(lo, hi, size=1)
        assert bregman_dual_gap(k, x, y) <= 1e-8


def test_quadratic_bounds_sandwich():
    k = make_kernel("boltzmann_shannon")
    box = [(0.5, 2.0)]
    theta, big_theta = quadratic_bounds(k, box)
    # Hessian of x log x - x is 1/x: extremes 1/2 and 2 on [0.5, 2]
    assert np.isclose(theta, 0.5)
    assert np.isclose(big_theta, 2.0)
    rng = np.random.default_rng(2)
    for _ in range(100):
        x = rng.uniform(0.5, 2.0, size=1)
        y = rng.uniform(0.5, 2.0, size=1)
        d = bregman(k, x, y)
        sq = 0.5 * float(np.sum((x - y) ** 2))
        assert theta * sq <= d + 1e-12
        assert d <= big_theta * sq + 1e-12


@settings(max_examples=80, deadline=None)
@given(st.floats(min_value=-3.0, max_value=3.0),
       st.floats(min_value=-3.0, max_value=3.0))
def test_convexity_in_first_argument_property(x, y):
    # D(., y) is convex: midpoint inequality for the quadratic-plus-power kernel
    k = make_kernel("power", q=3.0)
    xv, yv = np.array([x]), np.array([y])
    mid = 0.5 * (xv + yv)
    base = np.array([0.7])
    lhs = bregman(k, mid, base)
    rhs = 0.5 * bregman(k, xv, base) + 0.5 * bregman(k, yv, base)
    assert lhs <= rhs + 1e-10
