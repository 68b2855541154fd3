import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from bregprox.errors import DomainError, HessianUnavailable
from bregprox.kernels import (KERNEL_KINDS, ball_example_kernel, make_kernel,
                              kernel_roundtrip_check, scale_kernel, separable)

ALL_KERNELS = [make_kernel("half_squared_norm"), make_kernel("power", q=1.5),
               make_kernel("power", q=3.0), make_kernel("boltzmann_shannon"),
               make_kernel("burg"), make_kernel("fermi_dirac"),
               make_kernel("hellinger"), make_kernel("exponential")]


def interior_samples(kernel, n=60, seed=0):
    rng = np.random.default_rng(seed)
    lo, hi = kernel.components[0].sample_interval
    return [rng.uniform(lo, hi, size=kernel.dim) for _ in range(n)]


@pytest.mark.parametrize("kernel", ALL_KERNELS, ids=lambda k: k.name)
def test_gradient_roundtrip(kernel):
    report = kernel_roundtrip_check(kernel, interior_samples(kernel), tol=1e-9)
    assert report["max_error"] <= 1e-9


@pytest.mark.parametrize("kernel", ALL_KERNELS, ids=lambda k: k.name)
def test_fenchel_young_equality(kernel):
    # phi(x) + phi*(grad phi(x)) = <x, grad phi(x)> at interior points
    for x in interior_samples(kernel):
        g = kernel.grad(x)
        gap = kernel.value(x) + kernel.conj_value(g) - float(x @ g)
        assert abs(gap) <= 1e-9 * (1.0 + abs(kernel.value(x)))


@pytest.mark.parametrize("kernel", ALL_KERNELS, ids=lambda k: k.name)
def test_conjugate_is_involutive(kernel):
    back = kernel.conjugate().conjugate()
    for x in interior_samples(kernel, n=20):
        assert np.allclose(back.grad(x), kernel.grad(x))
        assert np.isclose(back.value(x), kernel.value(x))


@pytest.mark.parametrize("kernel", ALL_KERNELS, ids=lambda k: k.name)
def test_hessian_positive_where_available(kernel):
    for x in interior_samples(kernel, n=20):
        try:
            h = kernel.hessian(x)
        except HessianUnavailable:
            continue
        assert np.all(h > 0)


def test_supercoercivity_flags():
    # supercoercive exactly when the conjugate has full domain
    for kernel in ALL_KERNELS:
        assert kernel.supercoercive == kernel.conjugate().full_domain
    assert not make_kernel("burg").supercoercive
    assert not make_kernel("exponential").supercoercive
    assert make_kernel("half_squared_norm").supercoercive
    assert make_kernel("boltzmann_shannon").supercoercive


def test_power_kernel_conjugate_exponent():
    # conjugate of (1/q)|x|^q is (1/q*)|y|^{q*} with 1/q + 1/q* = 1
    k = make_kernel("power", q=1.5)
    y = np.array([0.7])
    qstar = 3.0
    assert np.isclose(k.conj_value(y), abs(y[0]) ** qstar / qstar)


def test_power_kernel_hessian_blows_up_at_zero():
    k = make_kernel("power", q=1.5)
    with pytest.raises(HessianUnavailable):
        k.hessian(np.zeros(1))


def test_very_strict_convexity_flags():
    assert make_kernel("half_squared_norm").very_strictly_convex
    assert make_kernel("power", q=2.0).very_strictly_convex
    assert not make_kernel("power", q=1.5).very_strictly_convex
    assert not ball_example_kernel().very_strictly_convex


def test_domain_membership():
    burg = make_kernel("burg")
    assert burg.dom_interior(np.array([0.5]))
    assert not burg.dom_interior(np.array([0.0]))
    assert not burg.dom_interior(np.array([-1.0]))
    hell = make_kernel("hellinger")
    assert hell.dom_interior(np.array([0.999]))
    assert not hell.dom_interior(np.array([1.001]))


def test_separable_product():
    k = separable([make_kernel("half_squared_norm").components[0],
                   make_kernel("boltzmann_shannon").components[0]])
    x = np.array([1.2, 0.7])
    expected = 0.5 * 1.2 ** 2 + (0.7 * np.log(0.7) - 0.7)
    assert np.isclose(k.value(x), expected)
    assert k.dim == 2


def test_scale_kernel_value_and_conjugate():
    k = make_kernel("half_squared_norm")
    tau = 2.5
    ks = scale_kernel(k, tau)
    x = np.array([1.3])
    assert np.isclose(ks.value(x), tau * k.value(x))
    # (tau phi)*(y) = tau phi*(y / tau), and gradients stay inverse to each other
    y = ks.grad(x)
    assert np.allclose(ks.conj_grad(y), x)
    assert np.isclose(ks.value(x) + ks.conj_value(y), float(x @ y))


def test_ball_example_kernel_shape():
    k = ball_example_kernel()
    assert k.dim == 2
    x = np.array([0.5, -0.3])
    expected = 0.5 ** 2 + 0.5 ** 1.1 + (-0.3) ** 2
    assert np.isclose(k.value(x), expected)
    # gradient inversion through the numeric conjugate
    assert np.allclose(k.conj_grad(k.grad(x)), x, atol=1e-9)


def test_make_kernel_rejects_unknown_kind():
    with pytest.raises(ValueError):
        make_kernel("not-a-kernel")
    with pytest.raises(ValueError):
        make_kernel("power", q=1.0)


@settings(max_examples=60, deadline=None)
@given(st.floats(min_value=-5.0, max_value=5.0),
       st.sampled_from(["half_squared_norm", "exponential"]))
def test_roundtrip_property_full_domain_kernels(x, kind):
    k = make_kernel(kind)
    xv = np.array([x])
    assert np.allclose(k.conj_grad(k.grad(xv)), xv, atol=1e-8)


@settings(max_examples=60, deadline=None)
@given(st.floats(min_value=0.01, max_value=20.0))
def test_roundtrip_property_positive_domain(x):
    for kind in ("boltzmann_shannon", "burg"):
        k = make_kernel(kind)
        xv = np.array([x])
        assert np.allclose(k.conj_grad(k.grad(xv)), xv,
                           atol=1e-8 * (1.0 + abs(x)))
