import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from bregprox.analytic import (PowerProxSpec, make_power_prox_solver,
                               poly_real_roots, power_prox,
                               power_prox_tilted, power_prox_vector,
                               power_proxreg_modulus)
from bregprox.errors import DomainError
from bregprox.objectives import power_lp
from bregprox.proxcore import ProxQuery, SearchConfig, left_envelope


def test_spec_exponent_relation():
    # q = alpha + (1 - alpha) p ties the kernel exponent to the reduction degree
    spec = PowerProxSpec(0.5, 2, 1.0)
    assert np.isclose(spec.q, 1.5)
    spec = PowerProxSpec(0.2, 4, 0.3)
    assert np.isclose(spec.q, 4 + (1 - 4) * 0.2)
    assert 1.0 < spec.q


@settings(max_examples=120, deadline=None)
@given(st.integers(min_value=2, max_value=4),
       st.lists(st.floats(min_value=-5.0, max_value=5.0), min_size=5,
                max_size=5))
def test_poly_real_roots_against_numpy(degree, coeffs):
    coeffs = coeffs[:degree + 1]
    if abs(coeffs[0]) < 1e-3:
        coeffs[0] = 1.0
    mine = sorted(poly_real_roots(coeffs, degree))
    ref = np.roots(coeffs)
    if any(0.0 < abs(r.imag) < 1e-3 for r in ref):
        return  # borderline double root: real/complex split is ambiguous
    ref = sorted(float(r.real) for r in ref if r.imag == 0.0)
    assert len(mine) == len(ref)
    for a, b in zip(mine, ref):
        assert np.isclose(a, b, atol=1e-6 * (1 + abs(b)))


def test_poly_real_roots_double_root_multiplicity():
    # (x - 1)^2 = x^2 - 2x + 1 reported twice
    roots = poly_real_roots([1.0, -2.0, 1.0], 2)
    assert len(roots) == 2
    assert np.allclose(roots, [1.0, 1.0], atol=1e-6)


def test_square_root_power_prox_known_point():
    # at p = 1/2, lam = 1, y = 4 the origin wins over the interior
    # stationary point; envelope value is D(0, 4) = (2/3) * 4^{3/2} / 4 ... = 8/3
    spec = PowerProxSpec(0.5, 2, 1.0)
    res = power_prox(spec, 4.0)
    assert not res.multivalued
    assert res.minimizers[0][0] == 0.0
    assert np.isclose(res.env_value, 8.0 / 3.0)


def test_power_prox_odd_symmetry():
    spec = PowerProxSpec(0.4, 3, 0.7)
    plus = power_prox(spec, 5.0)
    minus = power_prox(spec, -5.0)
    assert np.isclose(plus.env_value, minus.env_value)
    assert np.allclose(sorted(m[0] for m in plus.minimizers),
                       sorted(-m[0] for m in minus.minimizers))


def test_power_prox_becomes_multivalued_at_tie():
    # scanning y upward, the nonzero branch takes over from the origin;
    # near the tie both minimizers are reported
    spec = PowerProxSpec(0.5, 2, 1.0)
    lo, hi = 4.0, 9.0  # origin wins at 4, interior point wins at 9
    assert power_prox(spec, hi).minimizers[0][0] > 0
    for _ in range(60):
        mid = 0.5 * (lo + hi)
        if power_prox(spec, mid).minimizers[0][0] == 0.0:
            lo = mid
        else:
            hi = mid
    res = power_prox(spec, 0.5 * (lo + hi))
    assert res.multivalued
    assert len(res.minimizers) == 2


@pytest.mark.parametrize("p,alpha,lam,y", [
    (0.3, 2, 0.4, 2.7), (0.7, 3, 1.6, -6.2), (0.25, 4, 0.9, 8.8),
    (0.85, 2, 1.9, -0.4), (0.5, 3, 0.15, 9.9),
])
def test_power_prox_matches_grid_oracle(p, alpha, lam, y):
    spec = PowerProxSpec(p, alpha, lam)
    ana = power_prox(spec, y)
    ora = left_envelope(
        ProxQuery(power_lp(p), spec.kernel(), lam, np.array([y]), side="left"),
        SearchConfig(box=[(-abs(y) - 1.0, abs(y) + 1.0)], resolution=1e-3))
    assert np.isclose(ana.env_value, ora.env_value, atol=1e-8)
    assert len(ana.minimizers) == len(ora.minimizers)
    for a, o in zip(sorted(m[0] for m in ana.minimizers),
                    sorted(m[0] for m in ora.minimizers)):
        assert np.isclose(a, o, atol=1e-5)


def test_power_prox_vector_is_coordinatewise():
    spec = PowerProxSpec(0.5, 2, 1.0)
    y = np.array([4.0, -9.5, 0.0])
    per = power_prox_vector(spec, y)
    assert len(per) == 3
    for yi, ri in zip(y, per):
        ref = power_prox(spec, float(yi))
        assert np.isclose(ri.env_value, ref.env_value)
        assert np.allclose(sorted(m[0] for m in ri.minimizers),
                           sorted(m[0] for m in ref.minimizers))


def test_tilted_prox_consistent_with_plain():
    # the tilted solve with c = sign(y)|y|^{q-1}/lam must reproduce the
    # plain prox at base point y
    p, alpha, lam = 0.45, 2, 0.8
    spec = PowerProxSpec(p, alpha, lam)
    y = 3.3
    c = np.sign(y) * abs(y) ** (spec.q - 1.0) / lam
    tilt = power_prox_tilted(p, alpha, lam, c)
    plain = power_prox(spec, y)
    assert np.isclose(tilt.env_value, plain.env_value)
    assert np.allclose(sorted(m[0] for m in tilt.minimizers),
                       sorted(m[0] for m in plain.minimizers), atol=1e-10)


def test_solver_matches_scalar_prox_per_coordinate():
    solver = make_power_prox_solver(0.5, 2)
    spec = PowerProxSpec(0.5, 2, 1.0)
    y = np.array([4.0, -9.5])
    res = solver(power_lp(0.5, dim=2), spec.kernel(dim=2), 1.0, y)
    expected = sum(power_prox(spec, float(v)).env_value for v in y)
    assert np.isclose(res.env_value, expected)
    assert not res.multivalued


def test_proxreg_modulus_value():
    # ((1-p)/(q-1)) sup |x|^{p-q} over the ball: p=1/2, q=3/2 at xbar=1,
    # eps=1/2 gives (1/2)/(1/2) * (1/2)^{-1} = 2
    spec = PowerProxSpec(0.5, 2, 1.0)
    assert np.isclose(power_proxreg_modulus(spec, 1.0, 0.5), 2.0)


def test_proxreg_modulus_rejects_ball_containing_origin():
    spec = PowerProxSpec(0.5, 2, 1.0)
    with pytest.raises(DomainError):
        power_proxreg_modulus(spec, 0.3, 0.5)


@settings(max_examples=60, deadline=None)
@given(st.floats(min_value=0.2, max_value=0.9),
       st.sampled_from([2, 3, 4]),
       st.floats(min_value=0.1, max_value=2.0),
       st.floats(min_value=-10.0, max_value=10.0))
def test_power_prox_minimizers_are_stationary_or_zero(p, alpha, lam, y):
    spec = PowerProxSpec(p, alpha, lam)
    res = power_prox(spec, y)
    # x = 0 is always feasible: envelope <= D(0, y)/lam = (1 - 1/q)|y|^q/lam
    assert res.env_value <= (1.0 - 1.0 / spec.q) * abs(y) ** spec.q / lam + 1e-9
    for m in res.minimizers:
        x = float(m[0])
        assert abs(x) <= abs(y) + 1e-9
        if x != 0.0:
            # first-order condition sign(x)(|x|^{p-1} + |x|^{q-1}/lam) = c
            c = np.sign(y) * abs(y) ** (spec.q - 1.0) / lam
            g = np.sign(x) * (abs(x) ** (p - 1.0) + abs(x) ** (spec.q - 1.0) / lam)
            assert abs(g - c) <= 1e-5 * (1.0 + abs(c))
