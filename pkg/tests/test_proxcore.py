import numpy as np
import pytest

from bregprox.errors import CrossCheckFailure, DomainError, NotProxBounded
from bregprox.kernels import make_kernel
from bregprox.objectives import (box_indicator, neg_quadratic, power_lp,
                                 scaled_abs, segment_indicator, zero_objective)
from bregprox.proxcore import (ProxQuery, SearchConfig, left_envelope,
                               prox_bounded_estimate, right_envelope,
                               tilt_identity_check, tilt_transform_point)

EUCLID = make_kernel("half_squared_norm")
SEARCH = SearchConfig(box=[(-8.0, 8.0)], resolution=1e-3)


def lprox(f, kernel, lam, y, search=SEARCH):
    return left_envelope(ProxQuery(f, kernel, lam, y, side="left"), search)


def test_classical_soft_threshold():
    # prox of c|x| with the Euclidean kernel is the soft-threshold map
    f = scaled_abs(0.7)
    for y in (-3.0, -0.5, 0.2, 2.4):
        res = lprox(f, EUCLID, 1.0, np.array([y]))
        expected = np.sign(y) * max(abs(y) - 0.7, 0.0)
        assert not res.multivalued
        assert np.isclose(res.point[0], expected, atol=1e-7)
        assert np.isclose(res.env_value,
                          0.7 * abs(expected) + 0.5 * (y - expected) ** 2,
                          atol=1e-9)


def test_classical_projection_clips_to_box():
    f = box_indicator(np.array([-1.0]), np.array([2.0]))
    for y in (-4.0, 0.3, 5.0):
        res = lprox(f, EUCLID, 0.7, np.array([y]))
        assert np.isclose(res.point[0], np.clip(y, -1.0, 2.0), atol=1e-7)


def test_multivalued_prox_of_negative_absolute_value():
    # argmin -|x| + x^2/(2 lam) at y = 0 is {-lam, +lam}
    lam = 0.8

    from dataclasses import replace
    neg_abs = replace(scaled_abs(1.0), name="neg_abs",
                      value=lambda x: -abs(float(np.atleast_1d(x)[0])),
                      value_batch=lambda X: -np.abs(np.asarray(X)[:, 0]),
                      subgrad=None, subgrad_dist=None, prox_classical=None)
    res = lprox(neg_abs, EUCLID, lam, np.array([0.0]))
    assert res.multivalued
    pts = sorted(float(m[0]) for m in res.minimizers)
    assert np.allclose(pts, [-lam, lam], atol=1e-6)
    assert np.isclose(res.env_value, -lam / 2.0, atol=1e-9)


def test_cusp_at_origin_is_found():
    # global minimizer sits exactly on the |x|^p cusp; a pure grid+golden
    # search would stop O(res^p) above it
    p = 0.5148958227307991
    f = power_lp(p)
    k = make_kernel("power", q=2.0 - p)
    y = 7.735143930460765
    res = lprox(f, k, 1.3977897164649673, np.array([y]),
                SearchConfig(box=[(-abs(y) - 1, abs(y) + 1)], resolution=1e-3))
    assert not res.multivalued
    assert res.point[0] == 0.0


def test_not_prox_bounded_raises():
    f = neg_quadratic(a=0.5)  # -x^2/2, unbounded against x^2/2 when lam > 1
    with pytest.raises(NotProxBounded):
        lprox(f, EUCLID, 2.0, np.array([0.0]),
              SearchConfig(box=[(-50.0, 50.0)], resolution=1e-2, floor=-100.0))


def test_base_point_must_be_interior():
    with pytest.raises(DomainError):
        lprox(zero_objective(), make_kernel("burg"), 1.0, np.array([0.0]),
              SearchConfig(box=[(0.1, 5.0)], resolution=1e-3))


def test_curve_search_projects_onto_segment():
    f = segment_indicator(np.array([0.0, 0.0]), np.array([2.0, 2.0]))
    k = make_kernel("half_squared_norm", dim=2)
    res = left_envelope(
        ProxQuery(f, k, 1.0, np.array([2.0, 0.0]), side="left"),
        SearchConfig(box=[(0.0, 1.0)], resolution=1e-3))
    assert np.allclose(res.point, [1.0, 1.0], atol=1e-6)


def test_right_envelope_matches_left_for_euclidean_kernel():
    # the Euclidean divergence is symmetric, so both sides agree
    f = scaled_abs(0.5)
    y = np.array([1.7])
    left = lprox(f, EUCLID, 1.0, y)
    right = right_envelope(ProxQuery(f, EUCLID, 1.0, y, side="right"), SEARCH)
    assert np.isclose(left.env_value, right.env_value, atol=1e-8)
    assert np.allclose(left.point, right.point, atol=1e-6)


def test_right_envelope_requires_full_domain():
    with pytest.raises(DomainError):
        right_envelope(ProxQuery(zero_objective(), make_kernel("burg"), 1.0,
                                 np.array([1.0]), side="right"),
                       SearchConfig(box=[(0.1, 5.0)], resolution=1e-3))


def test_right_envelope_cross_check_paths_agree():
    f = power_lp(0.5)
    k = make_kernel("power", q=1.5)
    for y in (0.6, 2.3, -4.1):
        res = right_envelope(ProxQuery(f, k, 0.8, np.array([y]), side="right"),
                             SEARCH)
        assert np.isclose(res.env_value, res.diagnostics["translated_env"],
                          atol=1e-6)


def test_tilt_transform_point_euclidean():
    v = np.array([0.4])
    y = np.array([1.0])
    z = tilt_transform_point(EUCLID, y, v, 2.0)
    assert np.allclose(z, y + 2.0 * v)


@pytest.mark.parametrize("kind,q,y,v", [
    ("half_squared_norm", None, 0.7, -0.3),
    ("power", 1.5, 1.2, 0.25),
    ("boltzmann_shannon", None, 1.5, 0.2),
])
def test_tilt_equals_translation(kind, q, y, v):
    k = make_kernel(kind, q=q)
    f = scaled_abs(0.5)
    lo, hi = k.components[0].sample_interval
    search = SearchConfig(box=[(max(-8.0, lo), min(8.0, hi))], resolution=1e-3)
    assert tilt_identity_check(f, k, np.array([y]), np.array([v]), 0.9,
                               tol=1e-6, search=search)


def test_prox_bounded_estimate_threshold():
    # f = -x^2/2 against phi = x^2/2: envelope finite exactly for lam < 1
    f = neg_quadratic(a=0.5)
    report = prox_bounded_estimate(f, EUCLID, [0.25, 0.5, 0.9, 1.5, 4.0],
                                   probe=np.array([0.0]))
    assert 0.9 <= report["lambda_hat"] < 1.5
    assert np.isclose(report["liminf_ratio"], -1.0, atol=1e-6)


def test_prox_bounded_estimate_nonnegative_objective():
    report = prox_bounded_estimate(power_lp(0.5), EUCLID, [0.5, 2.0, 8.0],
                                   probe=np.array([0.0]))
    assert report["lambda_hat"] == np.inf
