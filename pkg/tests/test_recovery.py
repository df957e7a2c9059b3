import numpy as np
import pytest

from polyint import (EllipsoidRecovery, InputError, RecoveryError, make_ball, make_ellipsoid,
                     recover_ellipsoid, section_curves)
from polyint.recovery import MomentTriple, profile_integrals, width_from_moments
from polyint.spherical import direction_grid, fibonacci_sphere, random_rotation


def test_profile_constant_ratio():
    for n in (3, 5, 7):
        alpha, beta = profile_integrals(n)
        assert alpha / beta == pytest.approx(n + 2)


def test_width_from_ball_moments():
    # unit ball, n = 3: m0 = 4pi/3, m1 = 0, m2 = 4pi/15
    B, C = width_from_moments(MomentTriple(4 * np.pi / 3, 0.0, 4 * np.pi / 15), 3)
    assert B == pytest.approx(0.0) and C == pytest.approx(1.0)


def test_round_trip(ellipsoid123):
    om, _ = fibonacci_sphere(128)
    params, residual = recover_ellipsoid(ellipsoid123, om, m=16)
    assert np.allclose(params.center, ellipsoid123.center, atol=1e-9)
    assert np.allclose(params.semi_axes, [1.0, 2.0, 3.0], atol=1e-9)
    # axis columns agree up to sign
    overlap = np.abs(params.rotation.T @ ellipsoid123.rotation)
    assert np.allclose(overlap, np.eye(3), atol=1e-8)
    assert residual < 1e-9


def test_estimator_interface(ellipsoid123):
    om, _ = fibonacci_sphere(64)
    est = EllipsoidRecovery().fit(section_curves(ellipsoid123, om, 16))
    assert est.get_params()["tol"] == 1e-7
    assert np.allclose(est.predict(om[:5]), [ellipsoid123.center @ w + np.linalg.norm(
        ellipsoid123.semi_axes * (w @ ellipsoid123.rotation)) for w in om[:5]])
    rep = est.report()
    assert set(rep) >= {"center", "semi_axes", "rotation", "residual", "m0_spread"}


def test_ball_ties_give_identity_frame():
    om, _ = fibonacci_sphere(64)
    params, _ = recover_ellipsoid(make_ball(3, 2.0, [1.0, 0.0, 0.0]), om)
    assert np.allclose(params.rotation, np.eye(3))
    assert np.allclose(params.semi_axes, 2.0)


def test_five_dimensional_round_trip():
    rng = np.random.default_rng(1)
    body = make_ellipsoid([0.7, 1.0, 1.3, 1.6, 2.0], rng.uniform(-1, 1, 5), random_rotation(5, rng))
    om, _ = direction_grid(5, 64, seed=2)
    params, _ = recover_ellipsoid(body, om, m=16)
    assert np.allclose(params.semi_axes, [0.7, 1.0, 1.3, 1.6, 2.0], atol=1e-8)
    assert np.allclose(params.center, body.center, atol=1e-9)


def test_superellipsoid_rejected_at_degree_gate(superball4):
    om, _ = fibonacci_sphere(32)
    with pytest.raises(RecoveryError, match="degree gate"):
        recover_ellipsoid(superball4, om)


def test_even_dimension_rejected():
    om, _ = direction_grid(2, 16)
    with pytest.raises(RecoveryError, match="even"):
        recover_ellipsoid(make_ball(2), om)


def test_too_few_directions(ellipsoid123):
    om, _ = fibonacci_sphere(6)
    with pytest.raises(InputError):
        EllipsoidRecovery().fit(section_curves(ellipsoid123, om, 16))
