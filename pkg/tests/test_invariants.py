"""Property tests for the structural identities the library relies on."""

import math
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import HealthCheck, given, settings
from hypothesis import strategies as st

from polyint import (SectionPolynomialFit, dilate, ellipsoid_closed_form, eval_expansion, inverse_expansion,
                     make_ellipsoid, make_superellipsoid, omega_area, phase_expansion, recover_ellipsoid,
                     section_curve, section_volume, support, transform)
from polyint.polyfit import POLYNOMIAL
from polyint.spherical import fibonacci_sphere, random_rotation

SETTINGS = settings(max_examples=25, deadline=None, suppress_health_check=[HealthCheck.too_slow])

seeds = st.integers(0, 2 ** 32 - 1)


def random_body(seed, kind="ellipsoid"):
    rng = np.random.default_rng(seed)
    axes = rng.uniform(0.5, 3.0, 3)
    center = rng.uniform(-1.0, 1.0, 3)
    R = random_rotation(3, rng)
    if kind == "ellipsoid":
        return make_ellipsoid(axes, center, R), rng
    return make_superellipsoid(axes, float(rng.uniform(1.5, 6.0)), center, R), rng


def random_unit(rng, n=3):
    v = rng.standard_normal(n)
    return v / np.linalg.norm(v)


@SETTINGS
@given(seeds, st.sampled_from(["ellipsoid", "superellipsoid"]))
def test_antipodal_support_relation(seed, kind):
    body, rng = random_body(seed, kind)
    w = random_unit(rng)
    hm, hp = support(body, w)
    hm2, hp2 = support(body, -w)
    assert hm == pytest.approx(-hp2, abs=1e-12)
    assert hp == pytest.approx(-hm2, abs=1e-12)
    assert hm < hp


@SETTINGS
@given(seeds)
def test_support_translation_covariance(seed):
    body, rng = random_body(seed, "superellipsoid")
    a = rng.uniform(-2, 2, 3)
    w = random_unit(rng)
    shifted = np.array(support(transform(body, translation=a), w))
    assert np.allclose(shifted - np.array(support(body, w)), a @ w, atol=1e-12)


@SETTINGS
@given(seeds, st.floats(0.02, 0.98))
def test_section_parity(seed, frac):
    body, rng = random_body(seed, "superellipsoid")
    w = random_unit(rng)
    hm, hp = support(body, w)
    t = hm + frac * (hp - hm)
    a = section_volume(body, w, t)
    b = section_volume(body, -w, -t)
    assert a == pytest.approx(b, rel=1e-9)


@SETTINGS
@given(seeds)
def test_cavalieri_constancy(seed):
    body, rng = random_body(seed)
    for _ in range(3):
        c = section_curve(body, random_unit(rng), 16)
        assert c.integrate(0) == pytest.approx(body.volume(), rel=1e-12)


@SETTINGS
@given(seeds)
def test_quadrature_tracks_closed_form(seed):
    body, rng = random_body(seed)
    w = random_unit(rng)
    hm, hp = support(body, w)
    t = hm + rng.uniform(0.05, 0.95) * (hp - hm)
    assert section_volume(body, w, t, method="quadrature") == pytest.approx(
        ellipsoid_closed_form(body, w, t), rel=1e-8)


@SETTINGS
@given(st.lists(st.fractions(min_value=-5, max_value=5, max_denominator=50), min_size=1, max_size=8),
       st.fractions(min_value=-3, max_value=3, max_denominator=20),
       st.fractions(min_value=Fraction(1, 10), max_value=4, max_denominator=20))
def test_expansion_round_trip(coeffs, a, width):
    coeffs = list(coeffs)
    while len(coeffs) > 1 and coeffs[-1] == 0:
        coeffs.pop()
    pw = inverse_expansion(phase_expansion(coeffs, a, a + width))
    assert list(pw.coefficients) == coeffs


@SETTINGS
@given(st.lists(st.floats(-3, 3), min_size=1, max_size=6), st.floats(0.2, 30.0))
def test_expansion_evaluates_the_integral(coeffs, r):
    e = phase_expansion(coeffs, -1.0, 0.5)
    xg, wg = np.polynomial.legendre.leggauss(64)
    t = -0.25 + 0.75 * xg
    ref = 0.75 * np.sum(wg * np.exp(1j * r * t) * np.polynomial.polynomial.polyval(t, coeffs))
    assert abs(eval_expansion(e, r) - ref) < 1e-10 * (1 + np.sum(np.abs(coeffs)))


@SETTINGS
@given(st.lists(st.floats(-2, 2).filter(lambda v: abs(v) > 0.05), min_size=1, max_size=7),
       st.floats(-2, 2), st.floats(0.1, 3))
def test_fit_finds_polynomial_degree(coeffs, a, width):
    t = a + width * 0.5 * (1 - np.cos(np.pi * np.arange(40) / 39))
    y = np.polynomial.polynomial.polyval(t, coeffs)
    est = SectionPolynomialFit(max_degree=12, tol=1e-9).fit(t, y)
    assert est.verdict_ == POLYNOMIAL
    assert est.degree_ <= len(coeffs) - 1


@settings(max_examples=8, deadline=None)
@given(seeds, st.floats(0.3, 3.0))
def test_recovery_scaling_covariance(seed, s):
    body, _ = random_body(seed)
    om, _ = fibonacci_sphere(64)
    p0, _ = recover_ellipsoid(body, om, m=16)
    p1, _ = recover_ellipsoid(dilate(body, s), om, m=16)
    assert np.allclose(p1.semi_axes, s * p0.semi_axes, rtol=1e-8)
    assert np.allclose(p1.center, s * p0.center, atol=1e-8)


@SETTINGS
@given(st.floats(0.1, 100.0), st.floats(0.1, 10.0), st.floats(0.2, 5.0))
def test_quadratic_profile_area_homogeneity(alpha, s, b2):
    area = omega_area([1.0, -b2], alpha)
    assert area == pytest.approx(math.pi * alpha ** 2 / math.sqrt(b2), rel=1e-9)
    assert omega_area([1.0, -b2], s * alpha) == pytest.approx(s * s * area, rel=1e-9)
