"""Bodies of revolution ``x^2 + y^2 <= P(z)`` and the area growth of their slices.

A plane ``y = t`` through such a body cuts the planar domain

    Omega(alpha) = {(x, z) : x^2 - (b2 z^2 + ... + b2N z^2N) <= alpha^2},

with ``alpha^2 = b0 - t^2``. Its area grows like ``alpha^(1 + 1/N)``; a
polynomial area function needs an integer exponent, hence ``N = 1``.
"""

from __future__ import annotations

import math

import numpy as np
from numpy.polynomial import polynomial as npoly
from scipy.integrate import quad
from scipy.special import beta as beta_fn

from .bodies import RevolutionProfile, section_axis
from .exceptions import ConstructionError, InputError
from .polyfit import POLYNOMIAL, fit_polynomial
from .sections import section_curve, section_volume
from .spherical import orthonormal_complement

INTEGRALITY_TOL = 0.05
CONSISTENT = "consistent with polynomial integrability"
INCONSISTENT = "inconsistent with polynomial integrability"


def _as_profile(profile):
    if isinstance(profile, RevolutionProfile):
        return profile
    return RevolutionProfile(tuple(profile))


def _z_part(profile):
    """Monomial coefficients of ``b2 z^2 + ... + b2N z^2N``."""
    c = profile.power_coeffs.copy()
    c[0] = 0.0
    return c


def _positive_intervals(g):
    """Intervals where the even polynomial ``g`` is positive, bracketed by real roots."""
    roots = npoly.polyroots(g)
    real = np.sort(roots[np.abs(roots.imag) < 1e-9 * (1.0 + np.abs(roots.real))].real)
    real = np.unique(np.round(real, 14))
    out = []
    for a, b in zip(real[:-1], real[1:]):
        if npoly.polyval(0.5 * (a + b), g) > 0:
            out.append((float(a), float(b)))
    return out


def omega_area(profile, alpha, rel_tol=1e-10):
    """Area of ``Omega(alpha)``: integral of the chord ``2 sqrt(alpha^2 + b2 z^2 + ...)``.

    Each positivity interval ``[z1, z2]`` is integrated with the
    algebraic weight ``sqrt((z - z1)(z2 - z))`` split off, so the remaining
    integrand is smooth and the adaptive rule converges fast.
    """
    profile = _as_profile(profile)
    alpha = float(alpha)
    if not alpha > 0:
        raise InputError("alpha must be positive")
    g = _z_part(profile)
    g[0] = alpha * alpha
    total = 0.0
    for z1, z2 in _positive_intervals(g):
        h, rem = npoly.polydiv(g, np.array([-z1 * z2, z1 + z2, -1.0]))
        val, _ = quad(lambda z: math.sqrt(max(npoly.polyval(z, h), 0.0)), z1, z2,
                      weight="alg", wvar=(0.5, 0.5), epsabs=0.0, epsrel=rel_tol, limit=200)
        total += 2.0 * val
    return total


def limit_constant(profile):
    """``lim area(alpha) / alpha^(1 + 1/N)``: area of ``{u^2 - b2N v^2N <= 1}``.

    Equals ``2 / (N c) * B(1/(2N), 3/2)`` with ``c = (-b2N)^(1/(2N))``.
    """
    profile = _as_profile(profile)
    N = profile.N
    c = (-profile.coeffs[-1]) ** (1.0 / (2 * N))
    return float(2.0 / (N * c) * beta_fn(1.0 / (2 * N), 1.5))


def growth_exponent(profile, alpha_min, alpha_max, samples=32):
    """Log-log slope of ``area(alpha)`` over the top decade of ``[alpha_min, alpha_max]``."""
    alpha_min, alpha_max = float(alpha_min), float(alpha_max)
    if not 0 < alpha_min < alpha_max:
        raise InputError("need 0 < alpha_min < alpha_max")
    if alpha_max / alpha_min < 1e3:
        raise InputError("alpha range must span at least three decades")
    if samples < 4:
        raise InputError("need at least 4 samples")
    alphas = np.geomspace(alpha_max / 10.0, alpha_max, int(samples))
    areas = np.array([omega_area(profile, a) for a in alphas])
    return float(np.polyfit(np.log(alphas), np.log(areas), 1)[0])


def axial_verdict(body, alpha_range=(1.0, 1e3), samples=32, m=32, tol=1e-7):
    """Decide whether a centrally symmetric body of revolution can have polynomial sections.

    Reports the growth exponent of the slice family, the ``N`` it implies,
    polynomial fits of the axial and transverse section curves, and, when
    consistent, the ellipsoid the body must be.
    """
    if getattr(body, "kind", None) != "revolution":
        raise ConstructionError("axial_verdict needs a body of revolution")
    profile = body.profile
    xi = section_axis(body)
    eta = orthonormal_complement(xi)[:, 0]

    # the axial slice is pi P(t) by construction; check it against quadrature
    z0 = profile.half_length
    ts = float(xi @ body.center) + np.linspace(-0.95, 0.95, 20) * z0
    quad_vals = section_volume(body, xi, ts, method="quadrature")
    slice_dev = float(np.max(np.abs(quad_vals - math.pi * profile(ts - xi @ body.center))))

    # transverse slices equal the Omega family: V(eta, t) = area(sqrt(b0 - t^2))
    b0 = profile.coeffs[0]
    t_eta = float(eta @ body.center) + np.array([0.0, 0.3, 0.6]) * math.sqrt(b0)
    omega_dev = max(abs(float(section_volume(body, eta, t)) -
                        omega_area(profile, math.sqrt(b0 - (t - eta @ body.center) ** 2)))
                    for t in t_eta)

    axial_fit = fit_polynomial(section_curve(body, xi, m), 2 * profile.N + 4, tol)
    trans_fit = fit_polynomial(section_curve(body, eta, m), 2 * profile.N + 4, tol)

    exponent = growth_exponent(profile, *alpha_range, samples=samples)
    N_fit = int(round(1.0 / (exponent - 1.0))) if exponent > 1.0 else None
    consistent = abs(exponent - round(exponent)) <= INTEGRALITY_TOL and N_fit == 1
    report = {
        "exponent": exponent,
        "N_fit": N_fit,
        "N": profile.N,
        "verdict": CONSISTENT if consistent else INCONSISTENT,
        "limit_constant": limit_constant(profile),
        "axial_fit": {"verdict": axial_fit.verdict, "degree": axial_fit.degree},
        "transverse_fit": {"verdict": trans_fit.verdict, "degree": trans_fit.degree},
        "axial_slice_deviation": slice_dev,
        "omega_slice_deviation": float(omega_dev),
        "convex": profile.is_convex(),
    }
    if consistent:
        b2 = profile.coeffs[1]
        report["ellipsoid_semi_axes"] = [math.sqrt(b0), math.sqrt(b0), math.sqrt(-b0 / b2)]
        report["transverse_polynomial"] = trans_fit.verdict == POLYNOMIAL
    return report
