"""Reconstruct an ellipsoid from section curves of degree at most n - 1.

Along each direction the first three t-moments of ``V`` give the center
function ``B(omega)`` and half-width ``C(omega)``. If ``V`` has the form
``A(omega) [(h+ - t)(t - h-)]^{(n-1)/2}`` (forced by degree <= n - 1), then
with ``t = B + C u``

    m1 / m0 = B,        m2 / m0 = B^2 + C^2 * beta / alpha,

where ``alpha = int (1-u^2)^{(n-1)/2} du`` and ``beta = int u^2 (1-u^2)^{(n-1)/2} du``.
``C^2`` is then fitted by a quadratic form and ``B`` by a linear form over
the whole grid; the residual of those fits certifies the result.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.special import beta as beta_fn
from sklearn.base import BaseEstimator
from sklearn.utils.validation import check_is_fitted

from .bodies import EllipsoidParams
from .exceptions import DegenerateInputError, InputError, RecoveryError
from .polyfit import POLYNOMIAL, fit_polynomials
from .sections import section_curves


@dataclass(frozen=True)
class MomentTriple:
    """``m_k = int t^k V(omega, t) dt`` for k = 0, 1, 2."""

    m0: float
    m1: float
    m2: float


def moments_from_curve(curve):
    """Clenshaw-Curtis moments of a curve sampled at Chebyshev-Lobatto nodes."""
    return MomentTriple(curve.integrate(0), curve.integrate(1), curve.integrate(2))


def profile_integrals(n):
    """``(alpha, beta)`` for the profile ``(1 - u^2)^{(n-1)/2}`` on [-1, 1]."""
    a = 0.5 * (n - 1)
    return float(beta_fn(0.5, a + 1.0)), float(beta_fn(1.5, a + 1.0))


def width_from_moments(m, n):
    """Center ``B`` and half-width ``C`` from one direction's moments."""
    if m.m0 <= 0:
        raise DegenerateInputError("m0 must be positive")
    alpha, beta = profile_integrals(n)
    B = m.m1 / m.m0
    spread = m.m2 / m.m0 - B * B
    if spread <= 0:
        raise DegenerateInputError("non-positive second central moment: degenerate body")
    return B, float(np.sqrt(alpha / beta * spread))


def _quadratic_features(omegas):
    n = omegas.shape[1]
    iu = np.triu_indices(n)
    scale = np.where(iu[0] == iu[1], 1.0, 2.0)
    return omegas[:, iu[0]] * omegas[:, iu[1]] * scale, iu


class EllipsoidRecovery(BaseEstimator):
    """Estimate ellipsoid parameters from a family of section curves.

    Parameters
    ----------
    tol : float, default=1e-7
        Relative tolerance of the per-direction polynomial fits.
    residual_tol : float, default=1e-6
        Acceptance threshold for the quadratic/linear form residual,
        relative to ``max C(omega)^2``.
    m0_tol : float, default=1e-6
        Allowed relative spread of ``m0`` (the volume) across directions.
    tie_tol : float, default=1e-8
        Eigenvalue gaps below this (relative) count as ties; if every gap
        is a tie the frame is fixed to the identity.

    Attributes
    ----------
    center_, semi_axes_, rotation_ : ndarray
    quadratic_form_ : ndarray, shape (n, n)
    residual_ : float
    m0_spread_ : float
    volume_ : float
    params_ : EllipsoidParams
    """

    def __init__(self, tol=1e-7, residual_tol=1e-6, m0_tol=1e-6, tie_tol=1e-8):
        self.tol = tol
        self.residual_tol = residual_tol
        self.m0_tol = m0_tol
        self.tie_tol = tie_tol

    def fit(self, curves, y=None):
        curves = list(curves)
        if not curves:
            raise InputError("no curves given")
        n = curves[0].dim
        if n % 2 == 0:
            raise RecoveryError(f"n = {n} is even: no polynomially integrable bodies exist")
        omegas = np.array([c.omega for c in curves])
        if len(curves) < n * (n + 1) // 2 + n:
            raise InputError("too few directions to determine the quadratic and linear forms")

        # degree gate: every curve must be a polynomial of degree <= n - 1
        max_degree = n + 1
        for start in range(0, len(curves), 64):
            chunk = curves[start:start + 64]
            for c, fit in zip(chunk, fit_polynomials(chunk, max_degree, self.tol)):
                if fit.verdict != POLYNOMIAL or fit.degree > n - 1:
                    raise RecoveryError(
                        f"degree gate: direction {np.round(c.omega, 6).tolist()} gives a "
                        f"{fit.verdict} fit of degree {fit.degree} (need polynomial, degree <= {n - 1})",
                        residual=fit.residual)

        moments = [moments_from_curve(c) for c in curves]
        m0 = np.array([m.m0 for m in moments])
        BC = np.array([width_from_moments(m, n) for m in moments])
        B, C = BC[:, 0], BC[:, 1]
        m0_spread = float((m0.max() - m0.min()) / m0.mean())

        X, iu = _quadratic_features(omegas)
        q, *_ = np.linalg.lstsq(X, C ** 2, rcond=None)
        Q = np.zeros((n, n))
        Q[iu] = q
        Q = Q + Q.T - np.diag(np.diag(Q))
        b, *_ = np.linalg.lstsq(omegas, B, rcond=None)
        residual = float(np.max(np.abs(C ** 2 - X @ q) + np.abs(B - omegas @ b)))

        self.quadratic_form_ = Q
        self.residual_ = residual
        self.m0_spread_ = m0_spread
        self.volume_ = float(m0.mean())
        self.n_directions_ = len(curves)

        if m0_spread > self.m0_tol:
            raise RecoveryError(f"m0 varies across directions (relative spread {m0_spread:.3g})",
                                residual=residual)
        scale = float(np.max(C ** 2))
        if residual > self.residual_tol * scale:
            raise RecoveryError(f"C^2 / B are not quadratic / linear forms (residual {residual:.3g})",
                                residual=residual)
        evals, evecs = np.linalg.eigh(Q)
        if evals[0] <= 0:
            raise RecoveryError("fitted quadratic form is not positive definite: not an ellipsoid",
                                residual=residual)
        gaps = np.diff(evals) / evals[-1]
        if evals.size > 1 and np.all(gaps < self.tie_tol):
            evecs = np.eye(n)
        elif np.linalg.det(evecs) < 0:
            evecs[:, 0] = -evecs[:, 0]

        self.center_ = b
        self.semi_axes_ = np.sqrt(evals)
        self.rotation_ = evecs
        self.params_ = EllipsoidParams(self.semi_axes_, self.center_, self.rotation_)
        return self

    def predict(self, omegas):
        """Upper support value ``h+(omega)`` of the recovered ellipsoid."""
        check_is_fitted(self, "params_")
        omegas = np.atleast_2d(np.asarray(omegas, dtype=float))
        return self.params_.support(omegas)

    def report(self):
        check_is_fitted(self, "params_")
        return {**self.params_.to_dict(), "residual": self.residual_, "m0_spread": self.m0_spread_}


def recover_ellipsoid(source, omegas=None, m=16, tol=1e-7, workers=1, **kw):
    """Recover :class:`EllipsoidParams` from a body or from a curve family.

    Returns ``(params, residual)``; raises :class:`RecoveryError` when the
    input is rejected (degree gate, non-constant volume, poor form fit or
    an indefinite quadratic form).
    """
    if hasattr(source, "kind"):
        if omegas is None:
            raise InputError("a direction grid is required when recovering from a body")
        if source.dim % 2 == 0:
            raise RecoveryError(f"n = {source.dim} is even: no polynomially integrable bodies exist")
        curves = section_curves(source, omegas, m, workers=workers)
    else:
        curves = list(source)
    est = EllipsoidRecovery(tol=tol, **kw).fit(curves)
    return est.params_, est.residual_
