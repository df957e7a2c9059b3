"""Polynomiality diagnostics for section curves.

The per-curve fit is a scikit-learn style estimator,
:class:`SectionPolynomialFit`, so it can be cloned, grid-searched over
``tol`` / ``max_degree`` and dropped into pipelines. The functional
wrappers below (:func:`fit_polynomial` etc.) are the stable entry points
used by the rest of the package.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from numpy.polynomial import Chebyshev, Polynomial
from scipy.spatial import cKDTree
from sklearn.base import BaseEstimator, RegressorMixin
from sklearn.utils.validation import check_array, check_consistent_length, check_is_fitted

from .exceptions import DegenerateInputError, HypothesisError, InputError
from .sections import section_curves
from .spherical import chebyshev_lobatto, sphere_area

POLYNOMIAL = "polynomial"
NON_POLYNOMIAL = "non_polynomial"
INCONCLUSIVE = "inconclusive"


@dataclass(frozen=True, eq=False)
class PolyFit:
    """Outcome of fitting one section curve."""

    degree: int
    coefficients: np.ndarray
    residual: float
    verdict: str
    chebyshev: Chebyshev = field(repr=False)
    residuals: np.ndarray = field(repr=False)
    scale: float = 1.0

    @property
    def is_polynomial(self):
        return self.verdict == POLYNOMIAL

    def to_dict(self, omega=None):
        out = {
            "degree": int(self.degree),
            "coefficients": [float(c) for c in self.coefficients],
            "residual": float(self.residual),
            "verdict": self.verdict,
        }
        if omega is not None:
            out = {"omega": [float(w) for w in omega], **out}
        return out


class SectionPolynomialFit(RegressorMixin, BaseEstimator):
    """Decide whether samples of ``t -> V(t)`` come from a polynomial.

    Least squares in the Chebyshev basis of the sample interval for every
    degree ``d = 0..max_degree``. The verdict is ``polynomial`` at the
    smallest ``d`` whose max residual is ``<= tol * max|V|`` and stays so for
    ``d + 1`` and ``d + 2``; ``non_polynomial`` if even ``max_degree`` leaves a
    residual above ``10 * tol * max|V|``; otherwise ``inconclusive``.

    Parameters
    ----------
    max_degree : int, default=12
    tol : float, default=1e-7
        Relative residual tolerance.
    noise_floor : float, default=0.0
        Known absolute error of the samples. A fit cannot be certified as
        polynomial below this level.

    Attributes
    ----------
    degree_ : int
    coef_ : ndarray
        Monomial coefficients ``a_0..a_degree`` in ``t``.
    chebyshev_ : numpy.polynomial.Chebyshev
    residual_ : float
    residuals_ : ndarray, shape (max_degree + 1,)
    verdict_ : str
    """

    def __init__(self, max_degree=12, tol=1e-7, noise_floor=0.0):
        self.max_degree = max_degree
        self.tol = tol
        self.noise_floor = noise_floor

    def fit(self, X, y):
        t = check_array(X, ensure_2d=False, dtype=float).reshape(-1)
        y = check_array(y, ensure_2d=False, dtype=float).reshape(-1)
        check_consistent_length(t, y)
        domain = (float(t.min()), float(t.max()))
        tau = (2.0 * t - domain[0] - domain[1]) / (domain[1] - domain[0])
        res = _batch_fit(tau, y[None, :], self.max_degree, self.tol, self.noise_floor)
        degree = int(res["degree"][0])
        cheb = Chebyshev(res["coef"][0, : degree + 1], domain=list(domain))
        self.degree_ = degree
        self.chebyshev_ = cheb
        self.coef_ = _monomial(cheb, degree)
        self.residuals_ = res["residuals"][0]
        self.residual_ = float(self.residuals_[degree])
        self.verdict_ = str(res["verdict"][0])
        self.scale_ = float(res["scale"][0])
        return self

    def predict(self, X):
        check_is_fitted(self, "chebyshev_")
        t = check_array(X, ensure_2d=False, dtype=float).reshape(-1)
        return self.chebyshev_(t)

    def to_polyfit(self):
        check_is_fitted(self, "chebyshev_")
        return PolyFit(self.degree_, self.coef_, self.residual_, self.verdict_,
                       self.chebyshev_, self.residuals_, self.scale_)


def _batch_fit(tau, Y, max_degree, tol, noise_floor):
    """Fit many curves sampled at the same normalised nodes ``tau``.

    ``Y`` is (K, m); ``noise_floor`` a scalar or (K,) array. Returns a dict of
    per-curve arrays: degree, verdict, residuals (K, max_degree + 1),
    coef (K, max_degree + 1) Chebyshev coefficients at the chosen degree, scale.
    """
    if tol <= 0:
        raise InputError("tol must be positive")
    K, m = Y.shape
    if m < max_degree + 8:
        raise InputError(f"need at least max_degree + 8 = {max_degree + 8} nodes, got {m}")
    vander = np.polynomial.chebyshev.chebvander(tau, max_degree)
    scale = np.max(np.abs(Y), axis=1)
    scale = np.where(scale > 0, scale, 1.0)
    thresh = tol * scale
    noise = np.broadcast_to(np.asarray(noise_floor, dtype=float), (K,))
    residuals = np.empty((K, max_degree + 1))
    coefs = []
    for d in range(max_degree + 1):
        c, *_ = np.linalg.lstsq(vander[:, : d + 1], Y.T, rcond=None)
        coefs.append(c.T)
        residuals[:, d] = np.max(np.abs(vander[:, : d + 1] @ c - Y.T), axis=0)

    ok = residuals <= thresh[:, None]
    # polynomial at d when residuals at d, d+1, d+2 (as far as computed) all pass
    window = np.ones_like(ok)
    for shift in range(3):
        window[:, : max_degree + 1 - shift] &= ok[:, shift:]
    found = window.any(axis=1)
    degree = np.where(found, np.argmax(window, axis=1), max_degree)
    verdict = np.where(
        found,
        np.where(noise <= thresh, POLYNOMIAL, INCONCLUSIVE),
        np.where(residuals[:, -1] > 10.0 * np.maximum(thresh, noise), NON_POLYNOMIAL, INCONCLUSIVE),
    )
    coef = np.zeros((K, max_degree + 1))
    for i in range(K):
        d = degree[i]
        coef[i, : d + 1] = coefs[d][i]
    return {"degree": degree, "verdict": verdict, "residuals": residuals, "coef": coef, "scale": scale}


def _monomial(cheb, degree):
    mono = cheb.convert(kind=Polynomial, domain=[-1.0, 1.0], window=[-1.0, 1.0]).coef
    return np.pad(mono, (0, max(degree + 1 - mono.size, 0)))[: degree + 1]


def default_max_degree(dim):
    return 2 * dim + 6


def fit_polynomial(curve, max_degree=None, tol=1e-7):
    """Fit a :class:`~polyint.sections.SectionCurve`; see :class:`SectionPolynomialFit`."""
    return fit_polynomials([curve], max_degree, tol)[0]


def _on_lobatto_nodes(curve, tau):
    expected = 0.5 * (curve.h_minus + curve.h_plus) + 0.5 * curve.width * tau
    return np.allclose(curve.nodes, expected, rtol=0, atol=1e-12 * max(1.0, curve.width))


def fit_polynomials(curves, max_degree=None, tol=1e-7):
    """Fit a batch of curves; curves on shared Chebyshev-Lobatto nodes are solved together.

    ``max_degree`` defaults to ``2n + 6``, capped at ``m - 8`` for ``m``-node curves.
    """
    curves = list(curves)
    if not curves:
        return []
    out = [None] * len(curves)
    groups = {}
    for i, c in enumerate(curves):
        groups.setdefault(c.nodes.size, []).append(i)
    for m, members in groups.items():
        # without an explicit cap, stay within what m nodes can certify
        cap = max_degree if max_degree is not None else min(default_max_degree(curves[0].dim), m - 8)
        tau = chebyshev_lobatto(-1.0, 1.0, m)
        batch = [i for i in members if _on_lobatto_nodes(curves[i], tau)]
        for i in set(members) - set(batch):
            c = curves[i]
            est = SectionPolynomialFit(cap, tol, float(np.max(c.est_error)))
            out[i] = est.fit(c.nodes, c.values).to_polyfit()
        if not batch:
            continue
        Y = np.array([curves[i].values for i in batch])
        noise = np.array([float(np.max(curves[i].est_error)) for i in batch])
        res = _batch_fit(tau, Y, cap, tol, noise)
        for j, i in enumerate(batch):
            c = curves[i]
            d = int(res["degree"][j])
            cheb = Chebyshev(res["coef"][j, : d + 1], domain=[c.h_minus, c.h_plus])
            out[i] = PolyFit(d, _monomial(cheb, d), float(res["residuals"][j, d]), str(res["verdict"][j]),
                             cheb, res["residuals"][j], float(res["scale"][j]))
    return out


def endpoint_exponent(curve, end="plus", window=1e-2, decades=2.0):
    """Order of the zero of ``V`` at a support endpoint.

    Slope of ``log V`` against ``log(distance to the endpoint)`` over nodes
    with distance in ``[window * width * 10**-decades, window * width]``.
    About ``(n - 1) / 2`` for smooth strictly convex bodies.
    """
    if end not in ("plus", "minus"):
        raise InputError("end must be 'plus' or 'minus'")
    width = curve.width
    anchor = curve.h_plus if end == "plus" else curve.h_minus
    dist = np.abs(anchor - curve.nodes)
    positive = dist[dist > 0]
    if positive.size == 0 or positive.min() > window * width * 10 ** -decades:
        raise InputError("curve not resolved near the endpoint; use more nodes (m >= 128)")
    sel = (dist >= window * width * 10 ** -decades * (1 - 1e-12)) & (dist <= window * width)
    if np.count_nonzero(sel) < 3:
        raise InputError("fewer than 3 nodes in the endpoint window; use more nodes")
    v = curve.values[sel]
    if np.any(v <= 0):
        raise DegenerateInputError("V is not positive inside the endpoint window")
    slope, _ = np.polyfit(np.log(dist[sel]), np.log(v), 1)
    return float(slope)


def endpoint_vanishing(fit, h_minus, h_plus, dim, rel_tol=1e-6):
    """Check that the fitted polynomial vanishes to order ``(n-1)/2`` at both ends.

    Returns the worst ``|P^(j)(h)| / max|V|`` over ``j < ceil((n-1)/2)`` and
    both endpoints, and whether it is within ``rel_tol``.
    """
    order = math.ceil((dim - 1) / 2)
    worst = 0.0
    poly = fit.chebyshev
    for j in range(order):
        dp = poly.deriv(j) if j else poly
        for h in (h_minus, h_plus):
            worst = max(worst, abs(float(dp(h))) / fit.scale)
    return worst, worst <= rel_tol


# -- coefficient fields ---------------------------------------------------


@dataclass(frozen=True, eq=False)
class CoefficientField:
    """Samples ``(omega_i, a_k(omega_i))`` of one polynomial coefficient."""

    k: int
    omegas: np.ndarray
    values: np.ndarray
    weights: np.ndarray = None
    flags: tuple = None

    def __post_init__(self):
        om = np.asarray(self.omegas, dtype=float)
        vals = np.asarray(self.values, dtype=float)
        if om.ndim != 2 or vals.shape != (om.shape[0],):
            raise InputError("field needs omegas (K, n) and values (K,)")
        object.__setattr__(self, "omegas", om)
        object.__setattr__(self, "values", vals)
        if self.weights is None:
            object.__setattr__(self, "weights", np.full(om.shape[0], sphere_area(om.shape[1]) / om.shape[0]))
        if self.flags is None:
            object.__setattr__(self, "flags", ("ok",) * om.shape[0])

    @property
    def dim(self):
        return self.omegas.shape[1]

    @property
    def valid(self):
        return NON_POLYNOMIAL not in self.flags

    def rows(self):
        for w, a, f in zip(self.omegas, self.values, self.flags):
            yield [self.k, *w.tolist(), float(a), f]


def field_from_fits(k, omegas, fits, weights=None):
    """``a_k(omega)`` from per-direction fits; see :func:`coefficient_field` for the flags."""
    if k < 0:
        raise InputError("k must be non-negative")
    values, flags = [], []
    for fit in fits:
        if fit.verdict != POLYNOMIAL:
            values.append(0.0)
            flags.append(fit.verdict)
        elif k > fit.degree:
            values.append(0.0)
            flags.append("above_degree")
        else:
            values.append(float(fit.coefficients[k]))
            flags.append("ok")
    return CoefficientField(k, np.asarray(omegas, dtype=float), np.array(values), weights, tuple(flags))


def coefficient_field(body, k, omegas, weights=None, m=32, max_degree=None, tol=1e-7, method="auto"):
    """``a_k(omega)`` from per-direction polynomial fits.

    Flags: ``ok``; ``above_degree`` (fit degree < k, so ``a_k = 0``);
    ``non_polynomial`` / ``inconclusive`` (``a_k`` recorded as 0). Any
    ``non_polynomial`` flag marks the field invalid.
    """
    if k < 0:
        raise InputError("k must be non-negative")
    curves = section_curves(body, omegas, m, method)
    return field_from_fits(k, omegas, fit_polynomials(curves, max_degree, tol), weights)


def antipode_index(omegas, tol=1e-9):
    """Index of ``-omega_i`` for every row; raises if any antipode is missing."""
    tree = cKDTree(omegas)
    dist, idx = tree.query(-omegas)
    if np.any(dist > tol):
        raise InputError(f"{int(np.sum(dist > tol))} directions have no antipode in the grid")
    return idx


@dataclass(frozen=True)
class ParityReport:
    k: int
    max_deviation: float
    tol: float
    n_pairs: int

    @property
    def passed(self):
        return self.max_deviation <= self.tol


def parity_check(field, tol=1e-9):
    """Max over antipodal pairs of ``|a_k(-omega) - (-1)^k a_k(omega)|``."""
    idx = antipode_index(field.omegas)
    sign = -1.0 if field.k % 2 else 1.0
    dev = np.abs(field.values[idx] - sign * field.values)
    return ParityReport(field.k, float(np.max(dev)) if dev.size else 0.0, tol, int(dev.size // 2))


def moment_orthogonality(field, p, degree):
    """Spherical quadrature of ``int a_k(omega) p(omega) dA(omega)``.

    For polynomially integrable bodies this vanishes whenever
    ``k > n - 1`` and ``deg p <= k - n + 1``; other ``(k, p)`` are rejected.

    Parameters
    ----------
    field : CoefficientField
    p : callable
        Maps an array of directions (K, n) to values (K,).
    degree : int
        Degree of ``p``.
    """
    n, k = field.dim, field.k
    if not k > n - 1:
        raise HypothesisError(f"need k > n - 1 (k = {k}, n - 1 = {n - 1})")
    if not degree <= k - n + 1:
        raise HypothesisError(f"need deg p <= k - n + 1 (deg p = {degree}, k - n + 1 = {k - n + 1})")
    pv = np.asarray(p(field.omegas), dtype=float).reshape(-1)
    return float(np.sum(field.weights * field.values * pv))
