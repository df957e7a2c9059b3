"""Section volumes ``V_D(omega, t)``, their Fourier transforms and the
odd-dimensional back-projection.

Section quadrature, by dimension:

* n = 2: chord length, two bisection rays from an interior point;
* n = 3: polar ray casting inside the section plane (512 rays, bisection
  to the boundary) with a Richardson-extrapolated polygon area;
* n >= 4: randomised quasi-Monte Carlo over the section's directions,
  ``vol = kappa_{n-1} * mean(rho^{n-1})``.

Balls and ellipsoids also have the closed form
``kappa_{n-1} (b_1...b_n / h^n) (h^2 - t^2)^{(n-1)/2}``.
"""

from __future__ import annotations

import csv
import io
import math
import warnings
from dataclasses import dataclass
from functools import cached_property

import numpy as np
from numpy.polynomial import chebyshev as cheb
from scipy.stats import norm, qmc

from ._validation import check_unit_vector
from .bodies import ConvexBody, EllipsoidParams, boundary_patch, support, support_points
from .exceptions import AccuracyWarning, DomainError, InputError
from .spherical import (chebyshev_lobatto, clenshaw_curtis_weights, orthonormal_complement,
                        unit_ball_volume)

N_RAYS = 512
BISECT_ITERS = 64
# c_3 in chi(x) = c_3 * int_{S^2} d^2/dt^2 V(omega, <omega, x>) d omega
INVERSION_CONSTANT_3D = -1.0 / (8.0 * math.pi ** 2)


@dataclass(frozen=True, eq=False)
class SectionCurve:
    """Samples of ``t -> V_D(omega, t)`` at Chebyshev-Lobatto nodes of ``[h_minus, h_plus]``."""

    omega: np.ndarray
    h_minus: float
    h_plus: float
    nodes: np.ndarray
    values: np.ndarray
    source: str
    est_error: np.ndarray

    @property
    def dim(self):
        return self.omega.shape[0]

    @property
    def width(self):
        return self.h_plus - self.h_minus

    @cached_property
    def _cheb_coef(self):
        return cheb.Chebyshev.fit(self.nodes, self.values, self.nodes.size - 1,
                                  domain=[self.h_minus, self.h_plus]).coef

    def chebyshev(self):
        """Interpolating Chebyshev series on ``[h_minus, h_plus]``."""
        return cheb.Chebyshev(self._cheb_coef.copy(), domain=[self.h_minus, self.h_plus])

    def __call__(self, t):
        """Interpolated ``V`` with zero extension outside the support."""
        t = np.asarray(t, dtype=float)
        inside = (t >= self.h_minus) & (t <= self.h_plus)
        return np.where(inside, self.chebyshev()(np.clip(t, self.h_minus, self.h_plus)), 0.0)

    def integrate(self, k=0):
        """Clenshaw-Curtis integral of ``t^k V(t)`` over the support."""
        w = clenshaw_curtis_weights(self.h_minus, self.h_plus, self.nodes.size)
        return float(np.sum(w * self.nodes ** k * self.values))


# -- closed forms -------------------------------------------------------------


def ellipsoid_closed_form(E, omega, t):
    """Section volume of an ellipsoid, vectorised over ``t``.

    ``t`` is the absolute offset; the center's projection is subtracted here.
    Returns 0 outside the support interval.
    """
    if isinstance(E, ConvexBody):
        if not E.has_closed_form:
            raise InputError(f"no closed form for kind {E.kind!r}")
        E = EllipsoidParams(E.semi_axes, E.center, E.rotation)
    w = check_unit_vector(omega, E.dim)
    n = E.dim
    h = float(E.support_width(w))
    s = np.asarray(t, dtype=float) - float(w @ E.center)
    const = unit_ball_volume(n - 1) * float(np.prod(E.semi_axes)) / h ** n
    inside = np.abs(s) <= h
    base = np.where(inside, h * h - s * s, 0.0)
    out = const * np.maximum(base, 0.0) ** (0.5 * (n - 1))
    return float(out) if out.ndim == 0 else out


def _closed_form_values(body, w, ts):
    if body.has_closed_form:
        return ellipsoid_closed_form(body, w, ts)
    if body.kind == "revolution":
        v = w @ body.rotation
        if abs(abs(v[2]) - 1.0) < 1e-14:
            z = np.asarray(ts, dtype=float) - float(w @ body.center)
            z0 = body.profile.half_length
            return np.where(np.abs(z) <= z0, math.pi * np.maximum(body.profile(z), 0.0), 0.0)
    return None


# -- quadrature -------------------------------------------------------------


def _ray_lengths(body, origins, dirs):
    """Distance from each origin to the boundary along each direction.

    ``origins`` (K, n) world points inside the body, ``dirs`` (M, n) unit
    vectors. Vectorised bisection, returns (K, M).
    """
    y0 = body.to_canonical(origins)[:, None, :]
    dy = (dirs @ body.rotation)[None, :, :]
    reach = 2.0 * body.bounding_radius + np.linalg.norm(y0, axis=-1)
    lo = np.zeros((origins.shape[0], dirs.shape[0]))
    hi = np.broadcast_to(reach, lo.shape).copy()
    for _ in range(BISECT_ITERS):
        mid = 0.5 * (lo + hi)
        inside = body.level(y0 + mid[..., None] * dy) <= 0.0
        lo = np.where(inside, mid, lo)
        hi = np.where(inside, hi, mid)
    return 0.5 * (lo + hi)


def _interior_points(body, w, ts):
    h_minus, h_plus = support(body, w)
    x_minus, x_plus = support_points(body, w)
    lam = (np.asarray(ts, dtype=float) - h_minus) / (h_plus - h_minus)
    return x_minus + lam[:, None] * (x_plus - x_minus)


def _polygon_areas(rho):
    """Richardson-extrapolated polar polygon areas for rays on equal angles.

    ``rho`` (K, M) with M divisible by 4. The inscribed polygon area has an
    error expansion in even powers of the angular step.
    """
    def area(r):
        m = r.shape[1]
        return 0.5 * math.sin(2.0 * math.pi / m) * np.sum(r * np.roll(r, -1, axis=1), axis=1)

    a1, a2, a4 = area(rho), area(rho[:, ::2]), area(rho[:, ::4])
    r1 = (4.0 * a1 - a2) / 3.0
    r2 = (4.0 * a2 - a4) / 3.0
    best = (16.0 * r1 - r2) / 15.0
    return best, np.abs(best - r1)


def _quadrature_values(body, w, ts, n_rays=N_RAYS, n_samples=2 ** 12, seed=0):
    """Section volumes and error estimates at offsets ``ts`` strictly inside the support."""
    ts = np.asarray(ts, dtype=float)
    n = body.dim
    if ts.size == 0:
        return np.zeros(0), np.zeros(0)
    origins = _interior_points(body, w, ts)
    U = orthonormal_complement(w)
    if n == 2:
        d = U[:, 0]
        rho = _ray_lengths(body, origins, np.vstack((d, -d)))
        return rho.sum(axis=1), np.full(ts.size, 4.0 * 2.0 ** -BISECT_ITERS * body.bounding_radius)
    if n == 3:
        if n_rays % 4:
            raise InputError("ray count must be divisible by 4")
        phi = 2.0 * math.pi * np.arange(n_rays) / n_rays
        dirs = np.cos(phi)[:, None] * U[:, 0] + np.sin(phi)[:, None] * U[:, 1]
        rho = _ray_lengths(body, origins, dirs)
        return _polygon_areas(rho)
    # n >= 4: scrambled Sobol replicates, antithetic directions
    d = n - 1
    replicates = 8
    means = np.empty((replicates, ts.size))
    for k in range(replicates):
        pts = qmc.Sobol(d, scramble=True, seed=np.random.default_rng([seed, k])).random(n_samples)
        g = norm.ppf(np.clip(pts, 1e-15, 1 - 1e-15))
        g /= np.linalg.norm(g, axis=1, keepdims=True)
        g = np.vstack((g, -g))
        dirs = g @ U.T
        rho = _ray_lengths(body, origins, dirs)
        means[k] = np.mean(rho ** d, axis=1)
    kappa = unit_ball_volume(d)
    return kappa * means.mean(axis=0), kappa * means.std(axis=0, ddof=1) / math.sqrt(replicates)


def _section_values(body, w, ts, method="auto", **kw):
    ts = np.asarray(ts, dtype=float)
    h_minus, h_plus = support(body, w)
    if method not in ("auto", "closed_form", "quadrature"):
        raise InputError(f"unknown method {method!r}")
    if method in ("auto", "closed_form"):
        vals = _closed_form_values(body, w, ts)
        if vals is not None:
            return np.asarray(vals, dtype=float), np.zeros(ts.shape), "closed_form"
        if method == "closed_form":
            raise InputError(f"no closed form for {body.kind} in this direction")
    values = np.zeros(ts.shape)
    errors = np.zeros(ts.shape)
    inside = (ts > h_minus) & (ts < h_plus)
    if np.any(inside):
        v, e = _quadrature_values(body, w, ts[inside], **kw)
        values[inside] = v
        errors[inside] = e
    return values, errors, "quadrature"


def section_volume(body, omega, t, method="auto", **kw):
    """``(n-1)``-volume of ``body`` cut by the hyperplane ``<omega, x> = t``.

    ``method`` is ``"auto"`` (closed form where one exists), ``"closed_form"``
    or ``"quadrature"``. Returns exactly 0 outside ``[h_minus, h_plus]``
    and at the endpoints. ``t`` may be a scalar or an array.
    """
    w = check_unit_vector(omega, body.dim)
    t_arr = np.asarray(t, dtype=float)
    vals, _, _ = _section_values(body, w, np.atleast_1d(t_arr).ravel(), method, **kw)
    return float(vals[0]) if t_arr.ndim == 0 else vals.reshape(t_arr.shape)


def section_curve(body, omega, m=32, method="auto", **kw):
    """Sample ``V(omega, .)`` at ``m`` Chebyshev-Lobatto nodes of the support interval."""
    if m < 8:
        raise InputError("section curves need at least 8 nodes")
    w = check_unit_vector(omega, body.dim)
    h_minus, h_plus = support(body, w)
    nodes = chebyshev_lobatto(h_minus, h_plus, m)
    nodes[0], nodes[-1] = h_minus, h_plus
    values, errors, source = _section_values(body, w, nodes, method, **kw)
    values[0] = values[-1] = 0.0
    values = np.maximum(values, 0.0)
    return SectionCurve(w, h_minus, h_plus, nodes, values, source, errors)


def section_curves(body, omegas, m=32, method="auto", workers=1, **kw):
    """Curves for every direction of a grid, in grid order."""
    if workers and workers > 1:
        from concurrent.futures import ProcessPoolExecutor
        from functools import partial

        job = partial(_curve_job, body=body, m=m, method=method, kw=kw)
        with ProcessPoolExecutor(max_workers=workers) as pool:
            return list(pool.map(job, list(omegas), chunksize=16))
    return [section_curve(body, w, m, method, **kw) for w in omegas]


def _curve_job(w, body, m, method, kw):
    return section_curve(body, w, m, method, **kw)


# -- Fourier transform of chi_D --------------------------------------------


def fourier_chi(body, omega, r, method="slice", n_nodes=256, **kw):
    """``chi_D^(r omega) = int_D exp(i r <omega, x>) dx`` by one of two routes.

    ``slice``    -- 1-D transform of the section curve,
                    ``int exp(i r t) V(omega, t) dt``, Gauss-Legendre in
                    ``theta`` with ``t = B + C cos(theta)`` (smooth at the ends).
    ``boundary`` -- divergence theorem,
                    ``-(i / r) * int_{dD} exp(i r <omega, x>) <omega, nu> dS``.
    """
    w = check_unit_vector(omega, body.dim)
    r = float(r)
    if method == "slice":
        h_minus, h_plus = support(body, w)
        B, C = 0.5 * (h_plus + h_minus), 0.5 * (h_plus - h_minus)
        xg, wg = np.polynomial.legendre.leggauss(n_nodes)
        theta = 0.5 * math.pi * (xg + 1.0)
        ts = B + C * np.cos(theta)
        vals, _, _ = _section_values(body, w, ts, kw.pop("section_method", "auto"), **kw)
        jac = 0.5 * math.pi * wg * C * np.sin(theta)
        return complex(np.sum(jac * vals * np.exp(1j * r * ts)))
    if method == "boundary":
        if r == 0.0:
            raise DomainError("the boundary formula is singular at r = 0")
        points, normals = boundary_patch(body, **kw)
        integral = np.sum(np.exp(1j * r * (points @ w)) * (normals @ w))
        return complex(-1j / r * integral)
    raise InputError(f"unknown method {method!r}")


# -- back-projection ------------------------------------------------------


def _mollified_second_derivative(hm, hp, coef, s, eps, n_gauss=32):
    """``int V(omega_k, t) phi''(s_k - t) dt`` for each curve.

    ``phi`` is the profile ``(35 / 32 eps^7) (eps^2 - u^2)^3`` of a radial
    bump in R^3 (unit mass, support ``[-eps, eps]``), so the result is the
    second derivative of ``V * phi`` and carries no endpoint delta terms.
    ``coef`` holds the curves' Chebyshev coefficients column-wise.
    """
    lo = np.maximum(hm, s - eps)
    hi = np.minimum(hp, s + eps)
    out = np.zeros(hm.size)
    idx = np.flatnonzero(hi > lo)
    if idx.size == 0:
        return out
    xg, wg = np.polynomial.legendre.leggauss(n_gauss)
    a, b = lo[idx], hi[idx]
    t = 0.5 * (a + b)[None, :] + 0.5 * (b - a)[None, :] * xg[:, None]
    tau = (2.0 * t - (hm[idx] + hp[idx])[None, :]) / (hp[idx] - hm[idx])[None, :]
    V = cheb.chebval(np.clip(tau, -1.0, 1.0), coef[:, idx], tensor=False)
    u = s[idx][None, :] - t
    c = 35.0 / (32.0 * eps ** 7)
    phi2 = c * 6.0 * (eps * eps - u * u) * (5.0 * u * u - eps * eps)
    out[idx] = 0.5 * (b - a) * np.sum(wg[:, None] * V * phi2, axis=0)
    return out


def back_project(curves, x, weights=None, smoothing=None):
    """Odd-dimensional (n = 3) back-projection inversion at the point(s) ``x``.

    Evaluates ``c_3 * int_{S^2} (d^2/dt^2 V)(omega, <omega, x>) d omega`` with
    ``c_3 = -1/(8 pi^2)``. The t-derivative is taken of ``V`` convolved with
    the Radon profile of a radial bump of radius ``smoothing``, which turns
    the jumps of ``dV/dt`` at the support ends into ordinary integrands. The
    output is then exactly the membership indicator averaged over a ball
    of that radius: 1 deep inside, 0 away from the body.

    Parameters
    ----------
    curves : sequence of SectionCurve
        One curve per direction of a sphere grid.
    x : array_like, shape (3,) or (P, 3)
    weights : array_like, optional
        Sphere quadrature weights, default ``4 pi / len(curves)`` each.
    smoothing : float, optional
        Bump radius. Default: the larger of 1/10 of the smallest half-width
        and the grid spacing (radians) times the largest offset in play.
        The smoothed integrand has angular features of width about
        ``smoothing / offset``; smaller radii are not resolved by the grid.

    Returns
    -------
    float or ndarray of shape (P,)
    """
    curves = list(curves)
    if not curves or curves[0].dim != 3:
        raise InputError("back-projection is implemented for n = 3")
    pts = np.asarray(x, dtype=float)
    single = pts.ndim == 1
    pts = np.atleast_2d(pts)
    if pts.shape[1] != 3 or not np.all(np.isfinite(pts)):
        raise InputError("points must be finite with 3 coordinates")
    omegas = np.array([c.omega for c in curves])
    if weights is None:
        weights = np.full(len(curves), 4.0 * math.pi / len(curves))
    weights = np.asarray(weights, dtype=float)
    hm = np.array([c.h_minus for c in curves])
    hp = np.array([c.h_plus for c in curves])
    m = max(c.nodes.size for c in curves)
    coef = np.zeros((m, len(curves)))
    for k, c in enumerate(curves):
        coef[: c.nodes.size, k] = c._cheb_coef
    half_width = float(np.min(0.5 * (hp - hm)))
    spacing = math.sqrt(4.0 * math.pi / len(curves))
    extent = float(np.max(np.maximum(np.abs(hm), np.abs(hp))))
    out = np.empty(len(pts))
    for i, p in enumerate(pts):
        s = omegas @ p
        reach = float(np.max(np.abs(s))) + extent
        eps = max(0.1 * half_width, spacing * reach) if smoothing is None else float(smoothing)
        if eps <= 0:
            raise InputError("smoothing radius must be positive")
        if spacing * reach > eps * (1.0 + 1e-12):
            warnings.warn(f"direction grid too coarse for smoothing radius {eps:.3g} "
                          f"(spacing {spacing:.3g} rad); back-projection may be inaccurate",
                          AccuracyWarning, stacklevel=2)
        g = _mollified_second_derivative(hm, hp, coef, s, eps)
        out[i] = INVERSION_CONSTANT_3D * np.sum(weights * g)
    return float(out[0]) if single else out


# -- I/O -----------------------------------------------------------------------


def curve_rows(curve):
    """Rows ``omega_1..omega_n, t, V, est_error`` of a curve."""
    for t, v, e in zip(curve.nodes, curve.values, curve.est_error):
        yield [*curve.omega.tolist(), float(t), float(v), float(e)]


def curve_header(dim):
    return [f"omega_{j + 1}" for j in range(dim)] + ["t", "V", "est_error"]


def write_curve_csv(curves, stream=None, comments=()):
    """Write curves as CSV; returns the text when ``stream`` is None."""
    curves = [curves] if isinstance(curves, SectionCurve) else list(curves)
    out = io.StringIO() if stream is None else stream
    for line in comments:
        out.write(f"# {line}\n")
    writer = csv.writer(out, lineterminator="\n")
    writer.writerow(curve_header(curves[0].dim))
    for c in curves:
        for row in curve_rows(c):
            writer.writerow([repr(v) for v in row])
    return out.getvalue() if stream is None else None


def read_curve_csv(text):
    """Parse CSV produced by :func:`write_curve_csv` back into curves."""
    lines = [ln for ln in text.splitlines() if ln and not ln.startswith("#")]
    reader = csv.reader(lines)
    header = next(reader)
    n = len(header) - 3
    groups = {}
    for row in reader:
        vals = [float(v) for v in row]
        key = tuple(vals[:n])
        groups.setdefault(key, []).append(vals[n:])
    curves = []
    for key, rows in groups.items():
        arr = np.array(rows)
        curves.append(SectionCurve(np.array(key), float(arr[0, 0]), float(arr[-1, 0]),
                                   arr[:, 0], arr[:, 1], "file", arr[:, 2]))
    return curves


def fourier_record(r, value, method):
    return {"r": float(r), "re": float(value.real), "im": float(value.imag), "method": method}
