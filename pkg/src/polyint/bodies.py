"""Convex test bodies and their geometric oracles.

Every body is stored as a canonical shape ``K`` placed by a rigid motion:
``D = {center + R y : y in K}``. Oracles work in the canonical frame and
map back, so support, membership and boundary parametrisations stay
consistent under :func:`transform`.

Supported kinds
---------------
``ball``            radius ``r``
``ellipsoid``       semi-axes ``b_1..b_n``
``superellipsoid``  ``sum |y_j / b_j|^p <= 1`` with ``p >= 1``
``revolution``      ``x^2 + y^2 <= P(z)`` in R^3, ``P`` an even polynomial
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Optional

import numpy as np
from numpy.polynomial import polynomial as npoly
from scipy import optimize
from scipy.special import gammaln

from ._validation import check_rotation, check_unit_vector, check_vector
from .exceptions import ConstructionError, InputError
from .spherical import fibonacci_sphere, orthonormal_complement, random_directions, unit_ball_volume

KINDS = ("ball", "ellipsoid", "superellipsoid", "revolution")


@dataclass(frozen=True, eq=False)
class RevolutionProfile:
    """Even profile polynomial ``P(z) = b0 + b2 z^2 + ... + b2N z^2N``.

    ``coeffs`` holds only the even coefficients ``(b0, b2, ..., b2N)``.
    """

    coeffs: tuple

    def __post_init__(self):
        c = tuple(float(v) for v in self.coeffs)
        object.__setattr__(self, "coeffs", c)
        if len(c) < 2:
            raise ConstructionError("revolution profile needs N >= 1 (at least b0, b2)")
        if not all(math.isfinite(v) for v in c):
            raise ConstructionError("profile coefficients must be finite")
        if c[0] <= 0:
            raise ConstructionError("profile needs b0 > 0")
        if c[-1] >= 0:
            raise ConstructionError("profile needs a negative leading coefficient b2N < 0")

    @property
    def N(self):
        return len(self.coeffs) - 1

    @property
    def power_coeffs(self):
        """Monomial coefficients of P in z, lowest degree first."""
        out = np.zeros(2 * self.N + 1)
        out[::2] = self.coeffs
        return out

    def __call__(self, z):
        return npoly.polyval(np.asarray(z, dtype=float), self.power_coeffs)

    def derivative(self, z):
        return npoly.polyval(np.asarray(z, dtype=float), npoly.polyder(self.power_coeffs))

    @property
    def half_length(self):
        """Smallest positive root ``z0`` of P: the body is ``|z| <= z0``."""
        roots = npoly.polyroots(self.power_coeffs)
        real = roots[np.abs(roots.imag) < 1e-9].real
        pos = np.sort(real[real > 0])
        # P(0) > 0 and P -> -inf, so a positive root always exists.
        z0 = float(pos[0])
        # polish with Newton on the exact polynomial
        for _ in range(3):
            d = float(self.derivative(z0))
            if d == 0:
                break
            z0 -= float(self(z0)) / d
        return z0

    def is_convex(self, samples=2001):
        """Concavity of ``sqrt(P)`` on ``(-z0, z0)``, i.e. convexity of the body."""
        z0 = self.half_length
        z = np.linspace(-z0, z0, samples)[1:-1]
        p = self(z)
        dp = self.derivative(z)
        d2p = npoly.polyval(z, npoly.polyder(self.power_coeffs, 2))
        # (sqrt P)'' = (2 P P'' - P'^2) / (4 P^{3/2})
        return bool(np.all(2.0 * p * d2p - dp * dp <= 1e-12 * np.maximum(1.0, p * p)))


@dataclass(frozen=True, eq=False)
class ConvexBody:
    """Immutable description of a test body.

    Construct with :func:`make_ball`, :func:`make_ellipsoid`,
    :func:`make_superellipsoid` or :func:`make_revolution`.
    """

    kind: str
    dim: int
    center: np.ndarray
    rotation: np.ndarray
    semi_axes: Optional[np.ndarray] = None
    exponent: Optional[float] = None
    profile: Optional[RevolutionProfile] = None
    _cache: dict = field(default_factory=dict, repr=False, compare=False)

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ConstructionError(f"unknown body kind {self.kind!r}")
        if self.dim < 2:
            raise ConstructionError("dimension must be >= 2")
        center = check_vector(self.center, self.dim, name="center")
        center.setflags(write=False)
        object.__setattr__(self, "center", center)
        try:
            rot = check_rotation(self.rotation, self.dim)
        except InputError as exc:
            raise ConstructionError(str(exc)) from exc
        rot = rot.copy()
        rot.setflags(write=False)
        object.__setattr__(self, "rotation", rot)
        if self.kind == "revolution":
            if self.dim != 3:
                raise ConstructionError("bodies of revolution live in R^3")
            if not isinstance(self.profile, RevolutionProfile):
                raise ConstructionError("revolution body needs a RevolutionProfile")
        else:
            b = np.asarray(self.semi_axes, dtype=float)
            if b.shape != (self.dim,) or not np.all(np.isfinite(b)) or np.any(b <= 0):
                raise ConstructionError("semi-axes must be dim positive finite numbers")
            b = b.copy()
            b.setflags(write=False)
            object.__setattr__(self, "semi_axes", b)
        if self.kind == "superellipsoid":
            if self.exponent is None or not math.isfinite(self.exponent) or self.exponent < 1:
                raise ConstructionError("superellipsoid exponent must be >= 1")
            object.__setattr__(self, "exponent", float(self.exponent))

    # -- convenience ------------------------------------------------------

    @property
    def radius(self):
        if self.kind != "ball":
            raise AttributeError("only balls have a radius")
        return float(self.semi_axes[0])

    @property
    def has_closed_form(self):
        return self.kind in ("ball", "ellipsoid")

    def to_canonical(self, x):
        """Map world points (..., n) to the canonical frame."""
        return (np.asarray(x, dtype=float) - self.center) @ self.rotation

    def to_world(self, y):
        return np.asarray(y, dtype=float) @ self.rotation.T + self.center

    def level(self, y):
        """Canonical gauge-like function, ``<= 0`` exactly on the closed body."""
        y = np.asarray(y, dtype=float)
        if self.kind in ("ball", "ellipsoid"):
            return np.sum((y / self.semi_axes) ** 2, axis=-1) - 1.0
        if self.kind == "superellipsoid":
            return np.sum(np.abs(y / self.semi_axes) ** self.exponent, axis=-1) - 1.0
        z = y[..., 2]
        z0 = self.profile.half_length
        radial = y[..., 0] ** 2 + y[..., 1] ** 2 - self.profile(z)
        return np.where(np.abs(z) <= z0, radial, np.maximum(radial, np.abs(z) - z0))

    @property
    def bounding_radius(self):
        """Radius of a ball about the center containing the body."""
        if "bounding_radius" not in self._cache:
            if self.kind == "revolution":
                z0 = self.profile.half_length
                z = np.linspace(-z0, z0, 4001)
                r = float(np.sqrt(np.max(z * z + np.maximum(self.profile(z), 0.0))))
            else:
                r = float(np.linalg.norm(self.semi_axes))
            self._cache["bounding_radius"] = r
        return self._cache["bounding_radius"]

    def volume(self):
        """n-volume of the body (closed form for every supported kind)."""
        n = self.dim
        if self.kind in ("ball", "ellipsoid"):
            return unit_ball_volume(n) * float(np.prod(self.semi_axes))
        if self.kind == "superellipsoid":
            p = self.exponent
            log_v = n * math.log(2.0) + n * gammaln(1.0 + 1.0 / p) - gammaln(1.0 + n / p)
            return math.exp(log_v) * float(np.prod(self.semi_axes))
        z0 = self.profile.half_length
        anti = npoly.polyint(self.profile.power_coeffs)
        return math.pi * float(npoly.polyval(z0, anti) - npoly.polyval(-z0, anti))

    def is_convex(self):
        if self.kind == "revolution":
            return self.profile.is_convex()
        return True

    def __repr__(self):
        if self.kind == "revolution":
            params = f"coeffs={self.profile.coeffs}"
        elif self.kind == "superellipsoid":
            params = f"semi_axes={self.semi_axes.tolist()}, exponent={self.exponent}"
        else:
            params = f"semi_axes={self.semi_axes.tolist()}"
        return f"ConvexBody(kind={self.kind!r}, dim={self.dim}, {params}, center={self.center.tolist()})"


# -- constructors ---------------------------------------------------------


def make_ball(dim=3, radius=1.0, center=None):
    if not (math.isfinite(radius) and radius > 0):
        raise ConstructionError("radius must be positive")
    center = np.zeros(dim) if center is None else center
    return ConvexBody("ball", int(dim), center, None, semi_axes=np.full(int(dim), float(radius)))


def make_ellipsoid(semi_axes, center=None, rotation=None):
    b = np.asarray(semi_axes, dtype=float)
    if b.ndim != 1:
        raise ConstructionError("semi_axes must be a vector")
    dim = b.shape[0]
    center = np.zeros(dim) if center is None else center
    return ConvexBody("ellipsoid", dim, center, rotation, semi_axes=b)


def make_superellipsoid(semi_axes, exponent, center=None, rotation=None):
    b = np.asarray(semi_axes, dtype=float)
    if b.ndim != 1:
        raise ConstructionError("semi_axes must be a vector")
    dim = b.shape[0]
    center = np.zeros(dim) if center is None else center
    return ConvexBody("superellipsoid", dim, center, rotation, semi_axes=b, exponent=exponent)


def make_revolution(coeffs, center=None, rotation=None):
    profile = coeffs if isinstance(coeffs, RevolutionProfile) else RevolutionProfile(tuple(coeffs))
    center = np.zeros(3) if center is None else center
    return ConvexBody("revolution", 3, center, rotation, profile=profile)


def ellipsoid_from_params(params):
    """Build an ellipsoid body from :class:`EllipsoidParams`."""
    return make_ellipsoid(params.semi_axes, params.center, params.rotation)


@dataclass(frozen=True, eq=False)
class EllipsoidParams:
    """Center, orthonormal axis frame and semi-axes of an ellipsoid."""

    semi_axes: np.ndarray
    center: np.ndarray
    rotation: np.ndarray

    def __post_init__(self):
        b = np.asarray(self.semi_axes, dtype=float)
        if b.ndim != 1 or np.any(~np.isfinite(b)) or np.any(b <= 0):
            raise ConstructionError("semi-axes must be strictly positive")
        object.__setattr__(self, "semi_axes", b)
        object.__setattr__(self, "center", check_vector(self.center, b.shape[0], name="center"))
        try:
            object.__setattr__(self, "rotation", check_rotation(self.rotation, b.shape[0], tol=1e-9))
        except InputError as exc:
            raise ConstructionError(str(exc)) from exc

    @property
    def dim(self):
        return self.semi_axes.shape[0]

    def support_width(self, omega):
        """``h(omega) = sqrt(sum b_j^2 (R^T omega)_j^2)``, the centered support value."""
        v = np.asarray(omega, dtype=float) @ self.rotation
        return np.sqrt(np.sum((self.semi_axes * v) ** 2, axis=-1))

    def support(self, omega):
        return np.asarray(omega, dtype=float) @ self.center + self.support_width(omega)

    def to_dict(self):
        return {
            "center": self.center.tolist(),
            "semi_axes": self.semi_axes.tolist(),
            "rotation": self.rotation.tolist(),
        }


# -- support functions ----------------------------------------------------


def _canonical_support(body, v):
    """Return ``(h_plus, argmax)`` of ``<v, y>`` over the canonical shape."""
    if body.kind in ("ball", "ellipsoid"):
        b2v = body.semi_axes ** 2 * v
        h = math.sqrt(float(v @ b2v))
        return h, b2v / h
    if body.kind == "superellipsoid":
        p = body.exponent
        w = body.semi_axes * v
        if p == 1.0:
            j = int(np.argmax(np.abs(w)))
            y = np.zeros_like(v)
            y[j] = math.copysign(body.semi_axes[j], w[j])
            return float(abs(w[j])), y
        q = p / (p - 1.0)
        scale = float(np.max(np.abs(w)))
        wn = w / scale
        norm_q = float(np.sum(np.abs(wn) ** q) ** (1.0 / q))
        y = body.semi_axes * np.sign(w) * (np.abs(wn) / norm_q) ** (q - 1.0)
        return scale * norm_q, y
    return _revolution_support(body.profile, v)


def _revolution_support(profile, v):
    a = math.hypot(v[0], v[1])
    c = float(v[2])
    z0 = profile.half_length

    def f(z):
        return a * np.sqrt(np.maximum(profile(z), 0.0)) + c * z

    grid = np.linspace(-z0, z0, 513)
    k = int(np.argmax(f(grid)))
    lo, hi = grid[max(k - 1, 0)], grid[min(k + 1, grid.size - 1)]
    res = optimize.minimize_scalar(lambda z: -f(z), bounds=(lo, hi), method="bounded",
                                   options={"xatol": 1e-13})
    candidates = [(float(f(grid[k])), float(grid[k])), (-float(res.fun), float(res.x))]
    h, z = max(candidates)
    rho = math.sqrt(max(float(profile(z)), 0.0))
    if a > 0:
        y = np.array([rho * v[0] / a, rho * v[1] / a, z])
    else:
        y = np.array([0.0, 0.0, z])
    return h, y


def support(body, omega):
    """Support interval ``(h_minus, h_plus)`` of ``body`` in direction ``omega``.

    The hyperplane ``<omega, x> = t`` meets the closed body exactly when
    ``h_minus <= t <= h_plus``. ``h_minus`` is computed as ``-h_plus(-omega)``.
    """
    w = check_unit_vector(omega, body.dim)
    v = w @ body.rotation
    shift = float(w @ body.center)
    hp, _ = _canonical_support(body, v)
    hm, _ = _canonical_support(body, -v)
    return shift - hm, shift + hp


def support_points(body, omega):
    """World-frame boundary points ``(x_minus, x_plus)`` attaining the support values."""
    w = check_unit_vector(omega, body.dim)
    v = w @ body.rotation
    _, yp = _canonical_support(body, v)
    _, ym = _canonical_support(body, -v)
    return body.to_world(ym), body.to_world(yp)


def numerical_support(body, omega, n_starts=64, seed=0):
    """Gradient-free maximisation of ``<omega, x>`` over the boundary.

    Independent of the closed forms used by :func:`support`; boundary points
    come from the radial map ``u -> rho(u) u`` of the canonical shape.
    """
    w = check_unit_vector(omega, body.dim)
    v = w @ body.rotation
    if body.kind == "revolution":
        h, _ = _revolution_support(body.profile, v)
        return float(w @ body.center) + h

    def radial(u):
        u = u / np.linalg.norm(u)
        if body.kind == "superellipsoid":
            g = np.sum(np.abs(u / body.semi_axes) ** body.exponent) ** (1.0 / body.exponent)
        else:
            g = math.sqrt(float(np.sum((u / body.semi_axes) ** 2)))
        return u / g

    rng = np.random.default_rng(seed)
    if body.dim == 3:
        starts, _ = fibonacci_sphere(max(2 * (n_starts // 2), 2))
    else:
        starts = random_directions(body.dim, n_starts, rng)
    vals = np.array([radial(u) @ v for u in starts])
    u0 = starts[int(np.argmax(vals))]
    # optimise over tangent coordinates at u0, which removes the scale freedom of u
    Q = orthonormal_complement(u0)

    def objective(s):
        return -float(radial(u0 + Q @ s) @ v)

    s0 = np.zeros(body.dim - 1)
    for xatol in (1e-10, 1e-13):
        res = optimize.minimize(objective, s0, method="Nelder-Mead",
                                options={"xatol": xatol, "fatol": 1e-16, "maxiter": 4000,
                                         "initial_simplex": s0 + np.vstack((np.zeros(body.dim - 1),
                                                                            0.05 * np.eye(body.dim - 1)))})
        s0 = res.x
    return float(w @ body.center) - float(res.fun)


def contains(body, x):
    """Membership of the closed body; vectorised over leading axes of ``x``."""
    x = np.asarray(x, dtype=float)
    if x.shape[-1] != body.dim:
        raise InputError(f"points must have {body.dim} coordinates")
    inside = body.level(body.to_canonical(x)) <= 1e-12
    return bool(inside) if inside.ndim == 0 else inside


def transform(body, translation=None, rotation=None):
    """Rigid motion ``x -> R x + a`` applied to the body.

    Support transforms as ``h_{RD+a}(omega) = h_D(R^T omega) + <a, omega>``.
    """
    n = body.dim
    a = np.zeros(n) if translation is None else check_vector(translation, n, name="translation")
    R = check_rotation(rotation, n)
    return ConvexBody(body.kind, n, R @ body.center + a, R @ body.rotation,
                      semi_axes=body.semi_axes, exponent=body.exponent, profile=body.profile)


def dilate(body, s):
    """Homothety ``x -> s x`` about the origin."""
    if not (math.isfinite(s) and s > 0):
        raise InputError("dilation factor must be positive")
    if body.kind == "revolution":
        coeffs = [c * s ** (2 - 2 * k) for k, c in enumerate(body.profile.coeffs)]
        return ConvexBody("revolution", 3, s * body.center, body.rotation,
                          profile=RevolutionProfile(tuple(coeffs)))
    return ConvexBody(body.kind, body.dim, s * body.center, body.rotation,
                      semi_axes=s * body.semi_axes, exponent=body.exponent)


# -- boundary parametrisations ------------------------------------------


def boundary_patch(body, n_theta=256, n_phi=512):
    """Quadrature on the boundary: points and outward area-weighted normals.

    Returns ``(points, normals)`` with shapes ``(k, n)``; ``sum f(x) <nu, v> dS``
    is approximated by ``sum(f(points) * (normals @ v))``. Gauss-Legendre in
    the polar angle, trapezoid in the azimuth (n = 3); trapezoid on the
    curve (n = 2).
    """
    if body.dim == 2:
        return _boundary_curve(body, n_phi)
    if body.dim != 3:
        raise InputError("boundary quadrature is available for n = 2 and n = 3")
    xg, wg = np.polynomial.legendre.leggauss(n_theta)
    theta = 0.5 * math.pi * (xg + 1.0)
    wt = 0.5 * math.pi * wg
    phi = 2.0 * math.pi * np.arange(n_phi) / n_phi
    wp = 2.0 * math.pi / n_phi
    T, P = np.meshgrid(theta, phi, indexing="ij")
    W = (wt[:, None] * wp) * np.ones_like(P)
    st, ct, sp, cp = np.sin(T), np.cos(T), np.sin(P), np.cos(P)

    if body.kind == "revolution":
        prof = body.profile
        z0 = prof.half_length
        z = z0 * ct
        rho = np.sqrt(np.maximum(prof(z), 0.0))
        y = np.stack((rho * cp, rho * sp, z), axis=-1)
        nrm = np.stack((z0 * st * rho * cp, z0 * st * rho * sp, -0.5 * prof.derivative(z) * z0 * st),
                       axis=-1)
    else:
        u = np.stack((st * cp, st * sp, ct), axis=-1)
        u_t = np.stack((ct * cp, ct * sp, -st), axis=-1)
        u_p = np.stack((-st * sp, st * cp, np.zeros_like(st)), axis=-1)
        b = body.semi_axes
        if body.kind in ("ball", "ellipsoid"):
            y, y_t, y_p = b * u, b * u_t, b * u_p
        else:
            p = body.exponent
            g = np.sum(np.abs(u) ** p, axis=-1, keepdims=True) ** (1.0 / p)
            grad = np.sign(u) * np.abs(u) ** (p - 1.0) * g ** (1.0 - p)
            s = u / g
            s_t = u_t / g - u * np.sum(grad * u_t, axis=-1, keepdims=True) / g ** 2
            s_p = u_p / g - u * np.sum(grad * u_p, axis=-1, keepdims=True) / g ** 2
            y, y_t, y_p = b * s, b * s_t, b * s_p
        nrm = np.cross(y_t, y_p)
    det = np.linalg.det(body.rotation)
    points = body.to_world(y.reshape(-1, 3))
    normals = det * (nrm.reshape(-1, 3) @ body.rotation.T) * W.reshape(-1, 1)
    return points, normals


def _boundary_curve(body, n_phi):
    phi = 2.0 * math.pi * np.arange(n_phi) / n_phi
    w = 2.0 * math.pi / n_phi
    u = np.column_stack((np.cos(phi), np.sin(phi)))
    u_p = np.column_stack((-np.sin(phi), np.cos(phi)))
    b = body.semi_axes
    if body.kind in ("ball", "ellipsoid"):
        y, y_p = b * u, b * u_p
    else:
        p = body.exponent
        g = np.sum(np.abs(u) ** p, axis=-1, keepdims=True) ** (1.0 / p)
        grad = np.sign(u) * np.abs(u) ** (p - 1.0) * g ** (1.0 - p)
        y = b * u / g
        y_p = b * (u_p / g - u * np.sum(grad * u_p, axis=-1, keepdims=True) / g ** 2)
    nrm = np.column_stack((y_p[:, 1], -y_p[:, 0]))
    det = np.linalg.det(body.rotation)
    return body.to_world(y), det * (nrm @ body.rotation.T) * w


# -- JSON ---------------------------------------------------------------------


def body_from_dict(data):
    """Build a body from its JSON description."""
    if not isinstance(data, dict):
        raise ConstructionError("body description must be a JSON object")
    kind = data.get("kind")
    center = data.get("center")
    rotation = data.get("rotation")
    try:
        if kind == "ball":
            dim = int(data.get("dim", len(center) if center is not None else 3))
            return make_ball(dim, float(data.get("radius", 1.0)), center)
        if kind == "ellipsoid":
            return make_ellipsoid(data["semi_axes"], center, rotation)
        if kind == "superellipsoid":
            return make_superellipsoid(data["semi_axes"], float(data["exponent"]), center, rotation)
        if kind == "revolution":
            return make_revolution(data["coeffs"], center, rotation)
    except KeyError as exc:
        raise ConstructionError(f"{kind} body data is missing {exc.args[0]!r}") from exc
    except InputError as exc:
        raise ConstructionError(str(exc)) from exc
    raise ConstructionError(f"unknown body kind {kind!r}")


def body_to_dict(body):
    out = {"kind": body.kind}
    if body.kind == "ball":
        out.update(dim=body.dim, radius=body.radius)
    elif body.kind == "ellipsoid":
        out["semi_axes"] = body.semi_axes.tolist()
    elif body.kind == "superellipsoid":
        out.update(exponent=body.exponent, semi_axes=body.semi_axes.tolist())
    else:
        out["coeffs"] = list(body.profile.coeffs)
    out["center"] = body.center.tolist()
    if body.kind != "ball":
        out["rotation"] = body.rotation.tolist()
    return out


def section_axis(body):
    """World direction of the symmetry axis of a body of revolution."""
    if body.kind != "revolution":
        raise InputError("only bodies of revolution have a distinguished axis")
    return np.array(body.rotation[:, -1], dtype=float)
