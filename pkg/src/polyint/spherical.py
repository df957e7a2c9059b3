"""Direction grids on S^{n-1} and the small quadrature rules used throughout.

Grids are antipodally symmetric by default: odd integrands then cancel
exactly and every direction has its negative present, which the parity
checks require.
"""

from __future__ import annotations

import math
from functools import lru_cache

import numpy as np
from scipy.special import gammaln

from .exceptions import InputError

GOLDEN_ANGLE = math.pi * (3.0 - math.sqrt(5.0))


def unit_ball_volume(d):
    """Volume of the unit ball in R^d (``d = 0`` gives 1)."""
    return math.exp(0.5 * d * math.log(math.pi) - gammaln(0.5 * d + 1.0))


def sphere_area(n):
    """Surface area of S^{n-1} in R^n."""
    return n * unit_ball_volume(n)


def fibonacci_sphere(n_points, antipodal=True):
    """Quasi-uniform points on S^2 with equal area weights.

    Parameters
    ----------
    n_points : int
        Number of points. Must be even when ``antipodal`` is true.
    antipodal : bool
        Build a Fibonacci spiral on the upper hemisphere and append its
        reflection, so that ``points[i + n_points // 2] == -points[i]``.

    Returns
    -------
    points : ndarray, shape (n_points, 3)
    weights : ndarray, shape (n_points,)
        Equal weights summing to ``4 pi``.
    """
    n_points = int(n_points)
    if n_points < 2:
        raise InputError("need at least 2 points")
    if antipodal:
        if n_points % 2:
            raise InputError("antipodal grids need an even point count")
        half = n_points // 2
        i = np.arange(half, dtype=float)
        z = 1.0 - (i + 0.5) / half
        phi = GOLDEN_ANGLE * i
        rho = np.sqrt(1.0 - z * z)
        upper = np.column_stack((rho * np.cos(phi), rho * np.sin(phi), z))
        points = np.vstack((upper, -upper))
    else:
        i = np.arange(n_points, dtype=float)
        z = 1.0 - 2.0 * (i + 0.5) / n_points
        phi = GOLDEN_ANGLE * i
        rho = np.sqrt(1.0 - z * z)
        points = np.column_stack((rho * np.cos(phi), rho * np.sin(phi), z))
    weights = np.full(n_points, 4.0 * math.pi / n_points)
    return points, weights


def circle_grid(n_points):
    """Equally spaced directions on S^1 (antipodal when ``n_points`` is even)."""
    theta = 2.0 * math.pi * (np.arange(n_points) + 0.5) / n_points
    points = np.column_stack((np.cos(theta), np.sin(theta)))
    return points, np.full(n_points, 2.0 * math.pi / n_points)


def direction_grid(dim, n_points, seed=0):
    """Antipodal direction grid with quadrature weights on S^{dim-1}.

    S^1 and S^2 get deterministic grids; higher spheres get seeded random
    directions paired with their negatives (Monte Carlo weights).
    """
    if dim < 2:
        raise InputError("dimension must be at least 2")
    if n_points % 2:
        raise InputError("direction grids are antipodal; use an even size")
    if dim == 2:
        return circle_grid(n_points)
    if dim == 3:
        return fibonacci_sphere(n_points)
    rng = np.random.default_rng(seed)
    half = rng.standard_normal((n_points // 2, dim))
    half /= np.linalg.norm(half, axis=1, keepdims=True)
    points = np.vstack((half, -half))
    return points, np.full(n_points, sphere_area(dim) / n_points)


def random_directions(dim, n_points, rng):
    v = rng.standard_normal((n_points, dim))
    return v / np.linalg.norm(v, axis=1, keepdims=True)


def random_rotation(dim, rng):
    """Haar-random proper rotation."""
    q, r = np.linalg.qr(rng.standard_normal((dim, dim)))
    q = q * np.sign(np.diag(r))
    if np.linalg.det(q) < 0:
        q[:, 0] = -q[:, 0]
    return q


def orthonormal_complement(omega):
    """Columns spanning the hyperplane orthogonal to ``omega``, shape (n, n-1)."""
    omega = np.asarray(omega, dtype=float)
    n = omega.shape[0]
    # Householder reflection mapping e_k onto omega; its other columns are
    # orthonormal and orthogonal to omega.
    k = int(np.argmax(np.abs(omega)))
    e = np.zeros(n)
    e[k] = 1.0
    s = 1.0 if omega[k] >= 0 else -1.0
    v = omega + s * e
    h = np.eye(n) - 2.0 * np.outer(v, v) / (v @ v)
    cols = [j for j in range(n) if j != k]
    return h[:, cols]


def clenshaw_curtis(n_intervals):
    """Clenshaw-Curtis nodes and weights on [-1, 1].

    Nodes are ``cos(pi * j / N)`` for ``j = 0..N`` (descending). The rule
    integrates polynomials of degree ``N`` exactly. The returned arrays are
    cached and read-only.
    """
    return _clenshaw_curtis(int(n_intervals))


@lru_cache(maxsize=64)
def _clenshaw_curtis(N):
    if N < 1:
        raise InputError("Clenshaw-Curtis needs at least one interval")
    theta = math.pi * np.arange(N + 1) / N
    x = np.cos(theta)
    w = np.zeros(N + 1)
    inner = np.arange(1, N)
    v = np.ones(N - 1)
    if N % 2 == 0:
        w[0] = w[N] = 1.0 / (N * N - 1)
        for k in range(1, N // 2):
            v -= 2.0 * np.cos(2 * k * theta[inner]) / (4 * k * k - 1)
        v -= np.cos(N * theta[inner]) / (N * N - 1)
    else:
        w[0] = w[N] = 1.0 / (N * N)
        for k in range(1, (N - 1) // 2 + 1):
            v -= 2.0 * np.cos(2 * k * theta[inner]) / (4 * k * k - 1)
    w[inner] = 2.0 * v / N
    x.flags.writeable = False
    w.flags.writeable = False
    return x, w


def chebyshev_lobatto(a, b, m):
    """``m`` Chebyshev extreme points of [a, b] in increasing order (endpoints included)."""
    x, _ = clenshaw_curtis(m - 1)
    return 0.5 * (a + b) + 0.5 * (b - a) * x[::-1]


def clenshaw_curtis_weights(a, b, m):
    """Weights matching :func:`chebyshev_lobatto` nodes on [a, b]."""
    _, w = clenshaw_curtis(m - 1)
    return 0.5 * (b - a) * w[::-1]
