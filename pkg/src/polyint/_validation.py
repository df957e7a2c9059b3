"""Input validation helpers in the spirit of ``sklearn.utils.validation``."""

from __future__ import annotations

import numpy as np

from .exceptions import InputError

UNIT_TOL = 1e-12
ORTHO_TOL = 1e-12


def check_vector(x, dim=None, name="x"):
    arr = np.asarray(x, dtype=float)
    if arr.ndim != 1:
        raise InputError(f"{name} must be a 1-D vector, got shape {arr.shape}")
    if dim is not None and arr.shape[0] != dim:
        raise InputError(f"{name} must have length {dim}, got {arr.shape[0]}")
    if not np.all(np.isfinite(arr)):
        raise InputError(f"{name} must be finite")
    return arr


def check_unit_vector(omega, dim=None, tol=UNIT_TOL):
    """Return ``omega`` as a float array, raising if it is not a unit vector."""
    w = check_vector(omega, dim, name="omega")
    norm = np.linalg.norm(w)
    if abs(norm - 1.0) > tol:
        raise InputError(f"omega must be a unit vector (|omega| = {norm!r})")
    return w


def check_directions(omegas, dim=None, tol=1e-10):
    """Validate a stack of unit vectors of shape (k, n)."""
    w = np.asarray(omegas, dtype=float)
    if w.ndim != 2:
        raise InputError(f"direction grid must be 2-D, got shape {w.shape}")
    if dim is not None and w.shape[1] != dim:
        raise InputError(f"directions must have {dim} components, got {w.shape[1]}")
    norms = np.linalg.norm(w, axis=1)
    if np.any(np.abs(norms - 1.0) > tol):
        raise InputError("all directions must be unit vectors")
    return w


def check_rotation(rotation, dim, tol=ORTHO_TOL):
    """Return an orthonormal ``dim x dim`` frame; ``None`` means identity."""
    if rotation is None:
        return np.eye(dim)
    rot = np.asarray(rotation, dtype=float)
    if rot.shape != (dim, dim):
        raise InputError(f"rotation must be {dim}x{dim}, got shape {rot.shape}")
    if not np.all(np.isfinite(rot)):
        raise InputError("rotation must be finite")
    err = np.max(np.abs(rot.T @ rot - np.eye(dim)))
    if err > tol:
        raise InputError(f"rotation is not orthonormal (max |R^T R - I| = {err:.3g})")
    return rot


def check_positive(value, name):
    if not np.isfinite(value) or value <= 0:
        raise InputError(f"{name} must be positive, got {value!r}")
    return float(value)
