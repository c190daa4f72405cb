"""Input validation helpers shared by the numerical modules."""

import numpy as np

from .exceptions import DimensionError, NonFiniteError, NotHermitianError

HERMITICITY_TOL = 1e-10


def check_finite(array, name="array"):
    array = np.asarray(array)
    if not np.all(np.isfinite(array)):
        raise NonFiniteError(f"{name} contains NaN or infinite entries")
    return array


def check_matrix(X, name="matrix"):
    """Return ``X`` as a finite 2-D complex array."""
    X = np.asarray(X, dtype=complex)
    if X.ndim != 2:
        raise DimensionError(f"{name} must be 2-D, got shape {X.shape}")
    return check_finite(X, name)


def check_square(X, name="matrix", dim=None):
    X = check_matrix(X, name)
    if X.shape[0] != X.shape[1]:
        raise DimensionError(f"{name} must be square, got shape {X.shape}")
    if dim is not None and X.shape[0] != dim:
        raise DimensionError(f"{name} must be {dim}x{dim}, got shape {X.shape}")
    return X


def is_hermitian(X, tol=HERMITICITY_TOL):
    X = np.asarray(X)
    scale = np.linalg.norm(X)
    return np.linalg.norm(X - X.conj().T) <= tol * max(scale, np.finfo(float).tiny)


def check_hermitian(X, name="operator", tol=HERMITICITY_TOL):
    X = check_square(X, name)
    if np.any(X) and not is_hermitian(X, tol):
        raise NotHermitianError(f"{name} is not Hermitian within relative tolerance {tol:g}")
    return X


def check_same_shape(A, B):
    if np.shape(A) != np.shape(B):
        raise DimensionError(f"shape mismatch: {np.shape(A)} vs {np.shape(B)}")
