"""scikit-learn style facade over the reduction pipeline.

``fit`` takes a :class:`GKSLModel`; ``transform`` maps density matrices to
slow coordinates, ``inverse_transform`` lifts coordinates back onto the slow
manifold and ``predict`` runs the reduced dynamics.
"""

import numpy as np
from sklearn.base import BaseEstimator, TransformerMixin
from sklearn.utils.validation import check_is_fitted

from ._validation import check_finite
from .exceptions import DimensionError
from .expansion import MAX_ORDER, RESIDUAL_TOL
from .lindblad import GKSLModel
from .propagate import reduced_trajectory
from .reduction import reduce_model
from .spectral import ZERO_TOL


class AdiabaticElimination(TransformerMixin, BaseEstimator):
    """Reduced slow dynamics of a slow/fast GKSL model.

    Parameters
    ----------
    order : int
        Truncation order of both expansions.
    epsilon : float or None
        Perturbation strength used by ``predict`` and ``inverse_transform``;
        ``None`` takes the first value stored on the fitted model.
    zero_tol, residual_tol, max_order :
        Forwarded to :func:`reduce_model`.
    """

    def __init__(self, order=2, epsilon=None, zero_tol=ZERO_TOL, residual_tol=RESIDUAL_TOL, max_order=MAX_ORDER):
        self.order = order
        self.epsilon = epsilon
        self.zero_tol = zero_tol
        self.residual_tol = residual_tol
        self.max_order = max_order

    def fit(self, model, y=None):
        if not isinstance(model, GKSLModel):
            raise TypeError(f"fit expects a GKSLModel, got {type(model).__name__}")
        self.reduction_ = reduce_model(
            model, order=self.order, zero_tol=self.zero_tol,
            residual_tol=self.residual_tol, max_order=self.max_order,
        )
        self.model_ = model
        self.split_ = self.reduction_.split
        self.n_slow_ = self.reduction_.dbar
        self.gamma_ = self.reduction_.gamma
        self.epsilon_ = float(model.epsilons[0] if self.epsilon is None else self.epsilon)
        self.F_ = self.reduction_.F(self.epsilon_)
        return self

    def _states(self, rhos):
        D = self.model_.dim
        arr = check_finite(np.asarray(rhos, dtype=complex), "rho")
        single = arr.ndim == 2
        arr = arr[None] if single else arr
        if arr.ndim != 3 or arr.shape[1:] != (D, D):
            raise DimensionError(f"expected density matrices of shape ({D}, {D}), got {np.shape(rhos)}")
        return arr, single

    def transform(self, rhos):
        """Slow coordinates ``x_d = Tr(J_d rho)``; shape ``(n, dbar)`` (or ``(dbar,)`` for one state)."""
        check_is_fitted(self, "reduction_")
        arr, single = self._states(rhos)
        X = np.array([self.split_.slow_coordinates(r) for r in arr])
        return X[0] if single else X

    def inverse_transform(self, X):
        """``sum_d x_d S_d(eps)`` using the truncated slow-manifold series."""
        check_is_fitted(self, "reduction_")
        X = check_finite(np.asarray(X, dtype=float), "X")
        single = X.ndim == 1
        X = np.atleast_2d(X)
        if X.shape[1] != self.n_slow_:
            raise DimensionError(f"expected {self.n_slow_} slow coordinates, got {X.shape[1]}")
        basis = self.reduction_.slow.operator_series(self.epsilon_)
        out = np.array([sum(x[d] * basis[d] for d in range(self.n_slow_)) for x in X])
        return out[0] if single else out

    def predict(self, rho0, t):
        """Reduced trajectory ``z(t) = exp(t F) E^{-1} x(0)`` for each time in ``t``."""
        check_is_fitted(self, "reduction_")
        x0 = self.transform(rho0)
        if x0.ndim != 1:
            raise DimensionError("predict takes a single initial state")
        times = np.atleast_1d(np.asarray(t, dtype=float))
        if np.any(times < 0) or not np.all(np.isfinite(times)):
            raise ValueError("times must be finite and nonnegative")
        E = self.reduction_.pairing(self.epsilon_)
        Z = np.array([reduced_trajectory(self.reduction_.slow, E, x0, self.epsilon_, T) for T in times])
        return Z[0] if np.ndim(t) == 0 else Z
