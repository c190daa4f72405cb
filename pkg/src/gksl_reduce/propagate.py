"""Exact and reduced propagation."""

import numpy as np
import scipy.linalg as sla

from .exceptions import ExponentialRangeError
from .expansion import PairingMatrix, SlowExpansion
from .operators import Superoperator, devectorize, vectorize
from .spectral import FastSlowSplit


def propagator(S: Superoperator, t) -> Superoperator:
    """``exp(t S)`` by scaling and squaring with a Padé approximant."""
    if t < 0:
        raise ValueError("propagation time must be nonnegative")
    if t == 0:
        return Superoperator.identity(S.dim)
    with np.errstate(over="raise", invalid="raise"):
        try:
            P = sla.expm(t * S.matrix)
        except (FloatingPointError, OverflowError) as exc:
            raise ExponentialRangeError(f"exp(t S) overflowed at t={t:g}") from exc
    if not np.all(np.isfinite(P)):
        raise ExponentialRangeError(f"exp(t S) overflowed at t={t:g}")
    return Superoperator(S.dim, P)


def matrix_exponential_apply(S: Superoperator, t, X):
    """``exp(t S)(X)``."""
    if t == 0:
        return np.array(X, dtype=complex)
    return propagator(S, t).apply(X)


def full_slow_map(reduction, eps, T) -> Superoperator:
    """``Kbar o exp(T (L0 + eps L1))``: the exact reference for every reduced quantity."""
    P = propagator(reduction.total_generator(eps), T)
    return reduction.split.Kbar @ P


def reduced_trajectory(slow: SlowExpansion, E: PairingMatrix, x0, eps, T, order=None):
    """``z(T) = exp(T F(eps)) E(eps)^{-1} x(0)``."""
    F = slow.generator(eps, order)
    return sla.expm(T * F) @ E.solve(x0)


def second_order_reduced_map(split: FastSlowSplit, slow: SlowExpansion, eps, tbar):
    """Second-order slow propagator over the slow horizon ``tbar / eps``.

    Returns the ``dbar x dbar`` matrix ``exp((tbar/eps)(eps F1 + eps^2 F2))``
    and its lift ``sum_ab M_ab S_a Tr(J_b .)`` to the full operator space.
    """
    if slow.order < 2:
        raise ValueError("the second-order map needs an expansion of order >= 2")
    if eps <= 0:
        raise ValueError("eps must be positive")
    generator = eps * slow.F[1] + eps ** 2 * slow.F[2]
    M = sla.expm((tbar / eps) * generator)
    return M, lift_slow_map(split, M)


def lift_slow_map(split: FastSlowSplit, M) -> Superoperator:
    matrix = split.S_matrix @ np.asarray(M, dtype=complex) @ split.J_matrix.conj().T
    return Superoperator(split.L0.dim, matrix)


def default_initial_state(split: FastSlowSplit, seed=0):
    """Haar-random pure state projected onto span{S_d}, renormalized to unit trace."""
    rng = np.random.default_rng(seed)
    D = split.L0.dim
    psi = rng.normal(size=D) + 1j * rng.normal(size=D)
    psi /= np.linalg.norm(psi)
    rho = np.outer(psi, psi.conj())
    x = np.array([np.vdot(s, rho).real for s in split.S])
    rho0 = split.lift(x)
    tr = np.trace(rho0).real
    if abs(tr) > 1e-12:
        return rho0 / tr
    return rho0 / np.linalg.norm(rho0)


def exact_slow_coordinates(reduction, eps, rho0, T):
    """``Tr(S_d Kbar(exp(T L)(rho0)))`` for each d."""
    K = full_slow_map(reduction, eps, T)
    out = K.matrix @ vectorize(rho0)
    return (reduction.split.S_matrix.conj().T @ out).real


def exact_slow_state(reduction, eps, rho0, T):
    return devectorize(full_slow_map(reduction, eps, T).matrix @ vectorize(rho0))
