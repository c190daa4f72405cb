"""Order-by-order expansions of the slow manifold and of the fast invariant subspace.

Index conventions (all matrices are ``dbar x dbar`` and real):

* ``F[n][a, b] = Tr(J_a L1(S_b^(n-1)))`` so that ``dx/dt = F(eps) x``.
* ``G[n][a, b] = Tr(S_a L1*(J_b^(n-1)))`` so that
  ``(L0* + eps L1*)(J_b(eps)) = sum_a G_ab(eps) J_a(eps)``; with this
  orientation ``G[1] == F[1].T``.

Both recursions keep the correction operators biorthogonal to the nominal
basis: ``Tr(J_a S_b^(n)) = 0`` and ``Tr(S_a J_b^(n)) = 0`` for ``n >= 1``.
"""

import warnings
from dataclasses import dataclass, field
from typing import List

import numpy as np

from .exceptions import RecursionInconsistencyError, RegimeExceededError
from .operators import Superoperator, gram_matrix
from .spectral import FastSlowSplit, PseudoResolvent

MAX_ORDER = 8
RESIDUAL_TOL = 1e-9
IMAG_TOL = 1e-10
VALIDITY_WARN = 0.1


@dataclass(frozen=True, eq=False)
class Expansion:
    """Coefficient matrices and operator corrections up to ``order``.

    ``coefficients[0]`` is the zero matrix and ``corrections[0]`` the nominal
    basis, so both lists have ``order + 1`` entries.
    """

    order: int
    coefficients: List[np.ndarray]
    corrections: List[List[np.ndarray]]
    residuals: List[float] = field(default_factory=list)
    gauge: List[float] = field(default_factory=list)

    @property
    def dbar(self):
        return len(self.corrections[0])

    def operator_series(self, eps, order=None):
        """Truncated sums ``sum_{n<=order} eps^n X_d^(n)`` for each d."""
        order = self.order if order is None else self._check_order(order)
        return [
            sum(eps ** n * self.corrections[n][d] for n in range(order + 1))
            for d in range(self.dbar)
        ]

    def generator(self, eps, order=None):
        """``sum_{n=1}^{order} eps^n C^(n)`` for the coefficient matrices ``C``."""
        order = self.order if order is None else self._check_order(order)
        out = np.zeros((self.dbar, self.dbar))
        for n in range(1, order + 1):
            out = out + eps ** n * self.coefficients[n]
        return out

    def _check_order(self, order):
        if not 0 <= order <= self.order:
            raise ValueError(f"order {order} not available (expansion has order {self.order})")
        return order


class SlowExpansion(Expansion):
    """Slow-manifold expansion: ``F`` matrices and ``S_d^(n)`` corrections."""

    @property
    def F(self):
        return self.coefficients

    @property
    def S_corr(self):
        return self.corrections


class FastExpansion(Expansion):
    """Fast-subspace expansion: ``G`` matrices and ``J_d^(n)`` corrections."""

    @property
    def G(self):
        return self.coefficients

    @property
    def J_corr(self):
        return self.corrections


def _run_recursion(nominal, duals, generator, perturbation, resolvent: PseudoResolvent, order,
                   residual_tol, imag_tol):
    """Shared body of the two recursions.

    ``nominal`` are the order-zero operators being corrected, ``duals`` the
    operators used to read off coefficients by ``Tr(dual_a Y)``.
    """
    dbar = len(nominal)
    coeffs = [np.zeros((dbar, dbar))]
    corr = [list(nominal)]
    residuals, gauge = [], []
    for n in range(1, order + 1):
        pushed = [perturbation.apply(X) for X in corr[n - 1]]
        C = gram_matrix(duals, pushed)
        scale = max(1.0, float(np.abs(C).max()))
        if np.abs(C.imag).max() > imag_tol * scale:
            raise RecursionInconsistencyError(
                f"order {n}: coefficient matrix has imaginary residue {np.abs(C.imag).max():.3g}"
            )
        coeffs.append(C.real.copy())

        new, worst = [], 0.0
        for d in range(dbar):
            feedback = sum(
                coeffs[r][dd, d] * corr[n - r][dd]
                for r in range(1, n + 1)
                for dd in range(dbar)
            )
            X = resolvent.apply(pushed[d] - feedback)
            X = (X + X.conj().T) / 2
            new.append(X)
            # order-n invariance: feedback = L0(X^(n)) + L1(X^(n-1))
            defect = np.linalg.norm(feedback - generator.apply(X) - pushed[d])
            size = np.linalg.norm(feedback) + np.linalg.norm(pushed[d])
            worst = max(worst, defect / size if size > 0 else defect)
        if worst > residual_tol:
            raise RecursionInconsistencyError(f"order {n}: invariance residual {worst:.3g} exceeds {residual_tol:g}")
        corr.append(new)
        residuals.append(worst)
        gauge.append(float(np.abs(gram_matrix(duals, new)).max()))
    return coeffs, corr, residuals, gauge


def _check_order(order, max_order):
    if order < 1:
        raise ValueError("expansion order must be >= 1")
    if order > max_order:
        raise ValueError(f"expansion order {order} exceeds the cap {max_order}; raise max_order explicitly")


def expand_slow(split: FastSlowSplit, L1: Superoperator, order, residual_tol=RESIDUAL_TOL,
                max_order=MAX_ORDER) -> SlowExpansion:
    """Slow-manifold recursion for ``F^(n)`` and ``S_d^(n)``."""
    _check_order(order, max_order)
    coeffs, corr, res, gauge = _run_recursion(
        split.S, split.J, split.L0, L1, split.R, order, residual_tol, IMAG_TOL
    )
    return SlowExpansion(order, coeffs, corr, res, gauge)


def expand_fast(split: FastSlowSplit, L1_adj: Superoperator, order, residual_tol=RESIDUAL_TOL,
                max_order=MAX_ORDER) -> FastExpansion:
    """Heisenberg recursion for ``G^(n)`` and ``J_d^(n)``.

    The gauge ``Tr(S_a J_b^(n)) = 0`` is imposed by the adjoint resolvent.
    """
    _check_order(order, max_order)
    coeffs, corr, res, gauge = _run_recursion(
        split.J, split.S, split.L0_adj, L1_adj, split.R_adj, order, residual_tol, IMAG_TOL
    )
    return FastExpansion(order, coeffs, corr, res, gauge)


@dataclass(frozen=True, eq=False)
class PairingMatrix:
    """``E_ab(eps) = Tr(J_a(eps) S_b(eps))`` from truncated series."""

    eps: float
    E: np.ndarray
    order: int

    def solve(self, x):
        """``E^{-1} x`` by a linear solve."""
        return np.linalg.solve(self.E, np.asarray(x, dtype=float))

    @property
    def inverse(self):
        return self.solve(np.eye(len(self.E)))


def pairing_matrix(slow: SlowExpansion, fast: FastExpansion, eps, order=None, cond_limit=1e12,
                   truncation="consistent") -> PairingMatrix:
    """``E(eps)`` from the truncated series of ``J(eps)`` and ``S(eps)``.

    ``truncation="consistent"`` keeps ``sum_{k+l<=N} eps^(k+l) Tr(J^(k) S^(l))``,
    the order-N truncation of the product.  ``"product"`` pairs the two
    truncated sums directly, which adds incomplete terms of order N+1..2N.
    """
    if slow.order != fast.order:
        raise ValueError(f"expansions have different orders ({slow.order} vs {fast.order})")
    order = slow.order if order is None else slow._check_order(order)
    if truncation == "consistent":
        E = sum(
            eps ** n * sum(gram_matrix(fast.corrections[k], slow.corrections[n - k]) for k in range(n + 1))
            for n in range(order + 1)
        )
    elif truncation == "product":
        E = gram_matrix(fast.operator_series(eps, order), slow.operator_series(eps, order))
    else:
        raise ValueError(f"unknown truncation {truncation!r}; use 'consistent' or 'product'")
    if np.abs(E.imag).max() > IMAG_TOL * max(1.0, np.abs(E).max()):
        raise RecursionInconsistencyError("pairing matrix has a non-negligible imaginary part")
    E = E.real
    if not np.all(np.isfinite(E)) or np.linalg.cond(E) > cond_limit:
        raise RegimeExceededError(f"pairing matrix is singular at eps={eps:g}; eps is beyond the valid regime")
    return PairingMatrix(float(eps), E, order)


def truncated_F(slow: SlowExpansion, eps, order=None):
    """``sum_{n=1}^{N} eps^n F^(n)``."""
    return slow.generator(eps, order)


def validity_parameter(split: FastSlowSplit, L1: Superoperator, eps, warn=True):
    """Dimensionless small parameter ``eps ||L1||_2 / gamma``."""
    value = float(eps * L1.norm() / split.gamma)
    if warn and value > VALIDITY_WARN:
        warnings.warn(
            f"eps*||L1||/gamma = {value:.3g} exceeds {VALIDITY_WARN}; the truncated series may be inaccurate",
            stacklevel=2,
        )
    return value


def term_norms(expansion: Expansion, eps):
    """``||eps^n C^(n)||_2`` for n = 1..order (convergence sanity report)."""
    return [float(eps ** n * np.linalg.norm(expansion.coefficients[n], 2)) for n in range(1, expansion.order + 1)]


def series_decreasing(expansion: Expansion, eps, floor=1e-14):
    """True when the nonzero terms of the series shrink with the order."""
    norms = [v for v in term_norms(expansion, eps) if v > floor]
    return all(b <= a for a, b in zip(norms, norms[1:]))
