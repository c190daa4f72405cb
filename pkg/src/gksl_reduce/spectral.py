"""Slow/fast splitting of the fast generator.

The kernel of ``L0`` (the quasi-equilibria) is extracted from an ordered
complex Schur form of the vectorized generator, and the projector onto it
along the fast invariant subspace is obtained by block-diagonalizing that
Schur form with a Sylvester solve.  Long-time exponentials are only used
as cross-checks in the tests.
"""

from dataclasses import dataclass, field
from typing import List, Optional

import numpy as np
import scipy.linalg as sla

from .exceptions import (
    DegenerateBasisError,
    HypothesisViolatedError,
    IllConditionedSplitError,
    NonSemisimpleKernelError,
    SingularResolventError,
)
from .operators import (
    Superoperator,
    canonical_hermitian_basis,
    devectorize,
    gram_matrix,
    orthonormalize_hermitian,
    vectorize,
)

ZERO_TOL = 1e-8
BIORTHOGONALITY_TOL = 1e-8
RESOLVENT_TOL = 1e-10
# canonical elements whose new direction inside the kernel is shorter than this are skipped
_OVERLAP_FLOOR = 1e-3


@dataclass(frozen=True)
class SpectralGap:
    zero_group: np.ndarray
    fast_group: np.ndarray
    gamma: float
    norm: float
    zero_tol: float

    @property
    def dbar(self):
        return len(self.zero_group)


def _ordered_schur(matrix, radius):
    """Complex Schur form with eigenvalues of modulus <= radius leading."""
    T, Q, k = sla.schur(matrix, output="complex", sort=lambda z: abs(z) <= radius)
    return T, Q, k


def spectral_gap_analysis(L0: Superoperator, zero_tol=ZERO_TOL) -> SpectralGap:
    """Split the spectrum of ``L0`` into the zero cluster and the decaying rest.

    ``zero_tol`` is relative to the spectral norm of ``L0``.  ``gamma`` is the
    smallest decay rate ``-Re(lambda)`` over the fast group.

    Raises
    ------
    HypothesisViolatedError
        No fast eigenvalues, or a fast eigenvalue that is not strictly decaying.
    NonSemisimpleKernelError
        The zero eigenvalue is defective.
    """
    M = L0.matrix
    norm = float(np.linalg.norm(M, 2))
    if norm == 0.0:
        raise HypothesisViolatedError("hypothesis violated: no spectral gap (fast generator is zero)")
    radius = zero_tol * norm
    eigs = np.linalg.eigvals(M)

    # a Jordan block at zero splits its eigenvalues by ~sqrt(machine eps), so
    # compare the geometric multiplicity with a loose cluster as well
    singular_values = np.linalg.svd(M, compute_uv=False)
    geometric = int(np.sum(singular_values <= radius))
    in_zero = np.abs(eigs) <= radius
    near = np.abs(eigs) <= np.sqrt(zero_tol) * norm
    split_jordan = near.sum() > geometric and np.any(eigs[near & ~in_zero].real >= -radius)
    if split_jordan or int(in_zero.sum()) != geometric:
        raise NonSemisimpleKernelError(
            f"zero eigenvalue is not semisimple (geometric multiplicity {geometric}, "
            f"eigenvalues near zero {int(max(near.sum(), in_zero.sum()))})"
        )
    zero_group = eigs[in_zero]
    fast_group = eigs[~in_zero]
    if fast_group.size == 0:
        raise HypothesisViolatedError("hypothesis violated: no spectral gap (every eigenvalue is zero)")
    marginal = fast_group[fast_group.real >= -radius]
    if marginal.size:
        kind = "oscillating" if np.any(np.abs(marginal.imag) > radius) else "marginal"
        raise HypothesisViolatedError(
            f"hypothesis violated: no spectral gap ({kind} eigenvalue {marginal[0]:.6g} outside the zero group)"
        )
    if zero_group.size == 0:
        raise HypothesisViolatedError("hypothesis violated: fast generator has a trivial kernel")
    # order: zero group by modulus, fast group by decay rate
    zero_group = zero_group[np.argsort(np.abs(zero_group), kind="stable")]
    fast_group = fast_group[np.lexsort((fast_group.imag, -fast_group.real))]
    gamma = float(-fast_group.real.max())
    return SpectralGap(zero_group, fast_group, gamma, norm, zero_tol)


def _kernel_projector(L0: Superoperator, gap: SpectralGap):
    """Spectral projector onto ker L0 along the fast invariant subspace.

    Returns the projector matrix and an orthonormal basis (columns) of the
    kernel.  With ``L0 = Q [[T11, T12], [0, T22]] Q^H``, the projector is
    ``Q [[I, -X], [0, 0]] Q^H`` where ``T11 X - X T22 = -T12``.
    """
    T, Q, k = _ordered_schur(L0.matrix, gap.zero_tol * gap.norm)
    if k != gap.dbar:
        raise NonSemisimpleKernelError(f"Schur reordering found {k} zero eigenvalues, expected {gap.dbar}")
    T11, T12, T22 = T[:k, :k], T[:k, k:], T[k:, k:]
    if np.linalg.norm(T11) > np.sqrt(gap.zero_tol) * gap.norm:
        raise NonSemisimpleKernelError("zero block of the Schur form is not numerically zero")
    X = sla.solve_sylvester(T11, -T22, -T12)
    P = np.zeros_like(T)
    P[:k, :k] = np.eye(k)
    P[:k, k:] = -X
    return Q @ P @ Q.conj().T, Q[:, :k]


def _hermitian_coordinates(X):
    v = vectorize(X)
    return np.concatenate([v.real, v.imag])


def compute_slow_basis(L0: Superoperator, gap: Optional[SpectralGap] = None, kernel=None) -> List[np.ndarray]:
    """Frobenius-orthonormal Hermitian basis of ``ker L0`` in a reproducible order.

    The kernel is closed under ``X -> X^dagger``, so it is the complex span of
    its Hermitian part.  The canonical Hermitian basis (identity first, then
    matrix units in lexicographic order) is projected onto that Hermitian
    part and orthonormalized in order, skipping elements that add no new
    direction.  The result is independent of the eigensolver's basis choice.
    """
    if gap is None:
        gap = spectral_gap_analysis(L0)
    if kernel is None:
        _, kernel = _kernel_projector(L0, gap)
    D, k = L0.dim, gap.dbar

    candidates = []
    for j in range(k):
        X = devectorize(kernel[:, j])
        candidates.append((X + X.conj().T) / 2)
        candidates.append((X - X.conj().T) / 2j)
    A = np.array([_hermitian_coordinates(C) for C in candidates]).T
    U, s, _ = np.linalg.svd(A, full_matrices=False)
    rank = int(np.sum(s > 1e-8 * s.max())) if s.size and s.max() > 0 else 0
    if rank != k:
        raise DegenerateBasisError(f"Hermitian part of the kernel has rank {rank}, expected {k}")
    U = U[:, :rank]

    canonical = canonical_hermitian_basis(D)
    projected = [U @ (U.T @ _hermitian_coordinates(C)) for C in canonical]

    chosen, accepted = [], []
    for floor in (_OVERLAP_FLOOR, 0.0):
        for idx, p in enumerate(projected):
            if len(chosen) == k:
                break
            if idx in accepted:
                continue
            r = p.copy()
            for q in chosen:
                r -= (q @ r) * q
            n = np.linalg.norm(r)
            if n > max(floor, 1e-8):
                chosen.append(r / n)
                accepted.append(idx)
    if len(chosen) != k:
        raise DegenerateBasisError("could not extract a Hermitian basis of the kernel")

    half = D * D
    ops = [devectorize(c[:half] + 1j * c[half:]) for c in chosen]
    return orthonormalize_hermitian(ops)


def compute_kbar(L0: Superoperator, gap: Optional[SpectralGap] = None) -> Superoperator:
    """The channel ``lim_{t->inf} exp(t L0)`` as a spectral projector."""
    if gap is None:
        gap = spectral_gap_analysis(L0)
    P, _ = _kernel_projector(L0, gap)
    return Superoperator(L0.dim, P)


def compute_invariant_operators(Kbar_adj: Superoperator, S, tol=BIORTHOGONALITY_TOL) -> List[np.ndarray]:
    """``J_d = Kbar^*(S_d)``, Hermitized, with a biorthogonality check."""
    J = []
    for s in S:
        X = Kbar_adj.apply(s)
        J.append((X + X.conj().T) / 2)
    defect = np.abs(gram_matrix(J, S) - np.eye(len(S))).max() if S else 0.0
    if defect > tol:
        raise IllConditionedSplitError(f"Tr(J_d S_d') deviates from the identity by {defect:.3g}")
    return J


class PseudoResolvent:
    """Solver for ``L(X) = P(W) - W`` with ``P(X) = 0``.

    ``L`` is the generator (``L0`` or its adjoint) and ``P`` the matching
    kernel projector.  Since ``L + P`` is invertible and maps the fast
    subspace onto itself, ``X = (I - P)(L + P)^{-1}(P(W) - W)``; the final
    projection removes roundoff drift into the kernel.
    """

    def __init__(self, generator: Superoperator, projector: Superoperator, tol=RESOLVENT_TOL):
        self.generator = generator
        self.projector = projector
        self.dim = generator.dim
        self.tol = tol
        self._scale = max(1.0, generator.norm())
        self._lu = sla.lu_factor(generator.matrix + projector.matrix)
        self._superoperator = None

    def apply_vec(self, w):
        P = self.projector.matrix
        rhs = P @ w - w
        x = sla.lu_solve(self._lu, rhs)
        x = x - P @ x
        residual = np.linalg.norm(self.generator.matrix @ x - rhs)
        if residual > self.tol * self._scale * max(np.linalg.norm(w), np.finfo(float).tiny):
            raise SingularResolventError(f"pseudo-resolvent residual {residual:.3g} exceeds tolerance")
        return x

    def apply(self, W):
        return devectorize(self.apply_vec(vectorize(np.asarray(W, dtype=complex))))

    __call__ = apply

    @property
    def superoperator(self) -> Superoperator:
        if self._superoperator is None:
            n = self.dim * self.dim
            P = self.projector.matrix
            X = sla.lu_solve(self._lu, P - np.eye(n))
            self._superoperator = Superoperator(self.dim, X - P @ X, self.apply)
        return self._superoperator


def resolvent_R(L0: Superoperator, Kbar: Superoperator, tol=RESOLVENT_TOL) -> PseudoResolvent:
    """``R(W)``: the solution of ``L0(X) = Kbar(W) - W`` with ``Tr(J_d X) = 0``."""
    return PseudoResolvent(L0, Kbar, tol)


def resolvent_R_adj(L0_adj: Superoperator, Kbar_adj: Superoperator, tol=RESOLVENT_TOL) -> PseudoResolvent:
    """``R^*(W)``: the solution of ``L0^*(X) = Kbar^*(W) - W`` with ``Tr(S_d X) = 0``."""
    return PseudoResolvent(L0_adj, Kbar_adj, tol)


@dataclass(frozen=True, eq=False)
class FastSlowSplit:
    """Everything the recursions need from the fast generator."""

    L0: Superoperator
    L0_adj: Superoperator
    gap: SpectralGap
    S: List[np.ndarray]
    J: List[np.ndarray]
    Kbar: Superoperator
    Kbar_adj: Superoperator
    R: PseudoResolvent = field(repr=False)
    R_adj: PseudoResolvent = field(repr=False)

    @property
    def dbar(self):
        return len(self.S)

    @property
    def gamma(self):
        return self.gap.gamma

    @property
    def S_matrix(self):
        """Columns ``vec(S_d)``."""
        return np.array([vectorize(s) for s in self.S]).T

    @property
    def J_matrix(self):
        """Columns ``vec(J_d)``."""
        return np.array([vectorize(j) for j in self.J]).T

    def slow_coordinates(self, rho):
        """``x_d = Tr(J_d rho)`` (real part)."""
        return (self.J_matrix.conj().T @ vectorize(rho)).real

    def lift(self, x):
        """``sum_d x_d S_d``."""
        return devectorize(self.S_matrix @ np.asarray(x, dtype=complex))

    def residuals(self):
        """Max-norm defects of the structural identities of the split."""
        k = self.dbar
        n = self.L0.dim ** 2
        scale = max(1.0, self.gap.norm)
        K, L0 = self.Kbar.matrix, self.L0.matrix
        return {
            "orthonormality": float(np.abs(gram_matrix(self.S) - np.eye(k)).max()),
            "biorthogonality": float(np.abs(gram_matrix(self.J, self.S) - np.eye(k)).max()),
            "kernel_S": max(float(np.abs(self.L0.apply(s)).max()) for s in self.S) / scale,
            "kernel_J": max(float(np.abs(self.L0_adj.apply(j)).max()) for j in self.J) / scale,
            "idempotence": float(np.abs(K @ K - K).max()),
            "resolvent_identity": float(np.abs(L0 @ self.R.superoperator.matrix - (K - np.eye(n))).max()),
        }


def fast_slow_split(L0: Superoperator, L0_adj: Optional[Superoperator] = None, zero_tol=ZERO_TOL,
                    resolvent_tol=RESOLVENT_TOL) -> FastSlowSplit:
    """Run the full spectral pipeline on a fast generator."""
    if L0_adj is None:
        L0_adj = L0.adjoint()
    gap = spectral_gap_analysis(L0, zero_tol)
    P, kernel = _kernel_projector(L0, gap)
    Kbar = Superoperator(L0.dim, P)
    Kbar_adj = Kbar.adjoint()
    S = compute_slow_basis(L0, gap, kernel)
    J = compute_invariant_operators(Kbar_adj, S)
    return FastSlowSplit(
        L0=L0,
        L0_adj=L0_adj,
        gap=gap,
        S=S,
        J=J,
        Kbar=Kbar,
        Kbar_adj=Kbar_adj,
        R=resolvent_R(L0, Kbar, resolvent_tol),
        R_adj=resolvent_R_adj(L0_adj, Kbar_adj, resolvent_tol),
    )
