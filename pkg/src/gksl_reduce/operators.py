"""Operator arithmetic: Frobenius pairing, vectorization, superoperators, Choi.

Vectorization is column-stacking everywhere in the package, so that
``vec(A @ X @ B) == kron(B.T, A) @ vec(X)``.  Superoperator matrices, the
Choi transform and the JSON reports all assume this convention.
"""

from dataclasses import dataclass, field
from typing import Callable, Optional, Sequence

import numpy as np

from ._validation import HERMITICITY_TOL, check_hermitian, check_same_shape, check_square
from .exceptions import DegenerateBasisError, DimensionError


def frobenius_inner(A, B):
    """Return ``Tr(A^dagger B)``."""
    A = np.asarray(A)
    B = np.asarray(B)
    check_same_shape(A, B)
    return complex(np.vdot(A, B))


def vectorize(X):
    """Column-stack a square operator into a vector of length ``D**2``."""
    X = check_square(X, "operator")
    return X.reshape(-1, order="F")


def devectorize(v):
    """Inverse of :func:`vectorize`."""
    v = np.asarray(v)
    if v.ndim != 1:
        raise DimensionError(f"expected a 1-D vector, got shape {v.shape}")
    dim = int(round(np.sqrt(v.size)))
    if dim * dim != v.size:
        raise DimensionError(f"vector length {v.size} is not a perfect square")
    return v.reshape(dim, dim, order="F")


def spre(A):
    """Matrix of ``X -> A X``."""
    return np.kron(np.eye(A.shape[0]), A)


def spost(B):
    """Matrix of ``X -> X B``."""
    return np.kron(B.T, np.eye(B.shape[0]))


def sprepost(A, B):
    """Matrix of ``X -> A X B``."""
    return np.kron(B.T, A)


@dataclass(frozen=True, eq=False)
class Superoperator:
    """Linear map on ``D x D`` operators, stored as a ``D**2 x D**2`` matrix.

    ``func`` optionally carries the operator-level form of the same map.
    It is used by :meth:`apply` to avoid a ``D**4`` matrix-vector product;
    the matrix stays the reference for anything spectral.
    """

    dim: int
    matrix: np.ndarray
    func: Optional[Callable] = field(default=None, repr=False)

    def __post_init__(self):
        matrix = np.asarray(self.matrix, dtype=complex)
        n = self.dim * self.dim
        if matrix.shape != (n, n):
            raise DimensionError(f"superoperator on D={self.dim} needs shape {(n, n)}, got {matrix.shape}")
        object.__setattr__(self, "matrix", matrix)

    @classmethod
    def from_map(cls, func, dim):
        """Tabulate an operator-level linear map on the matrix-unit basis."""
        n = dim * dim
        matrix = np.empty((n, n), dtype=complex)
        for k in range(n):
            unit = np.zeros(n, dtype=complex)
            unit[k] = 1.0
            matrix[:, k] = vectorize(func(devectorize(unit)))
        return cls(dim, matrix, func)

    @classmethod
    def identity(cls, dim):
        return cls(dim, np.eye(dim * dim, dtype=complex), lambda X: np.array(X, dtype=complex))

    def apply(self, X):
        X = np.asarray(X, dtype=complex)
        if X.shape != (self.dim, self.dim):
            raise DimensionError(f"operator must be {self.dim}x{self.dim}, got {X.shape}")
        if self.func is not None:
            return np.asarray(self.func(X), dtype=complex)
        return devectorize(self.matrix @ vectorize(X))

    __call__ = apply

    def adjoint(self):
        """Adjoint with respect to the Frobenius product: conjugate transpose."""
        return Superoperator(self.dim, self.matrix.conj().T)

    def __matmul__(self, other):
        if not isinstance(other, Superoperator):
            return NotImplemented
        if other.dim != self.dim:
            raise DimensionError("cannot compose superoperators of different dimensions")
        return Superoperator(self.dim, self.matrix @ other.matrix)

    def __add__(self, other):
        if not isinstance(other, Superoperator):
            return NotImplemented
        if other.dim != self.dim:
            raise DimensionError("cannot add superoperators of different dimensions")
        return Superoperator(self.dim, self.matrix + other.matrix)

    def __sub__(self, other):
        if not isinstance(other, Superoperator):
            return NotImplemented
        return self + other.scaled(-1.0)

    def scaled(self, factor):
        func = None
        if self.func is not None:
            inner = self.func
            func = lambda X: factor * inner(X)  # noqa: E731
        return Superoperator(self.dim, factor * self.matrix, func)

    def norm(self, ord=2):
        return float(np.linalg.norm(self.matrix, ord))


def canonical_hermitian_basis(dim):
    """Fixed Frobenius-orthonormal Hermitian basis used for deterministic ordering.

    The identity (normalized) comes first, followed by matrix-unit
    combinations in lexicographic ``(i, j)`` order with ``i <= j``:
    ``E_ii`` for diagonal entries and ``(E_ij + E_ji)/sqrt2``,
    ``-1j (E_ij - E_ji)/sqrt2`` off the diagonal.  The result spans the
    Hermitian operators; it is over-complete by one element (the identity).
    """
    basis = [np.eye(dim, dtype=complex) / np.sqrt(dim)]
    for i in range(dim):
        for j in range(i, dim):
            if i == j:
                E = np.zeros((dim, dim), dtype=complex)
                E[i, i] = 1.0
                basis.append(E)
            else:
                sym = np.zeros((dim, dim), dtype=complex)
                sym[i, j] = sym[j, i] = 1 / np.sqrt(2)
                anti = np.zeros((dim, dim), dtype=complex)
                anti[i, j] = -1j / np.sqrt(2)
                anti[j, i] = 1j / np.sqrt(2)
                basis.extend([sym, anti])
    return basis


def orthonormalize_hermitian(basis: Sequence, tol=HERMITICITY_TOL):
    """Real-linear Gram-Schmidt of Hermitian operators under ``Tr(A B)``.

    Raises
    ------
    DegenerateBasisError
        If an element is (numerically) in the real span of its predecessors.
    """
    out = []
    for k, X in enumerate(basis):
        X = check_hermitian(X, f"basis[{k}]")
        X = (X + X.conj().T) / 2
        scale = np.linalg.norm(X)
        Y = X.copy()
        # two passes of modified Gram-Schmidt keep the Gram matrix at machine precision
        for _ in range(2):
            for S in out:
                Y = Y - np.vdot(S, Y).real * S
        norm = np.linalg.norm(Y)
        if scale == 0 or norm <= tol * scale * max(1, len(out)):
            raise DegenerateBasisError(f"basis element {k} is linearly dependent on the previous ones")
        Y = Y / norm
        out.append((Y + Y.conj().T) / 2)
    return out


def gram_matrix(left, right=None):
    """Matrix of Frobenius pairings ``Tr(left[a]^dagger right[b])``."""
    right = left if right is None else right
    return np.array([[np.vdot(A, B) for B in right] for A in left])


def choi_matrix(S: Superoperator):
    """Unnormalized Choi matrix ``sum_ij E_ij (x) S(E_ij)``.

    Its trace equals ``D`` for a trace-preserving map; the map is completely
    positive iff the Choi matrix is positive semidefinite.
    """
    D = S.dim
    # M4[k, l, i, j] = <k| S(E_ij) |l> under column stacking
    M4 = S.matrix.reshape(D, D, D, D, order="F")
    return M4.transpose(2, 0, 3, 1).reshape(D * D, D * D)


def cp_tp_diagnostics(S: Superoperator):
    """Smallest Choi eigenvalue and worst-case trace defect of a superoperator.

    The trace defect is ``max |Tr S(E_ij) - Tr E_ij|`` over matrix units,
    which have unit Frobenius norm.
    """
    C = choi_matrix(S)
    min_eig = float(np.linalg.eigvalsh((C + C.conj().T) / 2).min())
    vec_identity = vectorize(np.eye(S.dim))
    trace_functional = vec_identity @ S.matrix
    trace_defect = float(np.abs(trace_functional - vec_identity).max())
    return {"min_choi_eigenvalue": min_eig, "trace_defect": trace_defect}
