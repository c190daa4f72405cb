"""GKSL generators in the Schrödinger and Heisenberg pictures."""

from dataclasses import dataclass, field
from typing import List, Sequence, Union

import numpy as np

from ._validation import HERMITICITY_TOL, check_hermitian, check_square
from .exceptions import DimensionError
from .operators import Superoperator, spost, spre, sprepost


@dataclass(frozen=True, eq=False)
class GeneratorSpec:
    """Hamiltonian (rate units, hbar = 1) and collapse operators of one generator.

    Collapse operators enter as given: a rate ``k`` is encoded by passing
    ``sqrt(k) * L``.
    """

    hamiltonian: np.ndarray
    collapse_ops: List[np.ndarray] = field(default_factory=list)
    hermiticity_tol: float = field(default=HERMITICITY_TOL, repr=False)

    def __post_init__(self):
        H = check_hermitian(self.hamiltonian, "hamiltonian", self.hermiticity_tol)
        dim = H.shape[0]
        ops = [check_square(L, f"collapse_ops[{k}]", dim) for k, L in enumerate(self.collapse_ops)]
        object.__setattr__(self, "hamiltonian", H)
        object.__setattr__(self, "collapse_ops", ops)

    @property
    def dim(self):
        return self.hamiltonian.shape[0]

    @classmethod
    def zero(cls, dim):
        return cls(np.zeros((dim, dim), dtype=complex), [])


@dataclass(frozen=True, eq=False)
class GKSLModel:
    """``d rho/dt = L0(rho) + eps L1(rho)`` with fast ``L0`` and slow ``L1``."""

    fast: GeneratorSpec
    slow: GeneratorSpec
    epsilon: Union[float, Sequence[float]] = 0.05

    def __post_init__(self):
        if self.fast.dim != self.slow.dim:
            raise DimensionError(f"fast (D={self.fast.dim}) and slow (D={self.slow.dim}) generators differ in dimension")
        eps = np.atleast_1d(np.asarray(self.epsilon, dtype=float))
        if eps.size == 0 or np.any(~np.isfinite(eps)) or np.any(eps <= 0):
            raise ValueError("epsilon must be positive (a number or a non-empty list)")

    @property
    def dim(self):
        return self.fast.dim

    @property
    def epsilons(self):
        return [float(e) for e in np.atleast_1d(self.epsilon)]


def lindblad_map(spec: GeneratorSpec):
    """Operator-level ``rho -> -i[H, rho] + sum_k (L rho L^+ - {L^+ L, rho}/2)``."""
    H = spec.hamiltonian
    ops = [(L, L.conj().T, L.conj().T @ L) for L in spec.collapse_ops]

    def apply(rho):
        out = -1j * (H @ rho - rho @ H)
        for L, Ld, LdL in ops:
            out += L @ rho @ Ld - 0.5 * (LdL @ rho + rho @ LdL)
        return out

    return apply


def adjoint_lindblad_map(spec: GeneratorSpec):
    """Operator-level ``W -> i[H, W] + sum_k (L^+ W L - {L^+ L, W}/2)``."""
    H = spec.hamiltonian
    ops = [(L, L.conj().T, L.conj().T @ L) for L in spec.collapse_ops]

    def apply(W):
        out = 1j * (H @ W - W @ H)
        for L, Ld, LdL in ops:
            out += Ld @ W @ L - 0.5 * (LdL @ W + W @ LdL)
        return out

    return apply


def build_lindbladian(spec: GeneratorSpec) -> Superoperator:
    H = spec.hamiltonian
    M = -1j * (spre(H) - spost(H))
    for L in spec.collapse_ops:
        LdL = L.conj().T @ L
        M = M + sprepost(L, L.conj().T) - 0.5 * (spre(LdL) + spost(LdL))
    return Superoperator(spec.dim, M, lindblad_map(spec))


def build_adjoint_lindbladian(spec: GeneratorSpec) -> Superoperator:
    H = spec.hamiltonian
    M = 1j * (spre(H) - spost(H))
    for L in spec.collapse_ops:
        LdL = L.conj().T @ L
        M = M + sprepost(L.conj().T, L) - 0.5 * (spre(LdL) + spost(LdL))
    return Superoperator(spec.dim, M, adjoint_lindblad_map(spec))


def total_generator(model: GKSLModel, eps) -> Superoperator:
    """``L0 + eps L1`` as a superoperator."""
    if eps < 0:
        raise ValueError("eps must be nonnegative")
    L0 = build_lindbladian(model.fast)
    L1 = build_lindbladian(model.slow)
    f0, f1 = L0.func, L1.func
    return Superoperator(model.dim, L0.matrix + eps * L1.matrix, lambda X: f0(X) + eps * f1(X))
