"""One-call pipeline: generators, split and both expansions for a model."""

from dataclasses import dataclass

from .expansion import (
    MAX_ORDER,
    RESIDUAL_TOL,
    FastExpansion,
    SlowExpansion,
    expand_fast,
    expand_slow,
    pairing_matrix,
    truncated_F,
    validity_parameter,
)
from .lindblad import GKSLModel, build_adjoint_lindbladian, build_lindbladian
from .operators import Superoperator
from .spectral import RESOLVENT_TOL, ZERO_TOL, FastSlowSplit, fast_slow_split


@dataclass(frozen=True, eq=False)
class Reduction:
    model: GKSLModel
    L0: Superoperator
    L1: Superoperator
    L1_adj: Superoperator
    split: FastSlowSplit
    slow: SlowExpansion
    fast: FastExpansion

    @property
    def order(self):
        return self.slow.order

    @property
    def dbar(self):
        return self.split.dbar

    @property
    def gamma(self):
        return self.split.gamma

    def total_generator(self, eps):
        L0, L1 = self.L0, self.L1
        return Superoperator(L0.dim, L0.matrix + eps * L1.matrix, lambda X: L0.apply(X) + eps * L1.apply(X))

    def F(self, eps, order=None):
        return truncated_F(self.slow, eps, order)

    def pairing(self, eps, order=None, truncation="consistent"):
        return pairing_matrix(self.slow, self.fast, eps, order, truncation=truncation)

    def validity(self, eps, warn=True):
        return validity_parameter(self.split, self.L1, eps, warn)


def reduce_model(model: GKSLModel, order=2, zero_tol=ZERO_TOL, residual_tol=RESIDUAL_TOL,
                 resolvent_tol=RESOLVENT_TOL, max_order=MAX_ORDER) -> Reduction:
    """Build generators, split the fast dynamics and run both recursions to ``order``."""
    L0 = build_lindbladian(model.fast)
    L0_adj = build_adjoint_lindbladian(model.fast)
    L1 = build_lindbladian(model.slow)
    L1_adj = build_adjoint_lindbladian(model.slow)
    split = fast_slow_split(L0, L0_adj, zero_tol=zero_tol, resolvent_tol=resolvent_tol)
    slow = expand_slow(split, L1, order, residual_tol, max_order)
    fast = expand_fast(split, L1_adj, order, residual_tol, max_order)
    return Reduction(model, L0, L1, L1_adj, split, slow, fast)
