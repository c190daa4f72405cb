"""Adiabatic elimination of slow/fast GKSL master equations in the Heisenberg picture.

Given ``d rho/dt = L0(rho) + eps L1(rho)`` with a gapped fast generator
``L0``, the package computes the slow manifold ``S_d(eps)``, the invariant
operators ``J_d(eps)`` and the reduced generator ``F(eps)`` order by order,
and checks them against exact propagation.
"""

__version__ = "0.1.0"

from .exceptions import (  # noqa: E402
    DegenerateBasisError,
    DimensionError,
    ExponentialRangeError,
    HypothesisViolatedError,
    IllConditionedSplitError,
    NonFiniteError,
    NonSemisimpleKernelError,
    NotHermitianError,
    RecursionInconsistencyError,
    ReductionError,
    RegimeExceededError,
    SingularResolventError,
)
from .lindblad import GeneratorSpec, GKSLModel, build_adjoint_lindbladian, build_lindbladian  # noqa: E402
from .operators import Superoperator, choi_matrix, cp_tp_diagnostics  # noqa: E402
from .spectral import FastSlowSplit, fast_slow_split, spectral_gap_analysis  # noqa: E402
from .expansion import expand_fast, expand_slow, pairing_matrix  # noqa: E402
from .reduction import Reduction, reduce_model  # noqa: E402
from .propagate import full_slow_map, reduced_trajectory, second_order_reduced_map  # noqa: E402
from .validation import order_scaling, validate_closeness, validate_second_order  # noqa: E402
from .zoo import ZOO, zoo_build, zoo_names  # noqa: E402
from .estimator import AdiabaticElimination  # noqa: E402

__all__ = [
    "AdiabaticElimination",
    "DegenerateBasisError",
    "DimensionError",
    "ExponentialRangeError",
    "FastSlowSplit",
    "GKSLModel",
    "GeneratorSpec",
    "HypothesisViolatedError",
    "IllConditionedSplitError",
    "NonFiniteError",
    "NonSemisimpleKernelError",
    "NotHermitianError",
    "RecursionInconsistencyError",
    "Reduction",
    "ReductionError",
    "RegimeExceededError",
    "SingularResolventError",
    "Superoperator",
    "ZOO",
    "build_adjoint_lindbladian",
    "build_lindbladian",
    "choi_matrix",
    "cp_tp_diagnostics",
    "expand_fast",
    "expand_slow",
    "fast_slow_split",
    "full_slow_map",
    "order_scaling",
    "pairing_matrix",
    "reduce_model",
    "reduced_trajectory",
    "second_order_reduced_map",
    "spectral_gap_analysis",
    "validate_closeness",
    "validate_second_order",
    "zoo_build",
    "zoo_names",
]
