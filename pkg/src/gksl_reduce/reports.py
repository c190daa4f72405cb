"""Report assembly for the ``reduce``, ``validate`` and ``sweep`` commands.

Reports are plain dicts of JSON-ready values.  Everything except the
``generated_at`` field is a deterministic function of the model file, the
settings and the seed.
"""

import datetime
import logging
import warnings
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass, field
from typing import Dict, List, Optional

import numpy as np
import scipy.linalg as sla

from . import __version__
from .expansion import MAX_ORDER, RESIDUAL_TOL, series_decreasing, term_norms
from .io import ModelFile, digest
from .operators import cp_tp_diagnostics
from .propagate import default_initial_state, exact_slow_state, lift_slow_map
from .reduction import Reduction, reduce_model
from .spectral import RESOLVENT_TOL, ZERO_TOL
from .validation import (
    ABS_FLOOR,
    SLOPE_BAND,
    _slope_check,
    default_time_grid,
    fit_loglog_slope,
    slow_coordinate_error,
    validate_closeness,
    validate_second_order,
)

logger = logging.getLogger(__name__)

TOOL_NAME = "gksl-reduce"
STRUCTURE_TOL = 1e-10
GAUGE_TOL = 1e-10
DEFAULT_SWEEP_EPS = (0.02, 0.04, 0.08, 0.16)
PAIRING_FLOOR = 1e-13

CONVENTIONS = {
    "vectorization": "column stacking: vec(A X B) = kron(B.T, A) vec(X)",
    "matrix_encoding": "row-major nested lists of [re, im] pairs",
    "choi_normalization": "unnormalized, sum_ij E_ij (x) Phi(E_ij); trace equals D for trace-preserving maps",
    "F_orientation": "F[n][a][b] = Tr(J_a L1(S_b^(n-1))); dx/dt = F(eps) x",
    "G_orientation": "G[n][a][b] = Tr(S_a L1*(J_b^(n-1))); G[1] equals F[1] transposed",
    "slow_gauge": "Tr(J_a S_b^(n)) = 0 for n >= 1",
    "fast_gauge": "Tr(S_a J_b^(n)) = 0 for n >= 1 (adopted convention; flagged)",
    "norms": "Frobenius on operators, l1 on slow coordinates",
}


@dataclass
class Settings:
    """Effective configuration after merging CLI flags, file tolerances and defaults."""

    order: int = 2
    zero_tol: float = ZERO_TOL
    residual_tol: float = RESIDUAL_TOL
    resolvent_tol: float = RESOLVENT_TOL
    max_order: int = MAX_ORDER
    seed: int = 0

    @classmethod
    def resolve(cls, model_file: ModelFile, **flags):
        """Precedence: explicit flags, then model-file values, then defaults."""
        values = asdict(cls())
        values["order"] = model_file.order
        values["seed"] = model_file.seed
        for key, value in model_file.tolerances.items():
            if key in values:
                values[key] = value
        for key, value in flags.items():
            if value is not None:
                values[key] = value
        values["max_order"] = int(max(values["max_order"], values["order"]))
        return cls(**values)


def _now():
    return datetime.datetime.now(datetime.timezone.utc).isoformat(timespec="seconds")


def _complex_list(values):
    return [[float(z.real), float(z.imag)] for z in np.asarray(values, dtype=complex)]


def _header(command, model_file: ModelFile, settings: Settings):
    raw = model_file.to_dict()
    return {
        "tool": {"name": TOOL_NAME, "version": __version__},
        "command": command,
        "generated_at": _now(),
        "model": {"digest": digest(raw), "echo": raw},
        "settings": asdict(settings),
        "conventions": CONVENTIONS,
    }


def run_reduction(model_file: ModelFile, settings: Settings) -> Reduction:
    return reduce_model(
        model_file.model,
        order=settings.order,
        zero_tol=settings.zero_tol,
        residual_tol=settings.residual_tol,
        resolvent_tol=settings.resolvent_tol,
        max_order=settings.max_order,
    )


def split_summary(reduction: Reduction):
    gap = reduction.split.gap
    return {
        "dbar": reduction.dbar,
        "gamma": gap.gamma,
        "generator_norm": gap.norm,
        "zero_eigenvalues": _complex_list(gap.zero_group),
        "fast_eigenvalues": _complex_list(gap.fast_group),
        "residuals": reduction.split.residuals(),
    }


def expansion_summary(reduction: Reduction):
    slow, fast = reduction.slow, reduction.fast
    return [
        {
            "n": n,
            "F": slow.F[n],
            "G": fast.G[n],
            "slow_residual": slow.residuals[n - 1],
            "fast_residual": fast.residuals[n - 1],
            "slow_gauge": slow.gauge[n - 1],
            "fast_gauge": fast.gauge[n - 1],
        }
        for n in range(1, reduction.order + 1)
    ]


def epsilon_summary(reduction: Reduction, eps, warn_log: List[str]):
    with warnings.catch_warnings(record=True) as caught:
        warnings.simplefilter("always")
        validity = reduction.validity(eps)
        decreasing = series_decreasing(reduction.slow, eps)
    warn_log.extend(f"eps={eps:g}: {w.message}" for w in caught)
    if not decreasing:
        warn_log.append(f"eps={eps:g}: terms eps^n ||F^(n)|| do not decrease with n")
    E = reduction.pairing(eps)
    return {
        "epsilon": float(eps),
        "validity_parameter": validity,
        "F_total": reduction.F(eps),
        "term_norms": term_norms(reduction.slow, eps),
        "series_decreasing": decreasing,
        "pairing_matrix": E.E,
        "pairing_condition": float(np.linalg.cond(E.E)),
    }


def structural_criteria(reduction: Reduction):
    res = reduction.split.residuals()
    structural = max(res.values())
    gauge = max(reduction.slow.gauge + reduction.fast.gauge, default=0.0)
    recursion = max(reduction.slow.residuals + reduction.fast.residuals, default=0.0)
    return {
        "structural_identities": {"value": structural, "tolerance": STRUCTURE_TOL,
                                  "passed": structural <= STRUCTURE_TOL},
        "gauge_conditions": {"value": gauge, "tolerance": GAUGE_TOL, "passed": gauge <= GAUGE_TOL},
        "recursion_residuals": {"value": recursion, "tolerance": RESIDUAL_TOL,
                                "passed": recursion <= RESIDUAL_TOL},
    }


def build_reduce_report(model_file: ModelFile, settings: Settings, reduction: Optional[Reduction] = None):
    reduction = run_reduction(model_file, settings) if reduction is None else reduction
    report = _header("reduce", model_file, settings)
    warn_log: List[str] = []
    report["split"] = split_summary(reduction)
    report["expansion"] = {"order": reduction.order, "orders": expansion_summary(reduction)}
    report["epsilon"] = [epsilon_summary(reduction, e, warn_log) for e in model_file.epsilons]
    report["criteria"] = structural_criteria(reduction)
    report["warnings"] = warn_log
    return report


def pairing_scaling(reduction: Reduction, eps_grid):
    """``||E(eps) - I||_2`` over the grid; its log-log slope should be close to 2."""
    values = [float(np.linalg.norm(reduction.pairing(e).E - np.eye(reduction.dbar), 2)) for e in eps_grid]
    return _slope_check(list(eps_grid), values, PAIRING_FLOOR, band=SLOPE_BAND)


def validation_grid(model_file: ModelFile):
    eps = model_file.epsilons
    return list(eps) if len(eps) >= 2 else list(DEFAULT_SWEEP_EPS)


def build_validate_report(model_file: ModelFile, settings: Settings, tbar=1.0, times=None,
                          eps_grid=None):
    """Reduce, then run the closeness, second-order and pairing checks."""
    if settings.order < 2:
        settings = Settings(**{**asdict(settings), "order": 2})
    reduction = run_reduction(model_file, settings)
    report = build_reduce_report(model_file, settings, reduction)
    report["command"] = "validate"
    warn_log = report["warnings"]
    eps_grid = validation_grid(model_file) if eps_grid is None else list(eps_grid)
    rho0 = default_initial_state(reduction.split, settings.seed)
    if times is None:
        times = default_time_grid(reduction.gamma)

    closeness = []
    for eps in model_file.epsilons:
        rep = validate_closeness(reduction, eps, rho0, times, settings.order)
        warn_log.extend(f"closeness eps={eps:g}: {w}" for w in rep.warnings)
        closeness.append(asdict(rep))
    second = validate_second_order(reduction, eps_grid, tbar, rho0)
    pairing = pairing_scaling(reduction, eps_grid)

    report["validation"] = {
        "initial_state": rho0,
        "closeness": closeness,
        "second_order": {**asdict(second), "passed": second.passed},
        "pairing_scaling": {"eps": eps_grid, **asdict(pairing)},
    }
    verdicts = [c["passed"] for c in closeness]
    report["criteria"]["closeness"] = {
        "passed": None if any(v is None for v in verdicts) else all(verdicts),
        "status": [c["status"] for c in closeness],
    }
    report["criteria"]["second_order"] = {"passed": second.passed, "status": second.state_error.status}
    report["criteria"]["pairing_scaling"] = {"passed": pairing.passed, "status": pairing.status}
    return report


@dataclass
class SweepRecord:
    epsilon: float
    order: int
    slow_coord_error: float
    state_error: float
    min_choi_eig: float
    trace_defect: float
    fitted_rate: Optional[float]


CSV_COLUMNS = ["epsilon", "order", "slow_coord_error", "state_error", "min_choi_eig", "trace_defect", "fitted_rate"]


def sweep_point(reduction: Reduction, rho0, eps, order, T, times) -> SweepRecord:
    """Errors of the order-``order`` reduction after time ``T`` at one ``eps``.

    ``state_error`` compares the exact slow state with ``sum_d x_d S_d`` for
    ``x = exp(T F_N(eps)) x(0)``; the CP/TP columns diagnose the lifted map
    ``S exp(T F_N) J^+``.  ``fitted_rate`` is the closeness-check decay rate.
    """
    split = reduction.split
    x0 = split.slow_coordinates(rho0)
    M = sla.expm(T * reduction.F(eps, order))
    exact = exact_slow_state(reduction, eps, rho0, T)
    diag = cp_tp_diagnostics(lift_slow_map(split, M))
    closeness = validate_closeness(reduction, eps, rho0, times, order)
    return SweepRecord(
        epsilon=float(eps),
        order=int(order),
        slow_coord_error=slow_coordinate_error(reduction, eps, rho0, T, order),
        state_error=float(np.linalg.norm(exact - split.lift(M @ x0))),
        min_choi_eig=float(diag["min_choi_eigenvalue"]),
        trace_defect=float(diag["trace_defect"]),
        fitted_rate=closeness.fitted_rate,
    )


@dataclass
class SweepResult:
    horizon: float
    records: List[SweepRecord]
    slopes: Dict[int, Optional[float]] = field(default_factory=dict)


def run_sweep(model_file: ModelFile, settings: Settings, eps_list, orders, horizon=None, workers=1) -> SweepResult:
    """Evaluate every ``(eps, order)`` point; rows come back epsilon-major, order-minor."""
    eps_list = sorted(float(e) for e in eps_list)
    orders = sorted(int(n) for n in orders)
    if not eps_list:
        raise ValueError("epsilon list is empty")
    if not orders or orders[0] < 1:
        raise ValueError("orders must be a non-empty list of integers >= 1")
    settings = Settings(**{**asdict(settings), "order": orders[-1],
                           "max_order": max(settings.max_order, orders[-1])})
    reduction = run_reduction(model_file, settings)
    rho0 = default_initial_state(reduction.split, settings.seed)
    T = 10.0 / reduction.gamma if horizon is None else float(horizon)
    times = default_time_grid(reduction.gamma)
    points = [(e, n) for e in eps_list for n in orders]
    with ThreadPoolExecutor(max_workers=max(1, int(workers))) as pool:
        records = list(pool.map(lambda p: sweep_point(reduction, rho0, p[0], p[1], T, times), points))
    slopes = {
        n: fit_loglog_slope(eps_list, [r.slow_coord_error for r in records if r.order == n], ABS_FLOOR)
        for n in orders
    }
    return SweepResult(T, records, slopes)


def build_sweep_report(model_file: ModelFile, settings: Settings, result: SweepResult):
    report = _header("sweep", model_file, settings)
    report["sweep"] = {
        "horizon": result.horizon,
        "columns": CSV_COLUMNS,
        "records": [asdict(r) for r in result.records],
        "slow_coord_error_slopes": {str(n): s for n, s in result.slopes.items()},
    }
    return report
