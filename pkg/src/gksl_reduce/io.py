"""JSON model files and reports.

Complex matrices are encoded as nested lists of ``[re, im]`` pairs, row
major: ``matrix[i][j] == [Re M_ij, Im M_ij]``.
"""

import hashlib
import json
import sys
from dataclasses import dataclass, field
from typing import Dict, List, Optional

import numpy as np

from .exceptions import ReductionError
from .lindblad import GeneratorSpec, GKSLModel

TOLERANCE_KEYS = ("zero_tol", "residual_tol", "resolvent_tol", "hermiticity_tol", "max_order")


class ModelFileError(ReductionError, ValueError):
    """A model file could not be parsed; the message locates the problem."""


def _reject_constant(name):
    raise ValueError(f"non-finite number {name} is not allowed")


def encode_matrix(M):
    M = np.asarray(M, dtype=complex)
    return [[[float(z.real), float(z.imag)] for z in row] for row in M]


def decode_matrix(data, dim, where):
    if not isinstance(data, list) or len(data) != dim:
        raise ModelFileError(f"{where}: expected {dim} rows")
    out = np.empty((dim, dim), dtype=complex)
    for i, row in enumerate(data):
        if not isinstance(row, list) or len(row) != dim:
            raise ModelFileError(f"{where}[{i}]: expected {dim} entries (ragged matrix)")
        for j, pair in enumerate(row):
            if (not isinstance(pair, list) or len(pair) != 2
                    or not all(isinstance(v, (int, float)) and not isinstance(v, bool) for v in pair)):
                raise ModelFileError(f"{where}[{i}][{j}]: expected a [re, im] pair of numbers")
            if not all(np.isfinite(pair)):
                raise ModelFileError(f"{where}[{i}][{j}]: non-finite entry")
            out[i, j] = complex(pair[0], pair[1])
    return out


@dataclass
class ModelFile:
    model: GKSLModel
    order: int = 2
    tolerances: Dict[str, float] = field(default_factory=dict)
    seed: int = 0
    raw: Optional[dict] = None

    @property
    def epsilons(self):
        return self.model.epsilons

    def to_dict(self):
        if self.raw is not None:
            return self.raw
        return model_to_dict(self.model, self.order, self.tolerances, self.seed)


def _decode_generator(data, dim, where, hermiticity_tol):
    if not isinstance(data, dict):
        raise ModelFileError(f"{where}: expected an object with 'hamiltonian' and 'collapse'")
    unknown = set(data) - {"hamiltonian", "collapse"}
    if unknown:
        raise ModelFileError(f"{where}: unknown keys {sorted(unknown)}")
    H = decode_matrix(data.get("hamiltonian", [[[0, 0]] * dim] * dim), dim, f"{where}.hamiltonian")
    collapse = data.get("collapse", [])
    if not isinstance(collapse, list):
        raise ModelFileError(f"{where}.collapse: expected a list of matrices")
    ops = [decode_matrix(c, dim, f"{where}.collapse[{k}]") for k, c in enumerate(collapse)]
    try:
        return GeneratorSpec(H, ops, hermiticity_tol=hermiticity_tol)
    except ReductionError as exc:
        raise ModelFileError(f"{where}: {exc}") from exc


def parse_model(text) -> ModelFile:
    """Parse model-file JSON text.

    Raises
    ------
    ModelFileError
        With line/column for syntax errors and a JSON path for structural ones.
    """
    try:
        data = json.loads(text, parse_constant=_reject_constant)
    except json.JSONDecodeError as exc:
        raise ModelFileError(f"line {exc.lineno}, column {exc.colno}: {exc.msg}") from exc
    except ValueError as exc:
        raise ModelFileError(str(exc)) from exc
    if not isinstance(data, dict):
        raise ModelFileError("top level: expected a JSON object")
    unknown = set(data) - {"dim", "fast", "slow", "epsilon", "order", "tolerances", "seed", "name", "params"}
    if unknown:
        raise ModelFileError(f"top level: unknown keys {sorted(unknown)}")
    dim = data.get("dim")
    if not isinstance(dim, int) or isinstance(dim, bool) or dim < 1:
        raise ModelFileError("dim: expected a positive integer")
    tolerances = data.get("tolerances", {})
    if not isinstance(tolerances, dict) or set(tolerances) - set(TOLERANCE_KEYS):
        raise ModelFileError(f"tolerances: expected an object with keys among {list(TOLERANCE_KEYS)}")
    for key, value in tolerances.items():
        if not isinstance(value, (int, float)) or isinstance(value, bool) or not np.isfinite(value) or value <= 0:
            raise ModelFileError(f"tolerances.{key}: expected a positive number")
    herm_tol = tolerances.get("hermiticity_tol", 1e-10)
    fast = _decode_generator(data.get("fast"), dim, "fast", herm_tol)
    slow = _decode_generator(data.get("slow", {}), dim, "slow", herm_tol)

    eps = data.get("epsilon", 0.05)
    eps_list = eps if isinstance(eps, list) else [eps]
    if not eps_list or not all(isinstance(e, (int, float)) and not isinstance(e, bool) for e in eps_list):
        raise ModelFileError("epsilon: expected a positive number or a non-empty list of them")
    if not all(np.isfinite(e) and e > 0 for e in eps_list):
        raise ModelFileError("epsilon: values must be positive and finite")
    order = data.get("order", 2)
    if not isinstance(order, int) or isinstance(order, bool) or order < 1:
        raise ModelFileError("order: expected an integer >= 1")
    seed = data.get("seed", 0)
    if not isinstance(seed, int) or isinstance(seed, bool):
        raise ModelFileError("seed: expected an integer")
    model = GKSLModel(fast, slow, [float(e) for e in eps_list] if isinstance(eps, list) else float(eps))
    return ModelFile(model, order, dict(tolerances), seed, data)


def load_model(path) -> ModelFile:
    with open(path, encoding="utf-8") as fh:
        text = fh.read()
    try:
        return parse_model(text)
    except ModelFileError as exc:
        raise ModelFileError(f"{path}: {exc}") from exc


def model_to_dict(model: GKSLModel, order=2, tolerances=None, seed=0, **extra):
    def gen(spec):
        return {
            "hamiltonian": encode_matrix(spec.hamiltonian),
            "collapse": [encode_matrix(L) for L in spec.collapse_ops],
        }

    eps = model.epsilon
    out = {
        **extra,
        "dim": model.dim,
        "fast": gen(model.fast),
        "slow": gen(model.slow),
        "epsilon": [float(e) for e in eps] if isinstance(eps, (list, tuple, np.ndarray)) else float(eps),
        "order": int(order),
        "seed": int(seed),
    }
    if tolerances:
        out["tolerances"] = dict(tolerances)
    return out


def canonical_json(data):
    return json.dumps(data, sort_keys=True, separators=(",", ":"), allow_nan=False)


def digest(data):
    return hashlib.sha256(canonical_json(data).encode()).hexdigest()


def to_jsonable(obj):
    """Recursively convert numpy types, complex numbers and arrays to JSON values."""
    if isinstance(obj, dict):
        return {str(k): to_jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [to_jsonable(v) for v in obj]
    if isinstance(obj, np.ndarray):
        if np.iscomplexobj(obj):
            if obj.ndim == 2:
                return encode_matrix(obj)
            return [[float(z.real), float(z.imag)] for z in obj.ravel()]
        return obj.tolist()
    if isinstance(obj, (complex, np.complexfloating)):
        return [float(obj.real), float(obj.imag)]
    if isinstance(obj, (np.floating, float)):
        value = float(obj)
        return value if np.isfinite(value) else None
    if isinstance(obj, (np.integer,)):
        return int(obj)
    if isinstance(obj, np.bool_):
        return bool(obj)
    return obj


def dumps_report(report) -> str:
    """Serialize a report; floats use the shortest repr that round-trips exactly."""
    return json.dumps(to_jsonable(report), indent=2, sort_keys=False, allow_nan=False) + "\n"


def write_json(data, path):
    text = dumps_report(data)
    if path in (None, "-"):
        sys.stdout.write(text)
    else:
        with open(path, "w", encoding="utf-8") as fh:
            fh.write(text)
