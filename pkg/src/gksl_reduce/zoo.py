"""Benchmark slow/fast models with known reductions.

Qubit convention: ``|g> = index 0``, ``|e> = index 1`` and
``sigma_minus = |g><e|``.  All fast rates default to 1 so that ``epsilon``
alone sets the ratio of time scales.
"""

from dataclasses import dataclass, field
from typing import Callable, Dict

import numpy as np

from .lindblad import GeneratorSpec, GKSLModel

SIGMA_MINUS = np.array([[0, 1], [0, 0]], dtype=complex)
SIGMA_PLUS = SIGMA_MINUS.conj().T
SIGMA_X = np.array([[0, 1], [1, 0]], dtype=complex)
SIGMA_Y = np.array([[0, -1j], [1j, 0]], dtype=complex)
SIGMA_Z = np.array([[1, 0], [0, -1]], dtype=complex)
I2 = np.eye(2, dtype=complex)


def _positive(**kwargs):
    for name, value in kwargs.items():
        if not value > 0:
            raise ValueError(f"{name} must be positive, got {value}")


def _unit(dim, i, j):
    E = np.zeros((dim, dim), dtype=complex)
    E[i, j] = 1.0
    return E


def destroy(n):
    """Truncated annihilation operator on ``n`` Fock states."""
    return np.diag(np.sqrt(np.arange(1, n)), 1).astype(complex)


def damped_qubit(kappa=1.0, drive=1.0, epsilon=0.05):
    """Amplitude damping ``kappa D[sigma_-]`` perturbed by a ``drive * sigma_x`` Hamiltonian."""
    _positive(kappa=kappa)
    fast = GeneratorSpec(np.zeros((2, 2)), [np.sqrt(kappa) * SIGMA_MINUS])
    slow = GeneratorSpec(drive * SIGMA_X, [])
    return GKSLModel(fast, slow, epsilon)


def dephased_qubit(kappa=1.0, drive=1.0, epsilon=0.05):
    """Dephasing ``kappa D[sigma_z]`` perturbed by a ``drive * sigma_x`` Hamiltonian."""
    _positive(kappa=kappa)
    fast = GeneratorSpec(np.zeros((2, 2)), [np.sqrt(kappa) * SIGMA_Z])
    slow = GeneratorSpec(drive * SIGMA_X, [])
    return GKSLModel(fast, slow, epsilon)


def lambda_system(gamma1=1.0, gamma2=1.0, omega1=1.0, omega2=1.0, delta=0.5, epsilon=0.05):
    """Three levels ``g1, g2, e`` (indices 0, 1, 2).

    The excited state decays to both ground states (rates ``gamma1``,
    ``gamma2``).  The perturbation drives ``g1 <-> e`` and ``g2 <-> e`` and
    shifts ``g2`` by ``delta``; the shift breaks the drive parity so that
    every order of the slow generator is nonzero.
    """
    _positive(gamma1=gamma1, gamma2=gamma2)
    fast = GeneratorSpec(
        np.zeros((3, 3)),
        [np.sqrt(gamma1) * _unit(3, 0, 2), np.sqrt(gamma2) * _unit(3, 1, 2)],
    )
    H1 = (
        omega1 * (_unit(3, 2, 0) + _unit(3, 0, 2))
        + omega2 * (_unit(3, 2, 1) + _unit(3, 1, 2))
        + delta * _unit(3, 1, 1)
    )
    return GKSLModel(fast, GeneratorSpec(H1, []), epsilon)


def purcell_two_qubit(kappa=1.0, g=1.0, epsilon=0.05):
    """Qubit 1 exchange-coupled (``g``) to qubit 2, which is damped at rate ``kappa``.

    Ordering is ``qubit1 (x) qubit2``.  At second order qubit 1 acquires
    amplitude damping at rate ``4 eps^2 g^2 / kappa``.
    """
    _positive(kappa=kappa)
    fast = GeneratorSpec(np.zeros((4, 4)), [np.sqrt(kappa) * np.kron(I2, SIGMA_MINUS)])
    H1 = g * (np.kron(SIGMA_PLUS, SIGMA_MINUS) + np.kron(SIGMA_MINUS, SIGMA_PLUS))
    return GKSLModel(fast, GeneratorSpec(H1, []), epsilon)


def two_photon_loss(n_max=6, kappa2=1.0, kappa1=1.0, drive=0.5, epsilon=0.05):
    """Oscillator on ``n_max`` Fock states with fast two-photon loss ``kappa2 D[a^2]``.

    The kernel is spanned by operators on ``{|0>, |1>}``.  The perturbation
    is single-photon loss ``kappa1 D[a]`` plus a coherent drive
    ``drive * (a + a^dagger)``, which leaks out of that manifold.
    """
    _positive(kappa2=kappa2)
    if int(n_max) != n_max or n_max < 4:
        raise ValueError(f"n_max must be an integer >= 4, got {n_max}")
    n_max = int(n_max)
    if kappa1 < 0:
        raise ValueError(f"kappa1 must be nonnegative, got {kappa1}")
    a = destroy(n_max)
    fast = GeneratorSpec(np.zeros((n_max, n_max)), [np.sqrt(kappa2) * a @ a])
    slow = GeneratorSpec(drive * (a + a.conj().T), [np.sqrt(kappa1) * a])
    return GKSLModel(fast, slow, epsilon)


@dataclass(frozen=True)
class ZooEntry:
    name: str
    builder: Callable
    params: Dict[str, float]
    expected: Dict[str, object] = field(default_factory=dict)
    description: str = ""


ZOO = {
    "damped_qubit": ZooEntry(
        "damped_qubit", damped_qubit, {"kappa": 1.0, "drive": 1.0, "epsilon": 0.05},
        {"dbar": 1, "gamma": "kappa/2 [DERIVED: hand diagonalization]"},
        "qubit amplitude damping with a weak sigma_x drive",
    ),
    "dephased_qubit": ZooEntry(
        "dephased_qubit", dephased_qubit, {"kappa": 1.0, "drive": 1.0, "epsilon": 0.05},
        {"dbar": 2, "gamma": "2 kappa [DERIVED: coherences decay at 2 kappa]"},
        "qubit dephasing with a weak sigma_x drive",
    ),
    "lambda_system": ZooEntry(
        "lambda_system", lambda_system,
        {"gamma1": 1.0, "gamma2": 1.0, "omega1": 1.0, "omega2": 1.0, "delta": 0.5, "epsilon": 0.05},
        {"dbar": 4, "gamma": "(gamma1+gamma2)/2 [DERIVED: excited-ground coherences]"},
        "three-level lambda system, fast spontaneous emission, weak drives",
    ),
    "purcell_two_qubit": ZooEntry(
        "purcell_two_qubit", purcell_two_qubit, {"kappa": 1.0, "g": 1.0, "epsilon": 0.05},
        {"dbar": 4, "gamma": "kappa/2", "effective_decay": "4 eps^2 g^2/kappa [DERIVED: exact-propagation fit]"},
        "qubit Purcell-damped through a fast lossy partner",
    ),
    "two_photon_loss": ZooEntry(
        "two_photon_loss", two_photon_loss,
        {"n_max": 6, "kappa2": 1.0, "kappa1": 1.0, "drive": 0.5, "epsilon": 0.05},
        {"dbar": 4, "gamma": "kappa2 [DERIVED: kernel rank of vectorized L0]"},
        "truncated oscillator with fast two-photon loss",
    ),
}


def zoo_names():
    return list(ZOO)


def zoo_build(name, **params) -> GKSLModel:
    """Build a zoo model by name, overriding any default parameter."""
    if name not in ZOO:
        raise KeyError(f"unknown zoo model {name!r}; choose from {', '.join(ZOO)}")
    entry = ZOO[name]
    unknown = set(params) - set(entry.params)
    if unknown:
        raise ValueError(f"unknown parameters for {name}: {', '.join(sorted(unknown))}")
    return entry.builder(**{**entry.params, **params})


def two_photon_rank_check(n_max=6, kappa2=1.0):
    """Kernel dimension of the fast two-photon generator at ``n_max`` and ``n_max + 2``.

    A stable value shows that the Fock truncation does not inflate ``dbar``.
    """
    from .lindblad import build_lindbladian
    from .spectral import spectral_gap_analysis

    dims = {}
    for n in (n_max, n_max + 2):
        model = two_photon_loss(n_max=n, kappa2=kappa2)
        dims[n] = spectral_gap_analysis(build_lindbladian(model.fast)).dbar
    return {"n_max": n_max, "dbar": dims[n_max], "dbar_next": dims[n_max + 2],
            "stable": dims[n_max] == dims[n_max + 2]}
