import numpy as np
import pytest

from gksl_reduce import reduce_model, zoo_build, zoo_names


@pytest.fixture(scope="session")
def zoo_reductions():
    """Every zoo model reduced to order 4 with default parameters."""
    return {name: reduce_model(zoo_build(name), order=4) for name in zoo_names()}


@pytest.fixture
def rng():
    return np.random.default_rng(1234)


def random_density(rng, dim):
    A = rng.normal(size=(dim, dim)) + 1j * rng.normal(size=(dim, dim))
    rho = A @ A.conj().T
    return rho / np.trace(rho)


def random_hermitian(rng, dim):
    A = rng.normal(size=(dim, dim)) + 1j * rng.normal(size=(dim, dim))
    return (A + A.conj().T) / 2


ACCEPTANCE_LINES = []


def record_acceptance(line):
    print(line)
    ACCEPTANCE_LINES.append(line)


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
