"""Shared fixtures: bases and matrices are expensive, build them once."""

import numpy as np
import pytest

from geotransport.basis import make_basis
from geotransport.matrices import assemble_matrices

# acceptance-criterion verdict lines, echoed after the run (the terminal
# summary is outside pytest's output capture, so they always appear)
ACCEPTANCE_LINES = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)


@pytest.fixture(scope="session")
def femn1():
    return make_basis("femn", k=1)


@pytest.fixture(scope="session")
def sn1():
    return make_basis("sn", k=1)


@pytest.fixture(scope="session")
def fpn4():
    return make_basis("fpn", l_max=4)


@pytest.fixture(scope="session")
def femn1_matrices(femn1):
    return assemble_matrices(femn1)


@pytest.fixture(scope="session")
def sn1_matrices(sn1):
    return assemble_matrices(sn1)


@pytest.fixture(scope="session")
def fpn4_matrices(fpn4):
    return assemble_matrices(fpn4)


@pytest.fixture(scope="session")
def all_matrices(femn1_matrices, sn1_matrices, fpn4_matrices):
    return {
        "femn": femn1_matrices,
        "sn": sn1_matrices,
        "fpn": fpn4_matrices,
    }


@pytest.fixture()
def rng():
    return np.random.default_rng(42)


def random_directions(rng, n):
    """Uniformly distributed unit vectors."""
    v = rng.normal(size=(n, 3))
    return v / np.linalg.norm(v, axis=1, keepdims=True)
