import numpy as np
import pytest

from heisweyl import lattice
from heisweyl.induced import OmegaGrid
from heisweyl.schrodinger import HermiteBasisSpec

ACCEPTANCE_LINES = []


@pytest.fixture(scope="session")
def hspec16():
    return HermiteBasisSpec.for_dimension(16)


@pytest.fixture(scope="session")
def hspec32():
    return HermiteBasisSpec.for_dimension(32)


@pytest.fixture(scope="session")
def hspec64():
    return HermiteBasisSpec.for_dimension(64)


@pytest.fixture(scope="session")
def rep2():
    return lattice.TauRep(lattice.make_lattice(2, 1))


@pytest.fixture(scope="session")
def grid2(rep2):
    return OmegaGrid(rep2, 16)


@pytest.fixture
def rng():
    return np.random.default_rng(1234)


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
