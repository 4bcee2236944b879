import numpy as np
import pytest

from eigencycle.fixtures import oneill_game, table2
from eigencycle.game import interior_rest_point
from eigencycle.spectral import align_conjugate_pairs, eigen_decompose, jacobian_at

ACCEPTANCE_LINES = []


@pytest.fixture(scope="session")
def oneill():
    return oneill_game()


@pytest.fixture(scope="session")
def x_star(oneill):
    return interior_rest_point(oneill)


@pytest.fixture(scope="session")
def eigs(oneill, x_star):
    return eigen_decompose(jacobian_at(oneill, x_star).j)


@pytest.fixture(scope="session")
def aligned(eigs):
    ref = table2()
    return align_conjugate_pairs(eigs, 0.4j, [ref.eigenpair(".4i_1"), ref.eigenpair(".4i_2")])


@pytest.fixture(scope="session")
def by_tag(aligned):
    return {e.tag: e for e in aligned}


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.write_sep("=", "acceptance criteria")
        for line in sorted(ACCEPTANCE_LINES, key=lambda s: int(s.split()[1].rstrip(":"))):
            terminalreporter.write_line(line)
