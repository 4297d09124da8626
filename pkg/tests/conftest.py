import itertools

import numpy as np
import pytest

from polyskel.core import VertexSet
from polyskel.edgecheck import is_edge


def square():
    return VertexSet([[0, 0], [0, 1], [1, 0], [1, 1]], "square")


def lp_edges(vs):
    """Edge set by the exact LP on every pair, the ground truth for small sets."""
    return {(a, b) for a, b in itertools.combinations(range(len(vs)), 2) if is_edge(vs, a, b)}


@pytest.fixture
def unit_square():
    return square()


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


ACCEPTANCE_LINES = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE_LINES):
            terminalreporter.write_line(line)
