from __future__ import annotations

import pytest

from omegaramsey._backend import available, load
from omegaramsey.hypercore import FiniteHypergraph, StructureOracle
from omegaramsey.typetree import minimal_growth

# hand fixture: u = 2 on six vertices
SIX_VERTEX_LABELS = {
    (0, 1): 0, (0, 2): 0, (1, 2): 1,
    (0, 3): 0, (1, 3): 1, (2, 3): 5,
    (0, 4): 0, (1, 4): 0, (2, 4): 3, (3, 4): 0,
    (0, 5): 0, (1, 5): 0, (2, 5): 4, (3, 5): 0, (4, 5): 0,
}

ACCEPTANCE_LINES: list[str] = []


@pytest.fixture
def six() -> FiniteHypergraph:
    return FiniteHypergraph.from_edges(2, 6, SIX_VERTEX_LABELS)


@pytest.fixture
def six_oracle(six) -> StructureOracle:
    return StructureOracle(six)


@pytest.fixture
def f2():
    return minimal_growth(2, 12)


@pytest.fixture
def f3():
    return minimal_growth(3, 8)


@pytest.fixture(params=available())
def backend(request):
    return load(request.param)


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
