import json
from pathlib import Path

import pytest

from deform import build_ansatz, solve_confluence
from matrix import biresidue, from_numerators

FIXTURES = Path(__file__).resolve().parent.parent / "fixtures"


def load_fixture(name):
    return json.loads((FIXTURES / name).read_text())


def fixture_matrix(name):
    data = load_fixture(name)
    return from_numerators(data["numerators"], data["denominator"])


@pytest.fixture(scope="session")
def fixtures_dir():
    return FIXTURES


@pytest.fixture(scope="session")
def five_point():
    """Poisson matrix whose diagram is two chains 0-4 and 1-2-3."""
    return fixture_matrix("five_point.json")


@pytest.fixture(scope="session")
def four_chain():
    """Poisson matrix whose diagram is the chain 0-1-2-3-4."""
    return fixture_matrix("four_edge_chain.json")


@pytest.fixture(scope="session")
def five_point_biresidue():
    return from_numerators(
        [
            [0, 2, -4, -4, 6],
            [-2, 0, 3, 1, -2],
            [4, -3, 0, 1, -2],
            [4, -1, -1, 0, -2],
            [-6, 2, 2, 2, 0],
        ]
    )


@pytest.fixture(scope="session")
def four_chain_biresidue():
    return from_numerators(
        [
            [0, 3, -1, -1, -1],
            [-3, 0, 2, 2, -1],
            [1, -2, 0, 2, -1],
            [1, -2, -2, 0, 3],
            [1, 1, 1, -3, 0],
        ]
    )


@pytest.fixture(scope="session")
def three_edges_solved(five_point):
    data = load_fixture("five_point_three_edges.json")
    return solve_confluence(build_ansatz(five_point, data["edges"], data["gammas"]))


@pytest.fixture(scope="session")
def four_chain_solved(four_chain):
    data = load_fixture("four_edge_chain.json")
    return solve_confluence(build_ansatz(four_chain, data["edges"], data["gammas"]))
