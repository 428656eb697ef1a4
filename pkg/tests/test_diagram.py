import math

import pytest

from diagram import (
    DARK,
    LIGHT,
    Angle,
    ClassificationError,
    DiagramEdge,
    InvariantViolationError,
    SmoothingDiagram,
    adjacent_ratios_positive,
    angles_inside_cycles,
    build_diagram,
    classify_cycle,
    cycle_is_decoupled,
    decompose,
    render_text,
    restrict,
)
from matrix import AltMatrix, biresidue, fo_matrix, inverse_mod


def fo_cases(limit=9):
    for n in range(3, limit + 1, 2):
        for k in range(1, n):
            if math.gcd(n, k) == 1 and math.gcd(n, k + 1) == 1:
                yield n, k


def test_two_chains(five_point_biresidue):
    diagram = build_diagram(five_point_biresidue)
    assert [e.key for e in diagram.edges] == [(0, 4), (1, 2), (2, 3)]
    parts = decompose(diagram)
    assert parts.chains == [[0, 4], [1, 2, 3]]
    assert parts.cycles == []
    assert Angle(0, (1, 2), DARK) in diagram.angles
    assert Angle(2, (0, 4), LIGHT) in diagram.angles
    assert Angle(3, (0, 4), LIGHT) in diagram.angles
    assert adjacent_ratios_positive(five_point_biresidue, diagram)


def test_single_chain(four_chain_biresidue):
    diagram = build_diagram(four_chain_biresidue)
    assert decompose(diagram).chains == [[0, 1, 2, 3, 4]]
    assert adjacent_ratios_positive(four_chain_biresidue, diagram)
    assert diagram.neighbours(2) == [1, 3]


@pytest.mark.parametrize("n,k", list(fo_cases()))
def test_fo_matrices_give_one_full_cycle(n, k):
    """Edge i joins i and i+k'+1, with weight -e_i - e_{i+k'+1} + e_{i+1} + e_{i+k'}"""
    diagram = build_diagram(biresidue(fo_matrix(n, k)))
    parts = decompose(diagram)
    assert parts.chains == []
    assert len(parts.cycles) == 1
    assert sorted(parts.cycles[0]) == list(range(n))
    assert angles_inside_cycles(diagram, parts)

    inv = inverse_mod(k, n)
    expected = {}
    for i in range(n):
        theta = [0] * n
        theta[i] -= 1
        theta[(i + inv + 1) % n] -= 1
        theta[(i + 1) % n] += 1
        theta[(i + inv) % n] += 1
        j = (i + inv + 1) % n
        expected[(min(i, j), max(i, j))] = tuple(theta)
    assert {e.key: e.weight for e in diagram.edges} == expected


def test_classify_cycle_recovers_parameters():
    lam = fo_matrix(5, 2)
    cycle = decompose(build_diagram(biresidue(lam))).cycles[0]
    found = classify_cycle(lam, cycle)
    assert (found.n_s, found.k_s, found.scale) == (5, 2, 1)
    assert lam.submatrix(found.permutation) == fo_matrix(5, 2).scaled(found.scale)
    assert found.to_dict()["scale"] == "1"


def test_classify_cycle_of_scaled_matrix():
    lam = fo_matrix(3, 1).scaled(-2)
    found = classify_cycle(lam, [0, 1, 2])
    assert found.scale == 2
    assert lam.submatrix(found.permutation) == fo_matrix(3, 1).scaled(2)


def test_classify_cycle_rejects_mismatch(five_point):
    with pytest.raises(ClassificationError):
        classify_cycle(five_point, [0, 1, 2])
    with pytest.raises(ClassificationError):
        classify_cycle(five_point, [0, 1])


def test_vertex_of_degree_three_is_rejected():
    weight = (0, 0, 0, 0)
    diagram = SmoothingDiagram(
        4,
        (DiagramEdge(0, 1, weight), DiagramEdge(0, 2, weight), DiagramEdge(0, 3, weight)),
        (),
    )
    with pytest.raises(InvariantViolationError):
        decompose(diagram)


def test_cycle_decoupling(five_point):
    block = AltMatrix(
        [
            [0, -1, 1, 1, -1],
            [1, 0, -1, 1, -1],
            [-1, 1, 0, 1, -1],
            [-1, -1, -1, 0, 3],
            [1, 1, 1, -3, 0],
        ]
    )
    assert cycle_is_decoupled(block, [0, 1, 2])
    assert not cycle_is_decoupled(five_point, [0, 1, 2])


def test_restrict_and_render(five_point_biresidue):
    diagram = build_diagram(five_point_biresidue)
    sub = restrict(diagram, [(2, 1)])
    assert [e.key for e in sub.edges] == [(1, 2)]
    assert all(a.edge == (1, 2) for a in sub.angles)
    with pytest.raises(ValueError):
        restrict(diagram, [(0, 1)])

    text = render_text(diagram, decompose(diagram))
    assert "edge 1-2" in text
    assert "chain 1-2-3" in text
