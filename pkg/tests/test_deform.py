import cmath

import pytest

from conftest import fixture_matrix, load_fixture
from deform import (
    CyclePresentError,
    assemble_mixed,
    braiding_defects,
    build_ansatz,
    complex_value,
    q_symmetric_system,
    quadratic_weights,
    rescaled_coefficients,
    solve_confluence,
    specialize,
)
from diagram import build_diagram, classify_cycle, decompose
from exact import PoleError, parse_ratfunc
from matrix import AltMatrix, ParameterError, biresidue, fo_matrix
from ncalg import check_diamond, hilbert_function

THREE_EDGES = load_fixture("five_point_three_edges.json")
FOUR_CHAIN = load_fixture("four_edge_chain.json")


def names_by_level(ansatz, level):
    return {t.name for t in ansatz.unknowns(level)}


def test_three_edge_skeleton(five_point):
    ansatz = build_ansatz(five_point, THREE_EDGES["edges"], THREE_EDGES["gammas"])
    assert ansatz.max_level == 3
    assert {t.name for t in ansatz.terms if t.level == 1} == {"C_21^00", "C_32^11", "C_40^23"}
    assert names_by_level(ansatz, 2) == {"C_40^11", "C_41^03"}
    assert names_by_level(ansatz, 3) == {"C_42^01"}
    assert ansatz.differences == []


def test_four_chain_skeleton(four_chain):
    ansatz = build_ansatz(four_chain, FOUR_CHAIN["edges"], FOUR_CHAIN["gammas"])
    assert sorted(t.level for t in ansatz.unknowns()) == [2, 2, 2, 3, 3, 4, 6]
    assert {t.name for t in ansatz.unknowns()} == {
        "C_10^44",
        "C_30^24",
        "C_31^04",
        "C_31^22",
        "C_40^22",
        "C_41^02",
        "C_43^00",
    }


def test_single_edge_has_no_unknowns(five_point):
    ansatz = build_ansatz(five_point, [(2, 1)])
    assert [t.name for t in ansatz.terms] == ["C_21^00"]
    assert ansatz.unknowns() == []
    solved = solve_confluence(ansatz)
    assert solved.values == {}
    assert check_diamond(solved.system).passed


def test_quadratic_term_names_use_commas_past_nine():
    thetas = [tuple([-1, -1] + [0] * 8 + [2])]
    terms = quadratic_weights(thetas, 11)
    assert [t.name for t in terms[1]] == ["C_1,0^10,10"]


def test_cycle_is_rejected():
    lam = fixture_matrix("fo_5_1_cycle.json")
    with pytest.raises(CyclePresentError):
        build_ansatz(lam, load_fixture("fo_5_1_cycle.json")["edges"])


def test_bad_edges_and_gammas(five_point):
    with pytest.raises(ParameterError):
        build_ansatz(five_point, [(0, 1)])
    with pytest.raises(ParameterError):
        build_ansatz(five_point, [(1, 2), (2, 3)], [1, 0])
    with pytest.raises(ParameterError):
        build_ansatz(five_point, [(1, 2), (2, 3)], [1])
    with pytest.raises(ParameterError):
        build_ansatz(five_point, [(1, 2), (2, 1)])


def test_three_edge_constants(three_edges_solved):
    expected = {
        "C_40^11": "v^24/(v^30-1)",
        "C_41^03": "v^-10/(1-v^5)",
        "C_42^01": "v^2*(1+v^10)/((1-v^5)*(1-v^30))",
    }
    for name, text in expected.items():
        assert three_edges_solved.values[name] == parse_ratfunc(text)
    assert str(three_edges_solved.values["C_40^11"]) == "v^24/(v^30-1)"
    assert three_edges_solved.coefficient("C_21^00") == 1
    assert three_edges_solved.log.gauge_dimension == 0
    assert [r.level for r in three_edges_solved.log.levels] == [2, 3]


def test_solved_relations_are_serializable(three_edges_solved):
    data = three_edges_solved.to_dict()
    first = data["relations"][0]
    assert (first["a"], first["b"]) == (0, 1)
    assert first["terms"] == [{"k": 0, "l": 1, "eps_power": 0, "coeff": "v^-1"}]
    assert data["coefficients"]["C_40^11"] == "v^24/(v^30-1)"
    assert data["solver_log"]["gauge_dimension"] == 0


@pytest.mark.slow
def test_four_chain_constants(four_chain_solved):
    expected = {
        "C_10^44": "-v^12/(1-v^15)",
        "C_43^00": "-v^12/(1-v^15)",
        "C_40^22": "1/(v^5*(1-v^10))",
        "C_30^24": "(1+v^10)/(v^5*(1-v^10)*(1-v^15))",
        "C_41^02": "(1+v^10)/(v^5*(1-v^10)*(1-v^15))",
        "C_31^04": "v^5*(1-v^5)*(1+v^10)/((1-v^10)^2*(1-v^15)^2)",
        "C_31^22": "v^2*(1+v^5+v^15)/((1-v^5)^3*(1+v^5)^4*(1-v^15)^2)",
    }
    for name, text in expected.items():
        value = four_chain_solved.values[name]
        assert value == parse_ratfunc(text)
        assert parse_ratfunc(str(value)) == value
    assert check_diamond(four_chain_solved.system).passed


@pytest.mark.slow
def test_four_chain_specialization_is_flat(four_chain_solved):
    system = specialize(four_chain_solved, 1)
    assert hilbert_function(system, 6) == [1, 5, 15, 35, 70, 126, 210]


def test_specialization_keeps_confluence(three_edges_solved):
    system = specialize(three_edges_solved, 1)
    assert check_diamond(system).passed
    assert hilbert_function(system, 6) == [1, 5, 15, 35, 70, 126, 210]


def test_zeroed_constant_breaks_overlap(three_edges_solved):
    values = dict(three_edges_solved.values)
    values["C_40^11"] = 0
    broken = three_edges_solved.ansatz.system(values)
    report = check_diamond(broken)
    assert not report.passed
    assert (4, 3, 0) in report.failed_triples()


def test_eps_zero_is_q_symmetric(five_point, three_edges_solved):
    assert specialize(three_edges_solved, 0).rules == q_symmetric_system(five_point).rules


def test_specializing_at_a_pole(three_edges_solved):
    with pytest.raises(PoleError):
        specialize(three_edges_solved, 1, 1)


def test_rescaled_gammas_match_a_fresh_solve(five_point, three_edges_solved):
    gammas = [2, 3, 5]
    predicted = rescaled_coefficients(three_edges_solved, gammas)
    fresh = solve_confluence(build_ansatz(five_point, THREE_EDGES["edges"], gammas))
    assert predicted == fresh.values


def test_braiding_holds(three_edges_solved):
    assert braiding_defects(three_edges_solved) == []


def test_mixed_algebra_on_a_full_cycle():
    lam = fixture_matrix("fo_5_1_cycle.json")
    edges = load_fixture("fo_5_1_cycle.json")["edges"]
    mixed = assemble_mixed(lam, edges, 0.07 + 0.02j, tau=12j)
    assert mixed.chain_vertices == []
    assert [(c.n_s, c.k_s) for c in mixed.cycles] == [(5, 1)]
    assert len(mixed.relations) == 25
    assert all(r.label.startswith("cycle 0") for r in mixed.relations)
    for relation in mixed.relations:
        assert all(cmath.isfinite(c) for c in relation.terms.values())
    with pytest.raises(ParameterError):
        assemble_mixed(lam, edges, 0.07 + 0.02j)


def test_mixed_algebra_without_cycles(five_point, three_edges_solved):
    z = 0.07 + 0.02j
    v = cmath.exp(2j * cmath.pi * z)
    mixed = assemble_mixed(five_point, THREE_EDGES["edges"], z)
    assert mixed.cycles == []
    assert mixed.chain_vertices == [0, 1, 2, 3, 4]
    assert len(mixed.relations) == 10

    expected = specialize(three_edges_solved, 1)
    for relation in mixed.relations:
        assert relation.label.startswith("chain ")
        lead = (int(relation.label[-2]), int(relation.label[-1]))
        assert relation.terms[lead] == 1
        remainder = expected.rules[lead]
        for word in set(relation.terms) | set(remainder.words()):
            if word == lead:
                continue
            target = -complex_value(remainder.coefficient(word).coefficient(0), v)
            assert abs(relation.terms.get(word, 0j) - target) < 1e-9 * max(1.0, abs(target))


def test_mixed_algebra_with_cycle_and_chain():
    """A 3-cycle on 0, 1, 2 next to the free pair 3, 4"""
    block = AltMatrix(
        [
            [0, -1, 1, 1, -1],
            [1, 0, -1, 1, -1],
            [-1, 1, 0, 1, -1],
            [-1, -1, -1, 0, 3],
            [1, 1, 1, -3, 0],
        ]
    )
    z = 0.07 + 0.02j
    v = cmath.exp(2j * cmath.pi * z)
    mixed = assemble_mixed(block, [(0, 1), (1, 2), (0, 2)], z, tau=12j)
    assert mixed.chain_vertices == [3, 4]
    assert [(c.n_s, c.k_s, c.scale) for c in mixed.cycles] == [(3, 1, 1)]
    assert len(mixed.relations) == 16

    labels = [r.label for r in mixed.relations]
    assert sum(label.startswith("cycle 0") for label in labels) == 9
    assert [label for label in labels if label.startswith("chain")] == ["chain 43"]
    cross = {r.label: r.terms for r in mixed.relations if r.label.startswith("cross")}
    assert sorted(cross) == ["cross 30", "cross 31", "cross 32", "cross 40", "cross 41", "cross 42"]
    assert cross["cross 30"][(3, 0)] == 1
    assert abs(cross["cross 30"][(0, 3)] + v ** -1) < 1e-12
    assert abs(cross["cross 40"][(0, 4)] + v) < 1e-12


def test_classify_scaled_cycle():
    lam = fo_matrix(5, 1).scaled(3)
    cycle = decompose(build_diagram(biresidue(lam))).cycles[0]
    found = classify_cycle(lam, cycle)
    assert (found.n_s, found.scale) == (5, 3)
    assert lam.submatrix(found.permutation) == fo_matrix(5, found.k_s).scaled(3)
