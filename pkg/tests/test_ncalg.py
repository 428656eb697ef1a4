import random
from concurrent.futures import ThreadPoolExecutor

import pytest

from deform import specialize
from exact import EpsPoly, RatFunc
from ncalg import (
    LEFTMOST,
    RIGHTMOST,
    FiltrationOracle,
    NCPoly,
    NotConfluentError,
    RewriteSystem,
    check_diamond,
    compare,
    filtration_level,
    hilbert_function,
    normal_words,
    overlap_triples,
    reduce,
    word_weight,
)
from weights import smoothable_weights

THREE_EDGE_THETAS = [(-1, 0, 1, 1, -1), (2, -1, -1, 0, 0), (0, 2, -1, -1, 0)]


@pytest.fixture
def three_generators():
    """x_b x_a -> v^(b-a) x_a x_b"""
    rules = {
        (b, a): NCPoly.monomial((a, b), RatFunc.monomial(b - a))
        for a in range(3)
        for b in range(a + 1, 3)
    }
    return RewriteSystem(3, rules)


@pytest.fixture
def broken():
    rules = {
        (2, 1): NCPoly({(1, 2): 1, (0, 0): 1}),
        (1, 0): NCPoly.monomial((0, 1), 2),
        (2, 0): NCPoly.monomial((0, 2)),
    }
    return RewriteSystem(3, rules)


@pytest.mark.parametrize("strategy", [LEFTMOST, RIGHTMOST])
def test_reduce_is_strategy_independent(three_generators, strategy):
    result = reduce(NCPoly.monomial((2, 1, 0)), three_generators, strategy)
    assert result == NCPoly.monomial((0, 1, 2), RatFunc.monomial(4))


def test_confluent_system(three_generators):
    report = check_diamond(three_generators)
    assert report.passed
    assert report.checked == 1
    assert hilbert_function(three_generators, 4) == [1, 3, 6, 10, 15]
    assert list(normal_words(three_generators, 2)) == [
        (0, 0), (0, 1), (0, 2), (1, 1), (1, 2), (2, 2)
    ]


def test_thread_pool_gives_same_report(three_generators, broken):
    assert check_diamond(broken, workers=3).to_dict() == check_diamond(broken).to_dict()
    assert hilbert_function(three_generators, 3, workers=2) == [1, 3, 6, 10]


def test_non_confluent_system(broken):
    """The overlap x2*x1*x0 leaves -x0^3 behind"""
    report = check_diamond(broken)
    assert not report.passed
    assert report.failed_triples() == [(2, 1, 0)]
    assert report.failures[0].residue == NCPoly.monomial((0, 0, 0), -1)
    with pytest.raises(NotConfluentError):
        hilbert_function(broken, 3)


def test_order_violation_is_rejected():
    with pytest.raises(ValueError):
        RewriteSystem(2, {(1, 0): NCPoly.monomial((1, 1))})
    with pytest.raises(ValueError):
        RewriteSystem(2, {(0, 1): NCPoly.monomial((0, 1))})


def test_eps_cap_truncates():
    rules = {(1, 0): NCPoly({(0, 1): EpsPoly([1, 1])})}
    system = RewriteSystem(2, rules)
    word = NCPoly.monomial((1, 1, 0))
    assert reduce(word, system) == NCPoly({(0, 1, 1): EpsPoly([1, 2, 1])})
    assert reduce(word, system, cap=1) == NCPoly({(0, 1, 1): EpsPoly([1, 2])})


def test_filtration_levels():
    oracle = FiltrationOracle(THREE_EDGE_THETAS, 5)
    assert filtration_level((1, 1, -1, 0, -1), oracle) == 3
    for theta in THREE_EDGE_THETAS:
        assert oracle.level(theta) == 1
    assert oracle.level((0, 0, 0, 0, 0)) == 0
    assert oracle.word_level((0, 0)) == 1
    assert oracle.word_level((2, 1)) == 0


def test_order_puts_higher_levels_first():
    oracle = FiltrationOracle(THREE_EDGE_THETAS, 5)
    assert compare((0, 0), (2, 1), oracle) == -1
    assert compare((2, 1), (0, 0), oracle) == 1
    assert compare((1, 3), (1, 3), oracle) == 0
    # x0*x1*x2 sits at level 3, so it is smaller despite being longer
    assert compare((3, 4), (0, 1, 2), oracle) == 1


def test_oracle_rejects_bad_weights():
    with pytest.raises(ValueError):
        FiltrationOracle([(-1, 1, 0), (-2, 2, 0)], 3)
    with pytest.raises(ValueError):
        FiltrationOracle([(-1, 1)], 3)


def test_helpers():
    assert word_weight((2, 0, 2), 3) == (1, 0, 2)
    assert overlap_triples(4) == [(2, 1, 0), (3, 1, 0), (3, 2, 0), (3, 2, 1)]
    p = NCPoly({(1, 0): 2}) - NCPoly({(1, 0): 2})
    assert p.is_zero()


def test_render_follows_the_filtration_order():
    system = RewriteSystem(5, {}, FiltrationOracle(THREE_EDGE_THETAS, 5))
    p = NCPoly({(3, 4): 1, (0, 1, 2): 1})
    assert system.render(p) == "[1]*x3*x4 + [1]*x0*x1*x2"
    assert p.render() == "[1]*x0*x1*x2 + [1]*x3*x4"


def test_four_chain_levels(four_chain_biresidue):
    thetas = list(smoothable_weights(four_chain_biresidue).values())
    oracle = FiltrationOracle(thetas, 5)
    # weight of x2*x2 against the lead x3*x1
    assert filtration_level((0, -1, 2, -1, 0), oracle) == 6
    assert oracle.word_level((2, 2)) >= 6


def random_words(seed, count=200, n=5):
    rng = random.Random(seed)
    return [tuple(rng.randrange(n) for _ in range(rng.choice((3, 4)))) for _ in range(count)]


def assert_unique_normal_forms(system, words):
    for word in words:
        p = NCPoly.monomial(word)
        left = reduce(p, system, LEFTMOST)
        assert reduce(p, system, RIGHTMOST) == left
        assert reduce(left, system) == left
        assert all(system.is_normal(w) for w in left.words())


def test_normal_forms_are_unique(three_edges_solved):
    assert_unique_normal_forms(specialize(three_edges_solved, 1, 2), random_words(5))


@pytest.mark.slow
def test_normal_forms_are_unique_over_q_of_v(three_edges_solved, four_chain_solved):
    assert_unique_normal_forms(three_edges_solved.system, random_words(6))
    assert_unique_normal_forms(four_chain_solved.system, random_words(7))


def test_oracle_shared_between_threads():
    rng = random.Random(9)
    weights = [tuple(rng.randint(-1, 4) for _ in range(5)) for _ in range(60)]
    shared = FiltrationOracle(THREE_EDGE_THETAS, 5)
    with ThreadPoolExecutor(max_workers=4) as pool:
        levels = list(pool.map(shared.level, weights * 4))
    fresh = FiltrationOracle(THREE_EDGE_THETAS, 5)
    assert levels == [fresh.level(w) for w in weights] * 4
