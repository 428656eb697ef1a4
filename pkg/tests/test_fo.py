from fractions import Fraction

import numpy as np
import pytest

from fo import (
    SingularParameterError,
    ThetaParams,
    degeneration_check,
    f,
    fo_relation_coeffs,
    fo_relations,
    g,
    g_properties,
    theta,
    theta_j,
)
from matrix import ParameterError

Z = 0.07 + 0.02j
TAUS = [8j, 10j, 12j]


def test_f_and_g_values():
    assert f(1, 5) == 2
    assert f(2, 5) == 3
    assert f(7, 5) == f(2, 5)
    assert g(1, 1, 5) == 1
    assert g(2, 2, 5) == 4
    assert g(3, 4, 5) == 2
    assert g(2, 3, 6) == Fraction(6)


@pytest.mark.parametrize("n", range(3, 13))
def test_g_properties(n):
    assert all(g_properties(n).values())


def test_theta_is_odd_at_zero():
    p = ThetaParams(0.3 + 1.1j, 3)
    assert abs(theta(0, p)) < 1e-12
    assert abs(theta(0.2, p) + theta(-0.2, p) * np.exp(2j * np.pi * 0.2)) < 1e-10


def test_theta_quasi_periodicity():
    """theta(z + tau) = -exp(-2 pi i z) theta(z)"""
    tau = 0.3 + 1.1j
    z = 0.2 + 0.1j
    p = ThetaParams(tau, 3)
    lhs = theta(z + tau, p)
    rhs = -np.exp(-2j * np.pi * z) * theta(z, p)
    assert abs(lhs - rhs) < 1e-9 * abs(rhs)
    assert abs(theta(z + 1, p) - theta(z, p)) < 1e-9 * abs(theta(z, p))


def test_theta_j_index_is_periodic():
    p = ThetaParams(2j, 3)
    assert theta_j(Z, 4, p) == theta_j(Z, 1, p)


def test_parameter_validation():
    with pytest.raises(ParameterError):
        ThetaParams(1.0, 5)
    with pytest.raises(ParameterError):
        ThetaParams(1j, 0)
    with pytest.raises(ParameterError):
        fo_relation_coeffs(4, 2, Z, ThetaParams(12j, 4))
    with pytest.raises(ParameterError):
        fo_relation_coeffs(5, 1, Z, ThetaParams(12j, 3))
    with pytest.raises(ParameterError):
        degeneration_check(3, 1, Z, [])


def test_relations_have_one_term_per_offset():
    coeffs = fo_relation_coeffs(5, 2, Z, ThetaParams(12j, 5))
    relations = fo_relations(coeffs)
    assert len(relations) == 25
    assert all(len(rel) == 5 for rel in relations)
    assert set(coeffs.relation(1, 3)) == {(3, 1), (2, 2), (1, 3), (0, 4), (4, 0)}


def test_singular_point():
    with pytest.raises(SingularParameterError):
        fo_relation_coeffs(3, 1, 0, ThetaParams(12j, 3))


@pytest.mark.parametrize("n,k", [(3, 1), (5, 1), (5, 2)])
def test_degeneration_to_the_cycle(n, k):
    """Large Im(tau) recovers q = v^lambda plus first order terms along the cycle"""
    report = degeneration_check(n, k, Z, TAUS)
    assert report.order_zero_deviation < 1e-3
    assert report.leading_deviation < 1e-3
    assert report.vanishing_deviation < 1e-10
    assert report.slope_deviation < 0.02
    assert report.gammas_nonzero
    assert report.offsets_ok
    assert len(report.gammas) == n


@pytest.mark.parametrize("tau", [0.3 + 1.1j, 2j, 12j])
def test_doubling_the_truncation_changes_nothing(tau):
    for z in (Z, 0.4 - 0.03j, 0.25 + 0.3j):
        K = ThetaParams(tau, 3).cutoff(z)
        short = theta(z, ThetaParams(tau, 3, truncation=K))
        long = theta(z, ThetaParams(tau, 3, truncation=2 * K))
        assert abs(long - short) < 1e-13 * max(1.0, abs(long))


@pytest.mark.parametrize("n", [3, 5])
def test_theta_j_is_periodic_in_tau(n):
    tau = 0.3 + 1.1j
    for j in range(n):
        before = theta_j(Z, j, ThetaParams(tau, n))
        after = theta_j(Z, j, ThetaParams(tau + n, n))
        assert abs(after - before) < 1e-10 * abs(before)


@pytest.mark.parametrize("n", [3, 5])
def test_theta_j_asymptotics(n):
    tau = 12j
    p = ThetaParams(tau, n)
    assert abs(theta_j(Z, 0, p) - (1 - np.exp(2j * np.pi * n * Z))) < 1e-6
    for j in range(1, n):
        leading = np.exp(2j * np.pi * (j * Z + j * (j - n) * tau / (2 * n) + j / (2 * n)))
        assert abs(theta_j(Z, j, p) / leading - 1) < 1e-6
