"""
Feigin-Odesskii Theta Relations

Numerical laboratory for the elliptic algebras Q_{n,k}(E, z). With
tau in the upper half plane and eps = exp(2 pi i tau / n):

    theta(z)    = sum_k (-1)^k exp(2 pi i (k z + k(k-1) tau / 2))
    theta_j(z)  = prod_{l<n} theta(z + l/n + j tau / n)
                  * exp(2 pi i (j z + j(j-n) tau / (2n) + j / (2n)))

and the relations are

    sum_r c[i, j, r] x_{j-r} x_{i+r} = 0,
    c[i, j, r] = theta_{j-i+r(k-1)}(0) / (theta_{kr}(z) theta_{j-i-r}(-z)).

As Im(tau) grows (eps -> 0) the relations degenerate to the q-symmetric
algebra of fo_matrix(n, k) with v = exp(2 pi i z), perturbed at first
order in eps along a cycle of smoothable weights.

Example:
    >>> p = ThetaParams(10j, 5)
    >>> abs(theta(0.3, p) - (1 - np.exp(2j * np.pi * 0.3))) < 1e-5
    True
    >>> f(1, 5), f(2, 5), g(1, 1, 5)
    (Fraction(2, 1), Fraction(3, 1), Fraction(1, 1))
"""

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np

from matrix import ParameterError, fo_matrix, inverse_mod

# log of the relative size below which series terms are dropped
_LOG_TOLERANCE = math.log(1e-17)


class SingularParameterError(ValueError):
    """Raised when a relation coefficient has a vanishing denominator."""


@dataclass(frozen=True)
class ThetaParams:
    """
    Theta function parameters.

    Attributes:
        tau (complex): Modular parameter, Im(tau) > 0.
        n (int): Degree of the Feigin-Odesskii algebra.
        truncation (Optional[int]): Series cutoff K (|k| <= K); chosen per
            evaluation point when omitted.
    """

    tau: complex
    n: int
    truncation: Optional[int] = None

    def __post_init__(self):
        if complex(self.tau).imag <= 0:
            raise ParameterError(f"tau must lie in the upper half plane, got {self.tau}")
        if self.n < 1:
            raise ParameterError(f"n must be positive, got {self.n}")
        if self.truncation is not None and self.truncation < 1:
            raise ParameterError(f"truncation must be at least 1, got {self.truncation}")

    @property
    def eps(self) -> complex:
        return np.exp(2j * np.pi * complex(self.tau) / self.n)

    def cutoff(self, z: complex) -> int:
        """Smallest K whose dropped terms are below 1e-17 relative to 1."""
        if self.truncation is not None:
            return self.truncation
        t = complex(self.tau).imag
        y = complex(z).imag
        # log|term_k| = -2 pi k Im z - pi k (k-1) Im tau, a concave parabola in k
        def log_size(k: int) -> float:
            return -2 * math.pi * k * y - math.pi * k * (k - 1) * t

        apex = abs(0.5 - y / t)
        K = max(1, int(math.ceil(apex)) + 1)
        while log_size(K + 1) > _LOG_TOLERANCE or log_size(-K - 1) > _LOG_TOLERANCE:
            K += 1
        return K


def theta(z: complex, p: ThetaParams) -> complex:
    """The odd theta series truncated to |k| <= K."""
    z = complex(z)
    K = p.cutoff(z)
    k = np.arange(-K, K + 1)
    signs = np.where(k % 2 == 0, 1.0, -1.0)
    phases = 2j * np.pi * (k * z + k * (k - 1) * complex(p.tau) / 2)
    return complex(np.sum(signs * np.exp(phases)))


def theta_prefactor(z: complex, j: int, p: ThetaParams) -> complex:
    n, tau = p.n, complex(p.tau)
    return np.exp(2j * np.pi * (j * z + j * (j - n) * tau / (2 * n) + j / (2 * n)))


def theta_j(z: complex, j: int, p: ThetaParams) -> complex:
    """
    The degree-n theta function theta_j; the index is taken mod n.
    """
    n, tau = p.n, complex(p.tau)
    j %= n
    z = complex(z)
    product = 1.0 + 0j
    for l in range(n):
        product *= theta(z + l / n + j * tau / n, p)
    return complex(product * theta_prefactor(z, j, p))


def f(j: int, n: int) -> Fraction:
    """f(j) = jbar (n - jbar) / 2 with jbar = j mod n."""
    r = j % n
    return Fraction(r * (n - r), 2)


def g(j: int, l: int, n: int) -> Fraction:
    """g(j, l) = f(j) + f(l) - f(j + l)."""
    return f(j, n) + f(l, n) - f(j + l, n)


def g_properties(n: int) -> Dict[str, bool]:
    """
    Check the properties of g used by the degeneration argument, for all
    residues j, l in 1..n-1:

    - positive: g(j, l) is a positive integer;
    - rising: g(j-1, l) < g(j, l) whenever j + l <= n;
    - falling: g(j+1, l) < g(j, l) whenever j + l >= n;
    - minimal: g(j, l) = 1 iff (j, l) is (1, 1) or (n-1, n-1).
    """
    pairs = [(j, l) for j in range(1, n) for l in range(1, n)]
    positive = all(g(j, l, n) >= 1 and g(j, l, n).denominator == 1 for j, l in pairs)
    rising = all(g(j - 1, l, n) < g(j, l, n) for j, l in pairs if j + l <= n)
    falling = all(g(j + 1, l, n) < g(j, l, n) for j, l in pairs if j + l >= n)
    special = {(1, 1), (n - 1, n - 1)}
    minimal = all((g(j, l, n) == 1) == ((j, l) in special) for j, l in pairs)
    return {"positive": positive, "rising": rising, "falling": falling, "minimal": minimal}


@dataclass
class FOCoeffMatrix:
    """
    Relation coefficients c[i, j, r] of Q_{n,k}.

    Attributes:
        values (np.ndarray): Complex array of shape (n, n, n).
    """

    n: int
    k: int
    z: complex
    params: ThetaParams
    values: np.ndarray

    def __getitem__(self, index: Tuple[int, int, int]) -> complex:
        i, j, r = index
        n = self.n
        return complex(self.values[i % n, j % n, r % n])

    def relation(self, i: int, j: int) -> Dict[Tuple[int, int], complex]:
        """rel_ij = sum_r c[i, j, r] x_{j-r} x_{i+r}, as {word: coefficient}."""
        n = self.n
        terms: Dict[Tuple[int, int], complex] = {}
        for r in range(n):
            word = ((j - r) % n, (i + r) % n)
            terms[word] = terms.get(word, 0) + self[i, j, r]
        return terms

    def to_dict(self) -> Dict[str, object]:
        return {
            "n": self.n,
            "k": self.k,
            "z": [self.z.real, self.z.imag],
            "tau": [complex(self.params.tau).real, complex(self.params.tau).imag],
            "coefficients": [
                [[[c.real, c.imag] for c in row] for row in block] for block in self.values.tolist()
            ],
        }


def fo_relation_coeffs(n: int, k: int, z: complex, p: ThetaParams) -> FOCoeffMatrix:
    """
    All n^3 coefficients c[i, j, r].

    Raises:
        ParameterError: If gcd(n, k) != 1 or p.n != n.
        SingularParameterError: If some denominator is within 1e-12 of zero.
    """
    if math.gcd(n, k) != 1 or not 0 < k < n:
        raise ParameterError(f"need 0 < k < n with gcd(n, k) = 1, got n={n}, k={k}")
    if p.n != n:
        raise ParameterError(f"theta parameters are for n={p.n}, not n={n}")
    z = complex(z)
    at_zero = [theta_j(0, a, p) for a in range(n)]
    at_z = [theta_j(z, a, p) for a in range(n)]
    at_minus_z = [theta_j(-z, a, p) for a in range(n)]

    values = np.zeros((n, n, n), dtype=complex)
    for i in range(n):
        for j in range(n):
            for r in range(n):
                den = at_z[(k * r) % n] * at_minus_z[(j - i - r) % n]
                if abs(den) < 1e-12:
                    raise SingularParameterError(
                        f"denominator of c[{i},{j},{r}] vanishes at z={z}, tau={p.tau}"
                    )
                values[i, j, r] = at_zero[(j - i + r * (k - 1)) % n] / den
    return FOCoeffMatrix(n, k, z, p, values)


def fo_relations(coeffs: FOCoeffMatrix) -> List[Dict[Tuple[int, int], complex]]:
    """All n^2 relations rel_ij, ordered by (i, j)."""
    return [coeffs.relation(i, j) for i in range(coeffs.n) for j in range(coeffs.n)]


@dataclass
class DegenerationReport:
    """
    Deviations of the theta relations from their eps -> 0 limit.

    Attributes:
        order_zero_deviation: max relative error of -c[i,j,j-i]/c[i,j,0]
            against v^{lambda_ji}.
        vanishing_deviation: max |c| / max_r |c[i,j,r]| over the
            coefficients whose numerator index is 0 mod n.
        leading_deviation: max relative error of c[i,j,0] against
            v^{(j-i) mod n} / (1 - v^n).
        slope_deviation: max relative error of d log|c| / d Im(tau)
            against -2 pi g / n over the generic coefficients.
        linear_offsets: offsets (j - i) mod n carrying eps-linear terms.
        expected_offsets: the offsets k'+1 and -(k'+1) mod n.
        gammas: first order coefficients gamma_i at offset k'+1.
        sign_agreement: fraction of generic coefficients whose sign
            matches the sign rule of the asymptotic expansion.
    """

    n: int
    k: int
    order_zero_deviation: float
    vanishing_deviation: float
    leading_deviation: float
    slope_deviation: float
    linear_offsets: List[int]
    expected_offsets: List[int]
    gammas: List[complex] = field(default_factory=list)
    sign_agreement: float = 1.0

    @property
    def gammas_nonzero(self) -> bool:
        return all(abs(x) > 1e-8 for x in self.gammas)

    @property
    def offsets_ok(self) -> bool:
        return set(self.linear_offsets) <= set(self.expected_offsets) and bool(self.linear_offsets)

    def to_dict(self) -> Dict[str, object]:
        return {
            "n": self.n,
            "k": self.k,
            "order_zero_deviation": self.order_zero_deviation,
            "vanishing_deviation": self.vanishing_deviation,
            "leading_deviation": self.leading_deviation,
            "slope_deviation": self.slope_deviation,
            "linear_offsets": self.linear_offsets,
            "expected_offsets": self.expected_offsets,
            "gammas": [[x.real, x.imag] for x in self.gammas],
            "gammas_nonzero": self.gammas_nonzero,
            "sign_agreement": self.sign_agreement,
        }


def degeneration_check(n: int, k: int, z: complex, taus: Sequence[complex]) -> DegenerationReport:
    """
    Compare the theta relation coefficients with their eps -> 0 limit.

    Pointwise checks use the tau with the largest imaginary part; slopes use
    two-point differences of log|c| between consecutive taus.
    """
    taus = sorted((complex(t) for t in taus), key=lambda t: t.imag)
    if not taus:
        raise ParameterError("need at least one tau")
    z = complex(z)
    v = np.exp(2j * np.pi * z)
    lam = fo_matrix(n, k)
    k_inv = inverse_mod(k, n)
    all_coeffs = [fo_relation_coeffs(n, k, z, ThetaParams(t, n)) for t in taus]
    c = all_coeffs[-1]
    eps = ThetaParams(taus[-1], n).eps

    order_zero = 0.0
    vanishing = 0.0
    leading = 0.0
    generic: List[Tuple[int, int, int]] = []
    offsets = set()
    signs_total = signs_ok = 0
    overall = float(np.max(np.abs(c.values)))
    for i in range(n):
        for j in range(n):
            # Rows whose coefficients all vanish (i = j when k = 1) use the overall scale
            scale = max(
                (abs(c[i, j, r]) for r in range(n) if (j - i + r * (k - 1)) % n),
                default=overall,
            )
            for r in range(n):
                top = (j - i + r * (k - 1)) % n
                left = (k * r) % n
                right = (j - i - r) % n
                if top == 0:
                    vanishing = max(vanishing, abs(c[i, j, r]) / scale)
                elif left == 0:
                    expected = v ** ((j - i) % n) / (1 - v ** n)
                    leading = max(leading, abs(c[i, j, r] - expected) / abs(expected))
                elif right != 0:
                    generic.append((i, j, r))
                    if g(left, right, n) == 1:
                        offsets.add((j - i) % n)
                    # sign rule: + when kr + (j-i-r) stays below n
                    predicted = v ** (right - left) * eps ** float(g(left, right, n))
                    ratio = c[i, j, r] / predicted
                    sign = 1 if left + right < n else -1
                    signs_total += 1
                    signs_ok += int(abs(ratio - sign) < 0.5)
            if i != j:
                ratio = -c[i, j, (j - i) % n] / c[i, j, 0]
                expected = v ** float(lam[j, i])
                order_zero = max(order_zero, abs(ratio - expected) / abs(expected))

    slope = 0.0
    for (i, j, r) in generic:
        target = -2 * math.pi * float(g(k * r, j - i - r, n)) / n
        for lower, upper, t0, t1 in zip(all_coeffs, all_coeffs[1:], taus, taus[1:]):
            rise = math.log(abs(upper[i, j, r])) - math.log(abs(lower[i, j, r]))
            measured = rise / (t1.imag - t0.imag)
            slope = max(slope, abs(measured - target) / abs(target))

    shift = k_inv + 1
    gammas = []
    for i in range(n):
        j = (i + shift) % n
        gammas.append(-c[i, j, k_inv] / (c[i, j, 0] * eps))

    return DegenerationReport(
        n=n,
        k=k,
        order_zero_deviation=order_zero,
        vanishing_deviation=vanishing,
        leading_deviation=leading,
        slope_deviation=slope,
        linear_offsets=sorted(offsets),
        expected_offsets=sorted({shift % n, (-shift) % n}),
        gammas=gammas,
        sign_agreement=signs_ok / signs_total if signs_total else 1.0,
    )


if __name__ == "__main__":
    try:
        report = degeneration_check(5, 2, 0.07 + 0.02j, [8j, 10j, 12j])
        for key, value in report.to_dict().items():
            print(f"{key}: {value}")
        fo_relation_coeffs(4, 2, 0.1, ThetaParams(5j, 4))
    except ValueError as e:
        print(f"Error: {e}")
