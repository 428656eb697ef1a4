"""
Torus Weights

A weight is an integer vector w in Z^n, the torus weight of a monomial,
relation or cohomology class. A weight is relevant when every entry is at
least -1 and the entries sum to zero; only relevant weights can carry
diagonally invariant cohomology.

- Poisson-contributing (lambda): sum_j lambda[i][j] w_j = 0 for every i
  with w_i >= 0.
- Hochschild-contributing (q = v^m, v formal): prod_j q_ij^{w_j} = 1 for
  every i with w_i >= 0, i.e. sum_j m[i][j] w_j = 0.
- Smoothable: contributing with exactly two entries equal to -1.
- Obstructed: contributing with exactly three entries equal to -1.

Example:
    >>> b = from_numerators([[0, 2, -4, -4, 6], [-2, 0, 3, 1, -2],
    ...                      [4, -3, 0, 1, -2], [4, -1, -1, 0, -2],
    ...                      [-6, 2, 2, 2, 0]])
    >>> smoothable_weights(b)
    {(0, 4): (-1, 0, 1, 1, -1), (1, 2): (2, -1, -1, 0, 0), (2, 3): (0, 2, -1, -1, 0)}
"""

import itertools
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Dict, List, Optional, Sequence, Tuple

from exact import LaurentPoly
from matrix import AltMatrix, ValidationError, corank, rank_of_rows

Weight = Tuple[int, ...]
Edge = Tuple[int, int]


@dataclass(frozen=True)
class GenericityReport:
    """Result of the genericity test for a Poisson matrix."""

    corank_ok: bool
    contributing_equal: bool
    relevant_contributing: List[Weight] = field(default_factory=list)
    diagnostics: str = ""

    @property
    def generic(self) -> bool:
        return self.corank_ok and self.contributing_equal

    def to_dict(self) -> Dict[str, object]:
        return {
            "corank_ok": self.corank_ok,
            "contributing_equal": self.contributing_equal,
            "relevant_contributing": [list(w) for w in self.relevant_contributing],
            "diagnostics": self.diagnostics,
        }


def relevant_weights(n: int) -> List[Weight]:
    """
    All integer vectors with entries >= -1 summing to zero, in lexicographic
    order. There are C(2n-1, n-1) of them (shift by one and count
    compositions of n into n parts).
    """
    weights: List[Weight] = []

    def extend(prefix: List[int], remaining: int, slots: int) -> None:
        # remaining is what the last `slots` entries must sum to
        if slots == 1:
            weights.append(tuple(prefix + [remaining]))
            return
        # every later entry is at least -1
        for value in range(-1, remaining + slots):
            extend(prefix + [value], remaining - value, slots - 1)

    extend([], 0, n)
    return weights


def is_relevant(w: Sequence[int]) -> bool:
    """
    Check whether w can carry a bivector x_k x_l d_i d_j.

    Args:
        w (Sequence[int]): A weight in Z^n.

    Returns:
        bool: True iff every entry is at least -1 and the entries sum to 0.
    """
    return min(w) >= -1 and sum(w) == 0


def is_poisson_contributing(lam: AltMatrix, w: Sequence[int]) -> bool:
    """True iff w >= -1 entrywise and sum_j lam[i][j] w_j = 0 whenever w_i >= 0."""
    if min(w) < -1:
        return False
    for i in range(lam.n):
        if w[i] >= 0 and sum(lam[i, j] * w[j] for j in range(lam.n)) != 0:
            return False
    return True


def is_hochschild_contributing(m: AltMatrix, w: Sequence[int]) -> bool:
    """
    Hochschild test for q_ij = v^{m_ij} with v formal: the monomial
    prod_j q_ij^{w_j} must equal 1 for every i with w_i >= 0.

    Raises:
        ValidationError: If m has non-integer entries.
    """
    if not m.is_integral():
        raise ValidationError("Hochschild weights need an integer exponent matrix")
    if min(w) < -1:
        return False
    one = LaurentPoly.monomial(0)
    for i in range(m.n):
        if w[i] < 0:
            continue
        product = one
        for j in range(m.n):
            product = product * LaurentPoly.monomial(int(m[i, j])) ** w[j]
        if product != one:
            return False
    return True


def theta_from_rows(b: AltMatrix, i: int, j: int) -> Tuple[Fraction, ...]:
    """The candidate weight (b_j - b_i) / b_ij for the pair {i, j}."""
    return tuple((b[j, k] - b[i, k]) / b[i, j] for k in range(b.n))


def smoothable_weights(b: AltMatrix) -> Dict[Edge, Weight]:
    """
    Smoothable weights of a normalized biresidue matrix, keyed by edge i < j.

    For b_ij != 0 the candidate has w_i = w_j = -1 and
    w_k = (b_jk + b_ki) / b_ij otherwise; it is kept iff every such w_k
    is a nonnegative integer.
    """
    found: Dict[Edge, Weight] = {}
    for i, j in itertools.combinations(range(b.n), 2):
        if b[i, j] == 0:
            continue
        candidate = theta_from_rows(b, i, j)
        if candidate[i] != -1 or candidate[j] != -1:
            continue
        rest = [candidate[k] for k in range(b.n) if k not in (i, j)]
        if all(x >= 0 and x.denominator == 1 for x in rest):
            found[(i, j)] = tuple(int(x) for x in candidate)
    return found


def _in_row_span(b: AltMatrix, rows: Sequence[int], w: Sequence[int]) -> bool:
    vectors = [b.row(i) for i in rows]
    return rank_of_rows(vectors) == rank_of_rows(vectors + [list(w)])


def is_obstructed(b: AltMatrix, w: Sequence[int]) -> bool:
    """Three entries equal to -1, the rest nonnegative, and w in the span of those rows of b."""
    negatives = [i for i, x in enumerate(w) if x == -1]
    if len(negatives) != 3 or any(x < -1 for x in w):
        return False
    return _in_row_span(b, negatives, w)


def is_row_span_contributing(b: AltMatrix, w: Sequence[int]) -> bool:
    """
    Second contributing test through the biresidue matrix: a relevant w is
    Poisson-contributing for lambda iff w lies in the span of the rows
    b_i with w_i = -1.
    """
    if not is_relevant(w):
        return False
    negatives = [i for i, x in enumerate(w) if x == -1]
    if not negatives:
        return all(x == 0 for x in w)
    return _in_row_span(b, negatives, w)


def hh_weight_dims(w: Sequence[int]) -> List[int]:
    """
    Dimensions of a contributing weight space of Hochschild cohomology in
    degrees 0..n: C(#{w_j >= 0}, p - #{w_j = -1}).
    """
    n = len(w)
    free = sum(1 for x in w if x >= 0)
    shift = sum(1 for x in w if x == -1)
    return [math.comb(free, p - shift) if p >= shift else 0 for p in range(n + 1)]


def genericity_report(lam: AltMatrix, denominator: Optional[int] = None) -> GenericityReport:
    """
    Check corank one and compare the Hochschild- and Poisson-contributing
    relevant weights (q = v^{d*lambda} with v formal).
    """
    d = denominator or lam.denominator
    corank_ok = corank(lam) == 1
    m = lam.scaled(d)
    notes = []
    if not m.is_integral():
        notes.append(f"{d} * lambda is not integral, Hochschild side skipped")
        hochschild = None
    else:
        hochschild = []

    poisson = []
    for w in relevant_weights(lam.n):
        if is_poisson_contributing(lam, w):
            poisson.append(w)
        if hochschild is not None and is_hochschild_contributing(m, w):
            hochschild.append(w)

    equal = hochschild is not None and hochschild == poisson
    if not corank_ok:
        notes.append(f"corank is {corank(lam)}, expected 1")
    if hochschild is not None and not equal:
        extra = sorted(set(hochschild) - set(poisson))
        notes.append(f"Hochschild-only contributing weights: {extra}")
    return GenericityReport(
        corank_ok=corank_ok,
        contributing_equal=equal,
        relevant_contributing=poisson,
        diagnostics="; ".join(notes) or "ok",
    )


def obstructed_combinations(
    b: AltMatrix, thetas: Sequence[Weight], max_total: int = 8
) -> List[Tuple[int, ...]]:
    """
    Multiplicity vectors nu (1 <= sum nu <= max_total) whose combination
    sum nu_i theta_i is an obstructed weight.
    """
    found = []
    for total in range(1, max_total + 1):
        for nu in _compositions(total, len(thetas)):
            w = [sum(k * t[c] for k, t in zip(nu, thetas)) for c in range(b.n)]
            if is_obstructed(b, w):
                found.append(nu)
    return found


def _compositions(total: int, parts: int):
    if parts == 0:
        if total == 0:
            yield ()
        return
    if parts == 1:
        yield (total,)
        return
    for first in range(total, -1, -1):
        for rest in _compositions(total - first, parts - 1):
            yield (first,) + rest


if __name__ == "__main__":
    from matrix import biresidue, from_numerators

    lam = from_numerators(
        [
            [0, 1, -1, 3, -3],
            [-1, 0, -12, 12, 1],
            [1, 12, 0, -6, -7],
            [-3, -12, 6, 0, 9],
            [3, -1, 7, -9, 0],
        ],
        30,
    )
    print(f"relevant weights for n=3: {len(relevant_weights(3))}")
    report = genericity_report(lam, 30)
    print(f"generic: {report.generic} ({report.diagnostics})")
    b = biresidue(lam)
    for edge, theta in smoothable_weights(b).items():
        print(f"edge {edge}: theta = {theta}, HH dims {hh_weight_dims(theta)}")
