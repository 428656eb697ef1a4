"""
Superpotentials and the Calabi-Yau Witness

A superpotential of degree n is a tensor Phi in (V*)^{(x)n}, stored as a map
from words of length n to scalars. The cyclic group Z/n acts by

    x_{i1} (x) x_{i2} (x) ... (x) x_{in}  ->  (-1)^{n-1} x_{i2} (x) ... (x) x_{in} (x) x_{i1}

For the q-symmetric algebra the q-antisymmetrized product

    Phi_0 = sum_sigma prod_{i<j, sigma_i > sigma_j} (-q_{sigma_j sigma_i}) x_{sigma_0} ... x_{sigma_{n-1}}

is invariant exactly when q is normalized. A flat deformation keeps the top
Koszul syzygy one-dimensional; it is computed here as the intersection of
V^{(x)i} (x) R (x) V^{(x)(n-i-2)} over all i, at rational parameters.
Writing Phi = sum_i x_i (x) v_i = (-1)^{n-1} sum_i v_i (x) x_i' defines the
twisting x_i -> x_i'; the algebra is Calabi-Yau when it is the identity.

Example:
    >>> phi = superpotential_q(fo_matrix(3, 1))
    >>> is_cyclically_invariant(phi)
    True
"""

import itertools
import logging
import random
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Dict, Iterator, List, Mapping, Optional, Sequence, Tuple

from deform import specialize_system
from exact import PoleError, RatFunc, as_rational
from matrix import AltMatrix, InconsistentSystemError, nullspace, rref, solve
from ncalg import RewriteSystem, Word

logger = logging.getLogger(__name__)


class SyzygyDimensionError(ValueError):
    """Raised when the top Koszul syzygy space is not one-dimensional."""

    def __init__(self, message: str, dimension: int):
        super().__init__(message)
        self.dimension = dimension


def _zero_like(values) -> object:
    return RatFunc.zero() if any(isinstance(x, RatFunc) for x in values) else Fraction(0)


class TensorElement:
    """
    A finitely supported element of the tensor algebra, {word: scalar}.

    Scalars are Fractions (after specialization) or RatFunc values.
    """

    __slots__ = ("_terms",)

    def __init__(self, terms: Optional[Mapping[Sequence[int], object]] = None):
        self._terms: Dict[Word, object] = {
            tuple(w): c for w, c in (terms or {}).items() if c != 0
        }

    def items(self) -> Iterator[Tuple[Word, object]]:
        return iter(sorted(self._terms.items()))

    def words(self) -> List[Word]:
        return sorted(self._terms)

    def coefficient(self, word: Sequence[int]) -> object:
        return self._terms.get(tuple(word), 0)

    def is_zero(self) -> bool:
        return not self._terms

    def degree(self) -> int:
        """Common word length; -1 for zero."""
        lengths = {len(w) for w in self._terms}
        if len(lengths) > 1:
            raise ValueError("tensor element is not homogeneous")
        return lengths.pop() if lengths else -1

    def scale(self, factor) -> "TensorElement":
        return TensorElement({w: c * factor for w, c in self._terms.items()})

    def map(self, func: Callable[[object], object]) -> "TensorElement":
        return TensorElement({w: func(c) for w, c in self._terms.items()})

    def left_derivative(self, letter: int) -> "TensorElement":
        """Strip a leading x_letter: Phi = sum_i x_i (x) left_derivative(i)."""
        return TensorElement({w[1:]: c for w, c in self._terms.items() if w and w[0] == letter})

    def right_derivative(self, letter: int) -> "TensorElement":
        return TensorElement({w[:-1]: c for w, c in self._terms.items() if w and w[-1] == letter})

    def rotate(self) -> "TensorElement":
        """One step of the signed cyclic action."""
        sign = -1 if self.degree() % 2 == 0 else 1
        return TensorElement({w[1:] + w[:1]: c * sign for w, c in self._terms.items()})

    def normalized(self, word: Optional[Sequence[int]] = None) -> "TensorElement":
        """Rescale so the coefficient of `word` (or of the first word) is 1."""
        if self.is_zero():
            return self
        pivot = self.coefficient(word) if word is not None else 0
        if pivot == 0:
            pivot = self._terms[min(self._terms)]
        return self.scale(1 / pivot)

    def __add__(self, other: "TensorElement") -> "TensorElement":
        terms = dict(self._terms)
        for w, c in other._terms.items():
            terms[w] = terms[w] + c if w in terms else c
        return TensorElement(terms)

    def __sub__(self, other: "TensorElement") -> "TensorElement":
        return self + other.scale(-1)

    def __eq__(self, other) -> bool:
        if not isinstance(other, TensorElement):
            return NotImplemented
        return (self - other).is_zero()

    def __hash__(self) -> int:
        return hash(frozenset(self._terms.items()))

    def __len__(self) -> int:
        return len(self._terms)

    def __repr__(self) -> str:
        return f"TensorElement({self})"

    def __str__(self) -> str:
        if not self._terms:
            return "0"
        return " + ".join(
            f"[{c}]*" + "(x)".join(f"x{x}" for x in w) for w, c in self.items()
        )

    def to_dict(self) -> Dict[str, str]:
        return {" ".join(str(x) for x in w): str(c) for w, c in self.items()}


def superpotential_q(m: AltMatrix) -> TensorElement:
    """
    The q-antisymmetrized product of x_0..x_{n-1} for q_ij = v^{m_ij}.

    Every one of the n! permutation words appears with coefficient
    +-v^e, the sign counting inversions.
    """
    n = m.n
    terms = {}
    for sigma in itertools.permutations(range(n)):
        exponent = 0
        inversions = 0
        for i, j in itertools.combinations(range(n), 2):
            if sigma[i] > sigma[j]:
                exponent += m[sigma[j], sigma[i]]
                inversions += 1
        if Fraction(exponent).denominator != 1:
            raise ValueError("superpotential_q needs an integer exponent matrix")
        terms[sigma] = RatFunc.monomial(int(exponent), (-1) ** inversions)
    return TensorElement(terms)


def is_cyclically_invariant(phi: TensorElement) -> bool:
    return phi.rotate() == phi


def relations_from_potential(phi: TensorElement) -> List[TensorElement]:
    """
    The nonzero quadratic derivatives d_{i1} ... d_{i(n-2)} Phi, which span
    the relations of the algebra D(Phi) (taken through left derivatives).
    """
    cut = phi.degree() - 2
    grouped: Dict[Word, Dict[Word, object]] = {}
    for w, c in phi.items():
        grouped.setdefault(w[:cut], {})[w[cut:]] = c
    return [TensorElement(terms) for _, terms in sorted(grouped.items())]


def _letters(phi: TensorElement) -> int:
    return max((max(w) for w in phi.words() if w), default=-1) + 1


def relation_vectors(system: RewriteSystem) -> List[TensorElement]:
    """
    Relations x_b x_a - remainder of a specialized system as quadratic
    tensors with Fraction coefficients.

    Raises:
        ValueError: If some coefficient still depends on eps or v.
    """
    relations = []
    for lead, remainder in system.rules.items():
        terms: Dict[Word, object] = {lead: Fraction(1)}
        for word, coeff in remainder.items():
            if coeff.degree() > 0:
                raise ValueError(f"rule for {lead} still depends on eps")
            value = coeff.coefficient(0).constant_value()
            terms[word] = terms.get(word, Fraction(0)) - value
        relations.append(TensorElement(terms))
    return relations


def _dual_basis(relations: Sequence[TensorElement], n: int) -> List[Dict[Word, Fraction]]:
    """Basis of the functionals on V (x) V vanishing on the relations."""
    pairs = list(itertools.product(range(n), repeat=2))
    rows = [[r.coefficient(p) for p in pairs] for r in relations]
    basis = nullspace(rows, len(pairs))
    return [{p: x for p, x in zip(pairs, vector) if x != 0} for vector in basis]


def _extend(
    basis: Sequence[Dict[Word, Fraction]],
    dual: Sequence[Dict[Word, Fraction]],
    n: int,
) -> List[Dict[Word, Fraction]]:
    """
    (W (x) V) intersected with V^{(x)(k-1)} (x) R for W of degree k, as a
    basis of new vectors.
    """
    candidates = [
        {w + (s,): c for w, c in vector.items()} for vector in basis for s in range(n)
    ]
    equations: Dict[Tuple[Word, int], Dict[int, Fraction]] = {}
    for column, vector in enumerate(candidates):
        for word, c in vector.items():
            prefix, pair = word[:-2], word[-2:]
            for index, functional in enumerate(dual):
                weight = functional.get(pair)
                if weight is None:
                    continue
                row = equations.setdefault((prefix, index), {})
                row[column] = row.get(column, Fraction(0)) + weight * c
    rows = [
        [row.get(col, Fraction(0)) for col in range(len(candidates))]
        for _, row in sorted(equations.items())
        if any(x != 0 for x in row.values())
    ]
    kernel = nullspace(rows, len(candidates))
    result = []
    for combination in kernel:
        vector: Dict[Word, Fraction] = {}
        for coeff, candidate in zip(combination, candidates):
            if coeff == 0:
                continue
            for word, c in candidate.items():
                vector[word] = vector.get(word, Fraction(0)) + coeff * c
        result.append({w: c for w, c in vector.items() if c != 0})
    return result


def koszul_dual_dimensions(system: RewriteSystem, n: Optional[int] = None) -> List[int]:
    """
    Dimensions of the intersections W_k, k = 0..n (W_0 = 1, W_1 = V,
    W_2 = R). A PBW deformation of a polynomial ring gives C(n, k).
    """
    return [len(b) for b in _syzygy_spaces(system, n)]


def _syzygy_spaces(system: RewriteSystem, n: Optional[int] = None) -> List[List[Dict[Word, Fraction]]]:
    n = n or system.n
    relations = relation_vectors(system)
    dual = _dual_basis(relations, system.n)
    spaces: List[List[Dict[Word, Fraction]]] = [[{(): Fraction(1)}]]
    if n >= 1:
        spaces.append([{(x,): Fraction(1)} for x in range(system.n)])
    if n >= 2:
        pairs = list(itertools.product(range(system.n), repeat=2))
        rows = [[r.coefficient(p) for p in pairs] for r in relations]
        reduced, _ = rref(rows)
        spaces.append([{p: x for p, x in zip(pairs, row) if x != 0} for row in reduced])
    for degree in range(3, n + 1):
        spaces.append(_extend(spaces[-1], dual, system.n))
        logger.debug("syzygy space of degree %d has dimension %d", degree, len(spaces[-1]))
    return spaces


def top_syzygy(system: RewriteSystem, n: Optional[int] = None) -> TensorElement:
    """
    The top Koszul syzygy of a specialized confluent system, normalized so
    the coefficient of x_0 ... x_{n-1} is 1 (or the first nonzero one).

    Raises:
        SyzygyDimensionError: If the space is not one-dimensional.
    """
    n = n or system.n
    space = _syzygy_spaces(system, n)[-1]
    if len(space) != 1:
        raise SyzygyDimensionError(
            f"top syzygy space has dimension {len(space)}, expected 1", len(space)
        )
    return TensorElement(space[0]).normalized(tuple(range(n)))


@dataclass
class TwistReport:
    twist_matrix: Optional[List[List[object]]]
    is_identity: bool
    caveat: str = ""
    dimension: Optional[int] = None
    specialization: Dict[str, str] = field(default_factory=dict)

    def to_dict(self) -> Dict[str, object]:
        return {
            "dimension": self.dimension,
            "twist_matrix": (
                [[str(x) for x in row] for row in self.twist_matrix]
                if self.twist_matrix is not None
                else None
            ),
            "is_identity": self.is_identity,
            "caveat": self.caveat,
            "specialization": self.specialization,
        }


def cyclic_check(phi: TensorElement) -> TwistReport:
    """
    Solve Phi = (-1)^{n-1} sum_i v_i (x) x_i' for the twisting x_i -> x_i',
    where Phi = sum_i x_i (x) v_i.

    Dependent v_i are reported in the caveat; a missing twist gives
    twist_matrix None.
    """
    n = phi.degree()
    letters = _letters(phi)
    sign = -1 if n % 2 == 0 else 1
    heads = [phi.left_derivative(i) for i in range(letters)]
    tails = [phi.right_derivative(j).scale(sign) for j in range(letters)]
    zero = _zero_like([c for _, c in phi.items()])
    one = zero + 1

    words = sorted({w for v in heads + tails for w in v.words()})
    rows = [[v.coefficient(w) for v in heads] for w in words]
    rows = [[x if x != 0 else zero for x in row] for row in rows]
    caveat = ""
    _, pivots = rref(rows)
    if len(pivots) < letters:
        caveat = f"the v_i span only {len(pivots)} of {letters} dimensions"

    # column j of the twist expresses the tail for x_j in the heads
    columns = []
    for tail in tails:
        rhs = [tail.coefficient(w) for w in words]
        rhs = [x if x != 0 else zero for x in rhs]
        try:
            solution, _ = solve(rows, rhs, ncols=letters, zero=zero)
        except InconsistentSystemError:
            return TwistReport(None, False, caveat or "no twisting map exists")
        columns.append(solution)
    matrix = [[columns[j][i] for j in range(letters)] for i in range(letters)]
    identity = all(
        matrix[i][j] == (one if i == j else zero) for i in range(letters) for j in range(letters)
    )
    return TwistReport(matrix, identity, caveat)


def random_points(rng: random.Random, count: int) -> List[Tuple[Fraction, Fraction]]:
    """(eps0, v0) pairs of small nonzero rationals with v0 away from 0 and 1."""
    points = []
    while len(points) < count:
        v0 = Fraction(rng.randint(2, 9), rng.randint(1, 4))
        eps0 = Fraction(rng.choice([-1, 1]) * rng.randint(1, 7), rng.randint(1, 3))
        if v0 != 1 and (eps0, v0) not in points:
            points.append((eps0, v0))
    return points


def calabi_yau_check(
    system: RewriteSystem,
    points: Sequence[Tuple[object, object]],
    n: Optional[int] = None,
) -> List[TwistReport]:
    """
    Top syzygy dimension and twisting of `system` specialized at each
    (eps0, v0). Points that hit a pole are reported, not raised.
    """
    reports = []
    for eps0, v0 in points:
        eps0, v0 = as_rational(eps0), as_rational(v0)
        where = {"eps": str(eps0), "v": str(v0)}
        logger.info("checking Calabi-Yau witness at eps=%s, v=%s", eps0, v0)
        try:
            concrete = specialize_system(system, eps0, v0)
            phi = top_syzygy(concrete, n)
        except PoleError as exc:
            reports.append(TwistReport(None, False, str(exc), None, where))
            continue
        except SyzygyDimensionError as exc:
            reports.append(TwistReport(None, False, str(exc), exc.dimension, where))
            continue
        report = cyclic_check(phi)
        report.dimension = 1
        report.specialization = where
        reports.append(report)
    return reports


if __name__ == "__main__":
    from matrix import fo_matrix

    try:
        lam = fo_matrix(3, 1)
        phi = superpotential_q(lam)
        print(f"Phi_0 = {phi}")
        print(f"cyclically invariant: {is_cyclically_invariant(phi)}")
        print(f"twist: {cyclic_check(phi).to_dict()}")
    except ValueError as e:
        print(f"Error: {e}")
