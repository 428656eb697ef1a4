"""
Flat Deformations Along Smoothable Edges

Given a Poisson matrix lambda = m / d and a cycle-free set I of smoothable
edges with nonzero scalars gamma_i, the q-symmetric algebra with
q_ij = v^{m_ij} deforms flatly to relations

    x_b x_a = v^{m_ba} x_a x_b + sum_{m >= 1} eps^m sum C_ba^kl x_k x_l

where the weight -e_a - e_b + e_k + e_l of every correction term is a sum
of exactly m smoothable weights theta_i (i in I). The level-one constants
are the gammas; higher constants are forced by confluence. They are found
level by level: reduce every overlap x_c x_b x_a both ways with the lower
constants substituted, read off the eps^m coefficient of the difference on
each normal word, and solve the resulting linear system over Q(v).

Cycles of smoothable edges are handled numerically instead, by gluing the
exact chain part to Feigin-Odesskii theta relations (assemble_mixed).

Example:
    >>> ansatz = build_ansatz(lam, [(1, 2), (2, 3), (0, 4)])
    >>> solved = solve_confluence(ansatz)
    >>> str(solved.values["C_40^11"])
    'v^24/(v^30-1)'
"""

import cmath
import itertools
import logging
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Dict, List, Mapping, Optional, Sequence, Tuple

from diagram import (
    CycleClassification,
    build_diagram,
    classify_cycle,
    decompose,
    restrict,
)
from exact import EpsPoly, RatFunc, as_rational, evaluate
from fo import ThetaParams, fo_relation_coeffs
from matrix import (
    AltMatrix,
    InconsistentSystemError,
    ParameterError,
    biresidue,
    rank_of_rows,
    solve,
)
from ncalg import (
    FiltrationOracle,
    NCPoly,
    RewriteSystem,
    check_diamond,
    overlap_difference,
    overlap_triples,
)
from weights import Edge, Weight, genericity_report

logger = logging.getLogger(__name__)


class CyclePresentError(ValueError):
    """Raised when the chosen edges contain a cycle (or dependent weights)."""


class UnsolvableError(ValueError):
    """Raised when the confluence equations of some level have no solution."""


class InternalConsistencyError(ValueError):
    """Raised when a solved system fails its final confluence check."""


@dataclass(frozen=True)
class QuadraticTerm:
    """
    A correction term eps^level C x_k x_l in the relation for x_b x_a.

    Attributes:
        coords: Multiplicity of each smoothable weight in the term's weight.
    """

    a: int
    b: int
    k: int
    l: int
    weight: Weight
    coords: Tuple[int, ...]

    @property
    def level(self) -> int:
        return sum(self.coords)

    @property
    def lead(self) -> Tuple[int, int]:
        return (self.b, self.a)

    @property
    def word(self) -> Tuple[int, int]:
        return (self.k, self.l)

    @property
    def name(self) -> str:
        sep = "" if max(self.a, self.b, self.k, self.l) < 10 else ","
        return f"C_{self.b}{sep}{self.a}^{self.k}{sep}{self.l}"


def _coordinates(thetas: Sequence[Weight], w: Sequence[int]) -> Optional[Tuple[Fraction, ...]]:
    """Coordinates of w in the basis thetas, or None when w is outside their span."""
    n = len(w)
    rows = [[Fraction(t[c]) for t in thetas] for c in range(n)]
    try:
        coords, _ = solve(rows, [Fraction(x) for x in w], ncols=len(thetas))
    except InconsistentSystemError:
        return None
    return tuple(coords)


def _check_independent(thetas: Sequence[Weight]) -> None:
    if thetas and rank_of_rows(thetas) != len(thetas):
        raise CyclePresentError("smoothable weights are linearly dependent; the edges contain a cycle")


def quadratic_weights(thetas: Sequence[Weight], n: int) -> Dict[int, List[QuadraticTerm]]:
    """
    Quadratic weights -e_a - e_b + e_k + e_l (a < b, k <= l) that are sums of
    smoothable weights, grouped by level (the number of summands).

    Raises:
        CyclePresentError: If the thetas are linearly dependent.
    """
    _check_independent(thetas)
    levels: Dict[int, List[QuadraticTerm]] = {}
    if not thetas:
        return levels
    for a, b in itertools.combinations(range(n), 2):
        for k, l in itertools.combinations_with_replacement(range(n), 2):
            w = [0] * n
            w[a] -= 1
            w[b] -= 1
            w[k] += 1
            w[l] += 1
            if not any(w):
                continue
            coords = _coordinates(thetas, w)
            if coords is None or any(x < 0 or x.denominator != 1 for x in coords):
                continue
            term = QuadraticTerm(a, b, k, l, tuple(w), tuple(int(x) for x in coords))
            levels.setdefault(term.level, []).append(term)
    for terms in levels.values():
        terms.sort(key=lambda t: (t.a, t.b, t.k, t.l))
    return dict(sorted(levels.items()))


def difference_weights(thetas: Sequence[Weight], n: int) -> List[Tuple[int, int, Tuple[int, ...]]]:
    """
    Weights e_a - e_b lying in some level of the filtration, as
    (a, b, coordinates). When none exist the constants are unique.
    """
    _check_independent(thetas)
    found = []
    if not thetas:
        return found
    for a, b in itertools.permutations(range(n), 2):
        w = [0] * n
        w[a], w[b] = 1, -1
        coords = _coordinates(thetas, w)
        if coords is not None and all(x >= 0 and x.denominator == 1 for x in coords):
            found.append((a, b, tuple(int(x) for x in coords)))
    return found


@dataclass(frozen=True)
class AnsatzTerm:
    term: QuadraticTerm
    fixed: Optional[RatFunc]

    @property
    def name(self) -> str:
        return self.term.name

    @property
    def level(self) -> int:
        return self.term.level


@dataclass
class Ansatz:
    """
    Relation skeleton over a cycle-free edge set: q-terms, level-one terms
    fixed to the gammas and unknown constants at levels 2..max_level.
    """

    m: AltMatrix
    edges: Tuple[Edge, ...]
    thetas: Tuple[Weight, ...]
    gammas: Tuple[Fraction, ...]
    terms: Tuple[AnsatzTerm, ...]
    oracle: FiltrationOracle
    differences: List[Tuple[int, int, Tuple[int, ...]]] = field(default_factory=list)

    @property
    def n(self) -> int:
        return self.m.n

    @property
    def max_level(self) -> int:
        return max((t.level for t in self.terms), default=0)

    def unknowns(self, level: Optional[int] = None) -> List[AnsatzTerm]:
        return [
            t for t in self.terms if t.fixed is None and (level is None or t.level == level)
        ]

    def q(self, b: int, a: int) -> RatFunc:
        """q_ba = v^{m_ba}, the coefficient of x_a x_b in the rule for x_b x_a."""
        return RatFunc.monomial(int(self.m[b, a]))

    def system(self, values: Mapping[str, RatFunc], verify_order: bool = False) -> RewriteSystem:
        """Rewrite system with unknowns taken from values (missing ones are 0)."""
        rules: Dict[Tuple[int, int], Dict[Tuple[int, int], EpsPoly]] = {}
        for a, b in itertools.combinations(range(self.n), 2):
            rules[(b, a)] = {(a, b): EpsPoly([self.q(b, a)])}
        for t in self.terms:
            value = t.fixed if t.fixed is not None else values.get(t.name)
            if value is None or value == 0:
                continue
            remainder = rules[t.term.lead]
            term = EpsPoly.term(value, t.level)
            word = t.term.word
            remainder[word] = remainder[word] + term if word in remainder else term
        return RewriteSystem(
            self.n,
            {lead: NCPoly(terms) for lead, terms in rules.items()},
            self.oracle,
            verify_order=verify_order,
        )


def build_ansatz(
    lam: AltMatrix,
    edges: Sequence[Edge],
    gammas: Optional[Sequence[object]] = None,
) -> Ansatz:
    """
    Set up the relation skeleton for a Poisson matrix and smoothable edges.

    Args:
        lam (AltMatrix): Poisson matrix; lam * lam.denominator must be an
            integer matrix (the exponents m of q = v^m).
        edges: Smoothable edges {i, j}.
        gammas: Nonzero level-one constants, one per edge (default all 1).

    Raises:
        ParameterError: For non-generic lam, non-smoothable edges or bad gammas.
        CyclePresentError: If the edges contain a cycle.
    """
    m = lam.exponents()
    report = genericity_report(lam)
    if not report.generic:
        raise ParameterError(f"Poisson matrix is not generic: {report.diagnostics}")
    edges = tuple((min(i, j), max(i, j)) for i, j in edges)
    if len(set(edges)) != len(edges):
        raise ParameterError(f"repeated edges in {list(edges)}")
    gammas = tuple(as_rational(x) for x in (gammas if gammas is not None else [1] * len(edges)))
    if len(gammas) != len(edges):
        raise ParameterError(f"{len(edges)} edges but {len(gammas)} gammas")
    if any(x == 0 for x in gammas):
        raise ParameterError("gammas must be nonzero")

    diagram = build_diagram(biresidue(lam))
    try:
        chosen = restrict(diagram, edges)
    except ValueError as exc:
        raise ParameterError(str(exc)) from exc
    parts = decompose(chosen)
    if parts.cycles:
        raise CyclePresentError(f"edges contain the cycle(s) {parts.cycles}")

    thetas = tuple(chosen.edge(i, j).weight for i, j in edges)
    gamma_of = dict(zip(thetas, gammas))
    terms = []
    for level, found in quadratic_weights(thetas, lam.n).items():
        for term in found:
            fixed = RatFunc.coerce(gamma_of[term.weight]) if level == 1 else None
            terms.append(AnsatzTerm(term, fixed))
    terms.sort(key=lambda t: (t.level, t.term.a, t.term.b, t.term.k, t.term.l))
    oracle = FiltrationOracle(thetas, lam.n)
    return Ansatz(m, edges, thetas, gammas, tuple(terms), oracle, difference_weights(thetas, lam.n))


@dataclass(frozen=True)
class LevelRecord:
    level: int
    unknowns: Tuple[str, ...]
    equations: int
    zero_filled: Tuple[str, ...]

    def to_dict(self) -> Dict[str, object]:
        return {
            "level": self.level,
            "unknowns": list(self.unknowns),
            "equations": self.equations,
            "zero_filled": list(self.zero_filled),
        }


@dataclass
class SolverLog:
    max_level: int
    levels: List[LevelRecord] = field(default_factory=list)
    difference_weights: List[Tuple[int, int, Tuple[int, ...]]] = field(default_factory=list)

    @property
    def gauge_dimension(self) -> int:
        return sum(len(r.zero_filled) for r in self.levels)

    def to_dict(self) -> Dict[str, object]:
        return {
            "max_level": self.max_level,
            "levels": [r.to_dict() for r in self.levels],
            "difference_weights": [[a, b, list(c)] for a, b, c in self.difference_weights],
            "gauge_dimension": self.gauge_dimension,
        }


@dataclass
class SolvedSystem:
    ansatz: Ansatz
    values: Dict[str, RatFunc]
    system: RewriteSystem
    log: SolverLog

    def coefficient(self, name: str) -> RatFunc:
        for t in self.ansatz.terms:
            if t.name == name:
                return t.fixed if t.fixed is not None else self.values[name]
        raise KeyError(name)

    def relations(self) -> List[Dict[str, object]]:
        """Relations as {a, b, terms: [{k, l, eps_power, coeff}]}, q-term first."""
        result = []
        for (b, a), remainder in sorted(self.system.rules.items(), key=lambda x: (x[0][1], x[0][0])):
            terms = []
            for word, coeff in remainder.items():
                for power, value in coeff.items():
                    terms.append(
                        {"k": word[0], "l": word[1], "eps_power": power, "coeff": str(value)}
                    )
            terms.sort(key=lambda t: (t["eps_power"], t["k"], t["l"]))
            result.append({"a": a, "b": b, "terms": terms})
        return result

    def to_dict(self) -> Dict[str, object]:
        return {
            "relations": self.relations(),
            "coefficients": {name: str(value) for name, value in sorted(self.values.items())},
            "solver_log": self.log.to_dict(),
        }


def _eps_coefficients(
    ansatz: Ansatz, values: Mapping[str, RatFunc], level: int, workers: int
) -> Dict[Tuple, RatFunc]:
    """eps^level coefficient of every overlap difference, keyed by (triple, word)."""
    system = ansatz.system(values)
    triples = overlap_triples(ansatz.n)
    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            diffs = list(pool.map(lambda t: overlap_difference(system, t, cap=level), triples))
    else:
        diffs = [overlap_difference(system, t, cap=level) for t in triples]
    found = {}
    for triple, diff in zip(triples, diffs):
        for word, value in diff.eps_coefficient(level).items():
            found[(triple, word)] = value
    return found


def solve_confluence(ansatz: Ansatz, workers: int = 1) -> SolvedSystem:
    """
    Determine the unknown constants level by level.

    At level m the unknowns of level m enter the eps^m part of the overlap
    differences linearly, so the equations are read off from one reduction
    with them set to 0 and one per unknown set to 1. Free unknowns are set
    to 0 and logged.

    Raises:
        UnsolvableError: If some level's equations are inconsistent.
        InternalConsistencyError: If the final system is not confluent.
    """
    values: Dict[str, RatFunc] = {}
    log = SolverLog(ansatz.max_level, difference_weights=list(ansatz.differences))
    if ansatz.differences:
        logger.warning("weights e_a - e_b occur in the filtration: %s", ansatz.differences)

    for level in range(2, ansatz.max_level + 1):
        unknowns = ansatz.unknowns(level)
        names = [u.name for u in unknowns]
        base = _eps_coefficients(ansatz, values, level, workers)
        columns = []
        for name in names:
            probe = _eps_coefficients(ansatz, {**values, name: RatFunc.one()}, level, workers)
            columns.append(
                {
                    key: probe.get(key, RatFunc.zero()) - base.get(key, RatFunc.zero())
                    for key in set(probe) | set(base)
                }
            )
        keys = sorted(set(base).union(*columns) if columns else set(base))
        rows = [[col.get(key, RatFunc.zero()) for col in columns] for key in keys]
        rhs = [-base.get(key, RatFunc.zero()) for key in keys]
        rows_used = [i for i, row in enumerate(rows) if any(x != 0 for x in row) or rhs[i] != 0]

        if not names:
            if any(x != 0 for x in rhs):
                raise UnsolvableError(f"level {level} has no unknowns but nonzero defects")
            solution, free = [], []
        else:
            try:
                solution, free = solve(
                    [rows[i] for i in rows_used],
                    [rhs[i] for i in rows_used],
                    ncols=len(names),
                    zero=RatFunc.zero(),
                )
            except InconsistentSystemError as exc:
                raise UnsolvableError(f"confluence equations at level {level} are inconsistent") from exc
        values.update(zip(names, solution))
        record = LevelRecord(level, tuple(names), len(rows_used), tuple(names[c] for c in free))
        log.levels.append(record)
        logger.info(
            "level %d: %d unknowns, %d equations, %d zero-filled",
            level,
            len(names),
            len(rows_used),
            len(free),
        )

    system = ansatz.system(values, verify_order=True)
    report = check_diamond(system, workers)
    if not report.passed:
        raise InternalConsistencyError(
            f"solved system fails confluence at overlaps {report.failed_triples()}"
        )
    return SolvedSystem(ansatz, values, system, log)


def specialize(solved: SolvedSystem, eps0, v0=None) -> RewriteSystem:
    """
    Substitute eps = eps0 and, when given, v = v0 into every coefficient.

    Raises:
        PoleError: If v0 is a pole of some coefficient.
    """
    return specialize_system(solved.system, eps0, v0)


def specialize_system(system: RewriteSystem, eps0, v0=None) -> RewriteSystem:
    """specialize for a bare rewrite system."""
    eps0 = eps0 if isinstance(eps0, RatFunc) else RatFunc.coerce(as_rational(eps0))

    def substitute(coeff: EpsPoly) -> EpsPoly:
        value = coeff.evaluate(eps0)
        if v0 is not None:
            value = RatFunc.coerce(evaluate(value, v0))
        return EpsPoly([value])

    return system.map_coefficients(substitute)


def q_symmetric_system(lam: AltMatrix) -> RewriteSystem:
    """The undeformed rules x_b x_a -> v^{m_ba} x_a x_b."""
    m = lam.exponents()
    rules = {
        (b, a): NCPoly.monomial((a, b), RatFunc.monomial(int(m[b, a])))
        for a, b in itertools.combinations(range(lam.n), 2)
    }
    return RewriteSystem(lam.n, rules)


def rescaled_coefficients(solved: SolvedSystem, gammas: Sequence[object]) -> Dict[str, RatFunc]:
    """
    Constants predicted for new gammas by rescaling the generators: a term
    whose weight has coordinates nu picks up prod_i (gamma'_i / gamma_i)^nu_i.
    """
    ratios = [as_rational(new) / old for new, old in zip(gammas, solved.ansatz.gammas)]
    predicted = {}
    for t in solved.ansatz.unknowns():
        factor = Fraction(1)
        for ratio, nu in zip(ratios, t.term.coords):
            factor *= ratio ** nu
        predicted[t.name] = solved.values[t.name] * factor
    return predicted


def braiding_defects(solved: SolvedSystem) -> List[Tuple[str, int]]:
    """
    Pairs (term, c) violating m_cb + m_ca = m_ck + m_cl, checked for every
    generator c on which all smoothable weights of the term are nonnegative.
    """
    m = solved.ansatz.m
    thetas = solved.ansatz.thetas
    defects = []
    for t in solved.ansatz.terms:
        q = t.term
        used = [theta for theta, nu in zip(thetas, q.coords) if nu > 0]
        for c in range(m.n):
            if any(theta[c] < 0 for theta in used):
                continue
            if m[c, q.b] + m[c, q.a] != m[c, q.k] + m[c, q.l]:
                defects.append((t.name, c))
    return defects


def complex_value(f: RatFunc, v: complex) -> complex:
    """Numeric value of a rational function at a complex point."""
    f = RatFunc.coerce(f)
    top = sum(float(c) * v ** e for e, c in f.numerator.terms().items())
    bottom = sum(float(c) * v ** e for e, c in f.denominator.terms().items())
    return complex(top) / complex(bottom)


def eps_value(p: EpsPoly, eps: complex, v: complex) -> complex:
    return sum((complex_value(c, v) * eps ** power for power, c in p.items()), 0j)


@dataclass
class NumericRelation:
    label: str
    terms: Dict[Tuple[int, int], complex]

    def to_dict(self) -> Dict[str, object]:
        return {
            "label": self.label,
            "terms": [
                {"word": list(w), "coeff": [c.real, c.imag]} for w, c in sorted(self.terms.items())
            ],
        }


@dataclass
class MixedAlgebra:
    n: int
    chain_vertices: List[int]
    cycles: List[CycleClassification]
    relations: List[NumericRelation]

    def to_dict(self) -> Dict[str, object]:
        return {
            "n": self.n,
            "chain_vertices": self.chain_vertices,
            "cycles": [c.to_dict() for c in self.cycles],
            "relations": [r.to_dict() for r in self.relations],
        }


def assemble_mixed(
    lam: AltMatrix,
    edges: Sequence[Edge],
    z: complex,
    tau: Optional[complex] = None,
    eps: Optional[Sequence[complex]] = None,
) -> MixedAlgebra:
    """
    Numeric relations of the braided tensor product of the chain algebra
    and one Feigin-Odesskii algebra per cycle.

    v = exp(2 pi i z) gives q_ij = v^{m_ij}. eps[0] is the chain parameter
    (default 1); eps[s + 1], when present, sets the parameter of cycle s,
    otherwise it is exp(2 pi i tau / n_s).

    Raises:
        ClassificationError: If a cycle is not a scaled FO matrix.
        ParameterError: If a cycle needs tau and none was given.
    """
    z = complex(z)
    eps = list(eps or [1.0])
    v = cmath.exp(2j * math.pi * z)
    m = lam.exponents()
    diagram = build_diagram(biresidue(lam))
    parts = decompose(restrict(diagram, edges))
    on_cycle = {vertex for cycle in parts.cycles for vertex in cycle}
    chain_vertices = [x for x in range(lam.n) if x not in on_cycle]
    cycle_pairs = {
        (min(a, b), max(a, b))
        for cycle in parts.cycles
        for a, b in zip(cycle, cycle[1:] + cycle[:1])
    }
    chosen = [(min(i, j), max(i, j)) for i, j in edges]
    chain_edges = [e for e in chosen if e not in cycle_pairs]

    relations: List[NumericRelation] = []
    factor_of = {x: 0 for x in chain_vertices}

    solved = solve_confluence(build_ansatz(lam, chain_edges))
    for (b, a), remainder in sorted(solved.system.rules.items()):
        if a in on_cycle or b in on_cycle:
            continue
        terms = {(b, a): 1 + 0j}
        for word, coeff in remainder.items():
            terms[word] = terms.get(word, 0j) - eps_value(coeff, complex(eps[0]), v)
        relations.append(NumericRelation(f"chain {b}{a}", terms))

    classifications = []
    for s, cycle in enumerate(parts.cycles):
        found = classify_cycle(lam, cycle)
        classifications.append(found)
        size = found.n_s
        if len(eps) > s + 1:
            tau_s = size * cmath.log(complex(eps[s + 1])) / (2j * math.pi)
        elif tau is not None:
            tau_s = complex(tau)
        else:
            raise ParameterError(f"cycle {cycle} needs tau or an eps value")
        z_s = z * lam.denominator * float(found.scale)
        coeffs = fo_relation_coeffs(size, found.k_s, z_s, ThetaParams(tau_s, size))
        order = found.permutation
        for x in order:
            factor_of[x] = s + 1
        for i in range(size):
            for j in range(size):
                terms = {
                    (order[p], order[r]): c for (p, r), c in coeffs.relation(i, j).items()
                }
                relations.append(NumericRelation(f"cycle {s} rel {i}{j}", terms))

    for a, b in itertools.combinations(range(lam.n), 2):
        if factor_of[a] != factor_of[b]:
            terms = {(b, a): 1 + 0j, (a, b): -(v ** float(m[b, a]))}
            relations.append(NumericRelation(f"cross {b}{a}", terms))

    return MixedAlgebra(lam.n, chain_vertices, classifications, relations)


if __name__ == "__main__":
    from matrix import from_numerators

    logging.basicConfig(level=logging.INFO)
    try:
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
        solved = solve_confluence(build_ansatz(lam, [(1, 2), (2, 3), (0, 4)]))
        for name, value in sorted(solved.values.items()):
            print(f"{name} = {value}")
    except ValueError as e:
        print(f"Error: {e}")
