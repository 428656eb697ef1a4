"""
Noncommutative Rewriting

Words in the generators x_0..x_{n-1} are tuples of indices. A rewrite
system holds one quadratic rule per descending pair x_b x_a (b > a):

    x_b x_a  ->  q x_a x_b + sum_m eps^m C x_k x_l

Words are ordered by filtration level first, then degree-lexicographically:
t1 < t2 iff level(t1) > level(t2), or the levels agree and t1 is shorter,
or equally long and letterwise smaller. The level of a word is the largest
number of smoothable weights that can be subtracted from its commutative
weight while staying nonnegative, so every rule rewrites a word into
strictly smaller words and reduction terminates.

A system is confluent when each overlap x_c x_b x_a (c > b > a) reduces to
the same normal form whichever pair is rewritten first. Confluent systems
have the normal words (no descending adjacent pair) as a basis, giving the
Hilbert function of a polynomial ring.

Example:
    >>> system = q_symmetric_system(m)  # from the deform module
    >>> check_diamond(system).passed
    True
    >>> hilbert_function(system, 3)
    [1, 5, 15, 35]
"""

import itertools
import math
import threading
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Dict, Iterable, Iterator, List, Mapping, Optional, Sequence, Tuple

from exact import EpsPoly
from matrix import rank_of_rows, solve

Word = Tuple[int, ...]
Weight = Tuple[int, ...]
Lead = Tuple[int, int]

LEFTMOST = "leftmost"
RIGHTMOST = "rightmost"


class NotConfluentError(ValueError):
    """Raised when an operation needs a confluent rewrite system."""


def word_weight(word: Sequence[int], n: int) -> Weight:
    """Commutative weight (exponent vector) of a word."""
    counts = [0] * n
    for letter in word:
        counts[letter] += 1
    return tuple(counts)


def format_word(word: Sequence[int]) -> str:
    return "*".join(f"x{letter}" for letter in word) if word else "1"


class NCPoly:
    """
    An element of the free algebra with EpsPoly coefficients.

    Stored as a dict from words to nonzero coefficients.
    """

    __slots__ = ("_terms",)

    def __init__(self, terms: Optional[Mapping[Sequence[int], object]] = None):
        self._terms: Dict[Word, EpsPoly] = {}
        for word, coeff in (terms or {}).items():
            coeff = EpsPoly.coerce(coeff)
            if not coeff.is_zero():
                self._terms[tuple(word)] = coeff

    @classmethod
    def _wrap(cls, terms: Dict[Word, EpsPoly]) -> "NCPoly":
        obj = cls.__new__(cls)
        obj._terms = {w: c for w, c in terms.items() if not c.is_zero()}
        return obj

    @classmethod
    def monomial(cls, word: Sequence[int], coeff=1) -> "NCPoly":
        return cls({tuple(word): coeff})

    def items(self) -> Iterator[Tuple[Word, EpsPoly]]:
        return iter(self._terms.items())

    def words(self) -> List[Word]:
        return list(self._terms)

    def coefficient(self, word: Sequence[int]) -> EpsPoly:
        return self._terms.get(tuple(word), EpsPoly())

    def is_zero(self) -> bool:
        return not self._terms

    def __len__(self) -> int:
        return len(self._terms)

    def __add__(self, other: "NCPoly") -> "NCPoly":
        terms = dict(self._terms)
        for word, coeff in other._terms.items():
            terms[word] = terms[word] + coeff if word in terms else coeff
        return NCPoly._wrap(terms)

    def __neg__(self) -> "NCPoly":
        return NCPoly._wrap({w: -c for w, c in self._terms.items()})

    def __sub__(self, other: "NCPoly") -> "NCPoly":
        return self + (-other)

    def scale(self, factor, cap: Optional[int] = None) -> "NCPoly":
        factor = EpsPoly.coerce(factor)
        return NCPoly._wrap({w: c.multiply(factor, cap) for w, c in self._terms.items()})

    def flank(self, left: Sequence[int] = (), right: Sequence[int] = ()) -> "NCPoly":
        """The product left * self * right for words left and right."""
        left, right = tuple(left), tuple(right)
        return NCPoly._wrap({left + w + right: c for w, c in self._terms.items()})

    def truncate(self, cap: Optional[int]) -> "NCPoly":
        return NCPoly._wrap({w: c.truncate(cap) for w, c in self._terms.items()})

    def map_coefficients(self, func) -> "NCPoly":
        return NCPoly._wrap({w: func(c) for w, c in self._terms.items()})

    def eps_coefficient(self, power: int) -> Dict[Word, object]:
        """The RatFunc coefficient of eps^power for every word where it is nonzero."""
        found = {}
        for word, coeff in self._terms.items():
            value = coeff.coefficient(power)
            if not value.is_zero():
                found[word] = value
        return found

    def __eq__(self, other) -> bool:
        if not isinstance(other, NCPoly):
            return NotImplemented
        return self._terms == other._terms

    def __hash__(self) -> int:
        return hash(frozenset(self._terms.items()))

    def render(self, key=None) -> str:
        """
        Terms with the largest word first.

        Args:
            key: Sort key on words, usually `RewriteSystem.key` so that the
                filtration order is used. Deglex when omitted.
        """
        if not self._terms:
            return "0"
        key = key or (lambda w: (len(w), w))
        pieces = []
        for word in sorted(self._terms, key=key, reverse=True):
            pieces.append(f"[{self._terms[word]}]*{format_word(word)}")
        return " + ".join(pieces)

    def __repr__(self) -> str:
        return f"NCPoly({self.render()})"

    def __str__(self) -> str:
        return self.render()


class FiltrationOracle:
    """
    Filtration levels of commutative weights.

    level(w) is the largest total multiplicity sum(nu) such that
    w - sum_i nu_i theta_i is componentwise nonnegative, or 0 when no such
    combination exists.
    """

    def __init__(self, thetas: Sequence[Sequence[int]], n: int):
        self.thetas: Tuple[Weight, ...] = tuple(tuple(int(x) for x in t) for t in thetas)
        self.n = n
        if any(len(t) != n for t in self.thetas):
            raise ValueError("smoothable weights must have length n")
        if self.thetas and rank_of_rows(self.thetas) != len(self.thetas):
            raise ValueError("smoothable weights are linearly dependent")
        self._levels: Dict[Weight, int] = {}
        self._keys: Dict[Word, Tuple[int, int, Word]] = {}
        # check_diamond shares one oracle across its worker threads
        self._lock = threading.Lock()
        self.functional = self._bounding_functional()

    def _bounding_functional(self) -> Tuple[Fraction, ...]:
        """A nonnegative c with c . theta_i = 1 for every i, so sum(nu) <= c . w."""
        if not self.thetas:
            return tuple(Fraction(0) for _ in range(self.n))
        c, _ = solve(
            [[Fraction(x) for x in t] for t in self.thetas],
            [Fraction(1)] * len(self.thetas),
            ncols=self.n,
        )
        # theta entries sum to zero, so adding a constant to c changes nothing
        low = min(c)
        return tuple(x - low for x in c)

    def level(self, w: Sequence[int]) -> int:
        w = tuple(w)
        with self._lock:
            cached = self._levels.get(w)
        if cached is None:
            cached = self._compute(w)
            with self._lock:
                self._levels.setdefault(w, cached)
        return cached

    def _compute(self, w: Weight) -> int:
        if not self.thetas:
            return 0
        bound = math.floor(sum(c * x for c, x in zip(self.functional, w)))
        if bound <= 0:
            return 0
        best = -1
        last = len(self.thetas) - 1

        def search(index: int, residual: List[int], used: int) -> None:
            nonlocal best
            if bound <= best:
                return
            theta = self.thetas[index]
            if index == last:
                # Largest admissible multiplicity of the final weight, in closed form
                low, high = 0, bound - used
                for r, t in zip(residual, theta):
                    if t > 0:
                        high = min(high, r // t)
                    elif t < 0:
                        low = max(low, -(r // -t) if r < 0 else 0)
                    elif r < 0:
                        high = -1
                if low <= high:
                    best = max(best, used + high)
                return
            count = 0
            current = list(residual)
            while used + count <= bound:
                search(index + 1, current, used + count)
                count += 1
                current = [r - t for r, t in zip(current, theta)]

        search(0, list(w), 0)
        return max(best, 0)

    def word_level(self, word: Sequence[int]) -> int:
        """
        Level of a word, read off its commutative weight.

        Args:
            word (Sequence[int]): Generator indices.

        Returns:
            int: The level of the letter counts of the word.
        """
        return self.level(word_weight(word, self.n))

    def key(self, word: Word) -> Tuple[int, int, Word]:
        """Sort key: a smaller key is a smaller word."""
        with self._lock:
            found = self._keys.get(word)
        if found is None:
            found = (-self.word_level(word), len(word), word)
            with self._lock:
                self._keys.setdefault(word, found)
        return found


def filtration_level(w: Sequence[int], oracle: FiltrationOracle) -> int:
    """
    Largest number of smoothable weights that fit under w.

    Args:
        w (Sequence[int]): A weight in Z^n, not necessarily nonnegative.
        oracle (FiltrationOracle): Holds the smoothable weights.

    Returns:
        int: The level, 0 when no combination fits.
    """
    return oracle.level(w)


def compare(t1: Sequence[int], t2: Sequence[int], oracle: FiltrationOracle) -> int:
    """-1 if t1 < t2, 0 if equal, 1 if t1 > t2."""
    k1, k2 = oracle.key(tuple(t1)), oracle.key(tuple(t2))
    return (k1 > k2) - (k1 < k2)


@dataclass(frozen=True)
class OrderViolation:
    lead: Lead
    term: Word
    flank_weight: Weight


class RewriteSystem:
    """
    Quadratic rewrite rules x_b x_a -> remainder for b > a.

    Args:
        n (int): Number of generators.
        rules: Map from leading word (b, a) to its remainder.
        oracle (FiltrationOracle): Level oracle defining the order.
        verify_order (bool): Check that every remainder term is smaller than
            its lead, also after flanking by words of length <= 2.

    Raises:
        ValueError: For malformed leading words or order violations.
    """

    def __init__(
        self,
        n: int,
        rules: Mapping[Lead, NCPoly],
        oracle: Optional[FiltrationOracle] = None,
        verify_order: bool = True,
    ):
        self.n = n
        self.oracle = oracle or FiltrationOracle([], n)
        self.rules: Dict[Lead, NCPoly] = {}
        for lead, remainder in sorted(rules.items()):
            b, a = lead
            if not (0 <= a < b < n):
                raise ValueError(f"leading word {lead} is not a descending pair")
            self.rules[(b, a)] = remainder
        if verify_order:
            violations = self.check_order_compatibility()
            if violations:
                first = violations[0]
                raise ValueError(
                    f"rule for {format_word(first.lead)} is not order compatible "
                    f"at term {format_word(first.term)}"
                )

    def key(self, word: Word) -> Tuple[int, int, Word]:
        return self.oracle.key(word)

    def render(self, p: NCPoly) -> str:
        """p as text, highest term in the filtration order first."""
        return p.render(self.key)

    def check_order_compatibility(self, max_flank: int = 2) -> List[OrderViolation]:
        """
        Terms of l * remainder * r that are not smaller than l * lead * r,
        for flanking words of length <= max_flank on each side.

        Only the total weight of the flanks affects levels, and at equal
        level the flanks cancel from the deglex comparison.
        """
        flanks = []
        for size in range(2 * max_flank + 1):
            for letters in itertools.combinations_with_replacement(range(self.n), size):
                flanks.append(word_weight(letters, self.n))
        violations = []
        for lead, remainder in self.rules.items():
            lead_weight = word_weight(lead, self.n)
            for term in remainder.words():
                term_weight = word_weight(term, self.n)
                for flank in flanks:
                    lead_level = self.oracle.level([x + y for x, y in zip(lead_weight, flank)])
                    term_level = self.oracle.level([x + y for x, y in zip(term_weight, flank)])
                    if term_level < lead_level or (
                        term_level == lead_level and (len(term), term) >= (len(lead), lead)
                    ):
                        violations.append(OrderViolation(lead, term, flank))
        return violations

    def find_redex(self, word: Word, strategy: str = LEFTMOST) -> Optional[int]:
        """Position of a reducible adjacent pair, or None for a normal word."""
        positions = range(len(word) - 1)
        if strategy == RIGHTMOST:
            positions = reversed(positions)
        for i in positions:
            if (word[i], word[i + 1]) in self.rules:
                return i
        return None

    def apply_at(self, word: Word, position: int, coeff=1, cap: Optional[int] = None) -> NCPoly:
        """Rewrite the pair at `position` once, scaling the result by coeff."""
        remainder = self.rules[(word[position], word[position + 1])]
        return remainder.flank(word[:position], word[position + 2 :]).scale(coeff, cap)

    def map_coefficients(self, func, verify_order: bool = False) -> "RewriteSystem":
        rules = {lead: r.map_coefficients(func) for lead, r in self.rules.items()}
        return RewriteSystem(self.n, rules, self.oracle, verify_order)

    def is_normal(self, word: Word) -> bool:
        return self.find_redex(word) is None


def reduce(
    p: NCPoly,
    system: RewriteSystem,
    strategy: str = LEFTMOST,
    cap: Optional[int] = None,
) -> NCPoly:
    """
    Normal form of p.

    The largest pending word is rewritten first, so every word produced is
    smaller than anything already finished. With a cap, eps-powers above
    it are dropped along the way.
    """
    pending: Dict[Word, EpsPoly] = {w: c.truncate(cap) for w, c in p.items()}
    done: Dict[Word, EpsPoly] = {}
    while pending:
        word = max(pending, key=system.key)
        coeff = pending.pop(word)
        if coeff.is_zero():
            continue
        position = system.find_redex(word, strategy)
        if position is None:
            done[word] = coeff
            continue
        for new_word, new_coeff in system.apply_at(word, position, coeff, cap).items():
            previous = pending.get(new_word)
            pending[new_word] = new_coeff if previous is None else previous + new_coeff
    return NCPoly._wrap(done)


def overlap_difference(
    system: RewriteSystem, triple: Tuple[int, int, int], cap: Optional[int] = None
) -> NCPoly:
    """
    Difference of the two reductions of x_c x_b x_a: rewriting x_c x_b first
    minus rewriting x_b x_a first.
    """
    word = tuple(triple)
    left = reduce(system.apply_at(word, 0, cap=cap), system, cap=cap)
    right = reduce(system.apply_at(word, 1, cap=cap), system, cap=cap)
    return left - right


@dataclass
class OverlapFailure:
    triple: Tuple[int, int, int]
    residue: NCPoly
    text: str = ""

    def to_dict(self) -> Dict[str, object]:
        return {"triple": list(self.triple), "residue": self.text or str(self.residue)}


@dataclass
class DiamondReport:
    passed: bool
    checked: int
    failures: List[OverlapFailure] = field(default_factory=list)

    def failed_triples(self) -> List[Tuple[int, int, int]]:
        return [f.triple for f in self.failures]

    def to_dict(self) -> Dict[str, object]:
        return {
            "passed": self.passed,
            "checked": self.checked,
            "failures": [f.to_dict() for f in self.failures],
        }


def overlap_triples(n: int) -> List[Tuple[int, int, int]]:
    """All (c, b, a) with c > b > a."""
    return [(c, b, a) for a, b, c in itertools.combinations(range(n), 3)]


def check_diamond(system: RewriteSystem, workers: int = 1) -> DiamondReport:
    """
    Resolve every overlap x_c x_b x_a (c > b > a) both ways.

    Failures are reported, never raised. With workers > 1 the overlaps are
    reduced in a thread pool; the report order does not depend on it.
    """
    triples = [
        t
        for t in overlap_triples(system.n)
        if (t[0], t[1]) in system.rules and (t[1], t[2]) in system.rules
    ]
    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            residues = list(pool.map(lambda t: overlap_difference(system, t), triples))
    else:
        residues = [overlap_difference(system, t) for t in triples]
    failures = [
        OverlapFailure(t, r, system.render(r))
        for t, r in zip(triples, residues)
        if not r.is_zero()
    ]
    return DiamondReport(not failures, len(triples), failures)


def normal_words(system: RewriteSystem, degree: int) -> Iterable[Word]:
    """Words of the given length containing no leading word."""
    words: List[Word] = [()]
    for _ in range(degree):
        words = [
            w + (x,)
            for w in words
            for x in range(system.n)
            if not w or (w[-1], x) not in system.rules
        ]
    return words


def hilbert_function(system: RewriteSystem, dmax: int, workers: int = 1) -> List[int]:
    """
    Number of normal words in each degree 0..dmax.

    Raises:
        NotConfluentError: If the system fails the diamond check.
    """
    report = check_diamond(system, workers)
    if not report.passed:
        raise NotConfluentError(
            f"system is not confluent at overlaps {report.failed_triples()}"
        )
    # counts[x] = normal words of the current length ending in x
    counts = [1] * system.n
    dims = [1]
    for degree in range(1, dmax + 1):
        if degree > 1:
            counts = [
                sum(counts[x] for x in range(system.n) if (x, y) not in system.rules)
                for y in range(system.n)
            ]
        dims.append(sum(counts))
    return dims


if __name__ == "__main__":
    from exact import RatFunc

    # x_1 x_0 -> v x_0 x_1 etc. on three generators
    rules = {
        (b, a): NCPoly.monomial((a, b), RatFunc.monomial(b - a))
        for a in range(3)
        for b in range(a + 1, 3)
    }
    system = RewriteSystem(3, rules)
    print(reduce(NCPoly.monomial((2, 1, 0)), system))
    print(check_diamond(system).passed)
    print(hilbert_function(system, 4))
