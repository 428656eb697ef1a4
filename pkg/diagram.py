"""
Smoothing Diagrams

The smoothing diagram of a biresidue matrix b is the complete graph on the
vertices 0..n-1 with

- an edge i-j colored (smoothable) when {i, j} carries a smoothable weight
  theta, and
- for each colored edge, every other vertex k with theta_k > 0 marked as an
  angle: dark when theta_k = 2, light when theta_k = 1.

Each vertex meets at most two colored edges, so the colored edges split
into chains and cycles. A cycle is, up to relabeling and scale, the
Feigin-Odesskii matrix fo_matrix(n_s, k_s) on its vertex set.

Example:
    >>> diagram = build_diagram(biresidue(lam))  # lam of a five-vertex example
    >>> [(e.i, e.j) for e in diagram.edges]
    [(0, 4), (1, 2), (2, 3)]
    >>> decompose(diagram).chains
    [[0, 4], [1, 2, 3]]
"""

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Dict, List, Optional, Sequence, Tuple

from matrix import AltMatrix, fo_matrix, inverse_mod
from weights import Edge, Weight, smoothable_weights

DARK = "dark"
LIGHT = "light"


class InvariantViolationError(ValueError):
    """Raised when a diagram breaks the chain-and-cycle structure."""


class ClassificationError(ValueError):
    """Raised when a cycle does not match any Feigin-Odesskii matrix."""


@dataclass(frozen=True)
class DiagramEdge:
    i: int
    j: int
    weight: Weight

    @property
    def key(self) -> Edge:
        return (self.i, self.j)


@dataclass(frozen=True)
class Angle:
    apex: int
    edge: Edge
    shade: str


@dataclass(frozen=True)
class SmoothingDiagram:
    n: int
    edges: Tuple[DiagramEdge, ...]
    angles: Tuple[Angle, ...]

    def edge(self, i: int, j: int) -> Optional[DiagramEdge]:
        key = (min(i, j), max(i, j))
        return next((e for e in self.edges if e.key == key), None)

    def neighbours(self, vertex: int) -> List[int]:
        found = []
        for e in self.edges:
            if e.i == vertex:
                found.append(e.j)
            elif e.j == vertex:
                found.append(e.i)
        return sorted(found)

    def to_dict(self) -> Dict[str, object]:
        return {
            "vertices": list(range(self.n)),
            "edges": [{"i": e.i, "j": e.j, "weight": list(e.weight)} for e in self.edges],
            "angles": [
                {"apex": a.apex, "edge": list(a.edge), "shade": a.shade} for a in self.angles
            ],
        }


@dataclass(frozen=True)
class Decomposition:
    chains: List[List[int]] = field(default_factory=list)
    cycles: List[List[int]] = field(default_factory=list)

    def to_dict(self) -> Dict[str, object]:
        return {"chains": self.chains, "cycles": self.cycles}


@dataclass(frozen=True)
class CycleClassification:
    """
    The cycle's submatrix, taken in vertex order `permutation` and divided
    by `scale`, equals fo_matrix(n_s, k_s).
    """

    n_s: int
    k_s: int
    scale: Fraction
    permutation: Tuple[int, ...]

    def to_dict(self) -> Dict[str, object]:
        return {
            "n": self.n_s,
            "k": self.k_s,
            "scale": str(self.scale),
            "permutation": list(self.permutation),
        }


def build_diagram(b: AltMatrix) -> SmoothingDiagram:
    """Colored edges from the smoothable weights of b, with their angles."""
    edges = []
    angles = []
    for (i, j), theta in sorted(smoothable_weights(b).items()):
        edges.append(DiagramEdge(i, j, theta))
        for k, value in enumerate(theta):
            if value == 2:
                angles.append(Angle(k, (i, j), DARK))
            elif value == 1:
                angles.append(Angle(k, (i, j), LIGHT))
    return SmoothingDiagram(b.n, tuple(edges), tuple(angles))


def restrict(diagram: SmoothingDiagram, edges: Sequence[Edge]) -> SmoothingDiagram:
    """
    Sub-diagram on the given edges.

    Raises:
        ValueError: If an edge is not colored in the diagram.
    """
    wanted = {(min(i, j), max(i, j)) for i, j in edges}
    missing = wanted - {e.key for e in diagram.edges}
    if missing:
        raise ValueError(f"edges not smoothable: {sorted(missing)}")
    kept = tuple(e for e in diagram.edges if e.key in wanted)
    angles = tuple(a for a in diagram.angles if a.edge in wanted)
    return SmoothingDiagram(diagram.n, kept, angles)


def decompose(diagram: SmoothingDiagram) -> Decomposition:
    """
    Split the colored edges into maximal chains and cycles.

    Chains start at their endpoint with the smaller index; cycles start at
    their smallest vertex and continue towards its smaller neighbour.

    Raises:
        InvariantViolationError: If some vertex meets three or more edges.
    """
    adjacency = {v: diagram.neighbours(v) for v in range(diagram.n)}
    for vertex, around in adjacency.items():
        if len(around) >= 3:
            raise InvariantViolationError(
                f"vertex {vertex} meets {len(around)} smoothable edges"
            )

    seen = set()
    chains = []
    cycles = []

    def walk(start: int, first: int) -> List[int]:
        path = [start, first]
        while True:
            here, before = path[-1], path[-2]
            onward = [u for u in adjacency[here] if u != before]
            if not onward or onward[0] == start:
                return path
            path.append(onward[0])

    # Chains: start from degree-one vertices
    for vertex in range(diagram.n):
        if len(adjacency[vertex]) == 1 and vertex not in seen:
            path = walk(vertex, adjacency[vertex][0])
            seen.update(path)
            if path[0] > path[-1]:
                path.reverse()
            chains.append(path)

    # Whatever is left with degree two lies on a cycle
    for vertex in range(diagram.n):
        if len(adjacency[vertex]) == 2 and vertex not in seen:
            path = walk(vertex, adjacency[vertex][0])
            seen.update(path)
            cycles.append(path)

    chains.sort()
    cycles.sort()
    return Decomposition(chains, cycles)


def adjacent_ratios_positive(b: AltMatrix, diagram: SmoothingDiagram) -> bool:
    """For adjacent colored edges i-j and j-k, b_ij / b_jk is positive."""
    for j in range(diagram.n):
        around = diagram.neighbours(j)
        for i in around:
            for k in around:
                if i != k and b[i, j] / b[j, k] <= 0:
                    return False
    return True


def angles_inside_cycles(diagram: SmoothingDiagram, decomposition: Decomposition) -> bool:
    """Every angle of an edge lying on a cycle has its apex on that cycle."""
    for cycle in decomposition.cycles:
        members = set(cycle)
        pairs = {
            (min(a, b), max(a, b)) for a, b in zip(cycle, cycle[1:] + cycle[:1])
        }
        for angle in diagram.angles:
            if angle.edge in pairs and angle.apex not in members:
                return False
    return True


def cycle_is_decoupled(lam: AltMatrix, cycle: Sequence[int]) -> bool:
    """lam[i1][j] = lam[i2][j] for all i1, i2 on the cycle and j off it."""
    members = set(cycle)
    for j in range(lam.n):
        if j in members:
            continue
        if len({lam[i, j] for i in cycle}) > 1:
            return False
    return True


def _cycle_orders(cycle: Sequence[int], step: int) -> List[Tuple[int, ...]]:
    """
    Relabelings sending position (s * step) mod n_s to the s-th vertex of
    the cycle, for every rotation and both directions.
    """
    size = len(cycle)
    orders = []
    for direction in (list(cycle), list(reversed(cycle))):
        for start in range(size):
            order = [0] * size
            for s in range(size):
                order[(s * step) % size] = direction[(start + s) % size]
            orders.append(tuple(order))
    return orders


def classify_cycle(lam: AltMatrix, cycle: Sequence[int]) -> CycleClassification:
    """
    Identify the submatrix of lam on a cycle with a scaled fo_matrix.

    In fo_matrix(n_s, k_s) the colored edges join positions p and
    p + k' + 1 (k' the inverse of k_s mod n_s), so walking the cycle visits
    positions 0, k'+1, 2(k'+1), ... The search covers every admissible k_s,
    rotation and direction; the first exact match with positive scale wins,
    then the first match with negative scale.

    Raises:
        ClassificationError: If no relabeling matches.
    """
    size = len(cycle)
    if size < 3:
        raise ClassificationError(f"a cycle needs at least 3 vertices, got {size}")
    fallback = None
    for k in range(1, size):
        if math.gcd(size, k) != 1 or math.gcd(size, k + 1) != 1:
            continue
        step = inverse_mod(k, size) + 1
        reference = fo_matrix(size, k)
        for order in _cycle_orders(cycle, step):
            sub = lam.submatrix(order)
            scale = sub[0, 1] / reference[0, 1]
            if scale == 0 or sub != reference.scaled(scale):
                continue
            if scale > 0:
                return CycleClassification(size, k, scale, order)
            if fallback is None:
                fallback = CycleClassification(size, k, scale, order)
    if fallback is not None:
        return fallback
    raise ClassificationError(f"cycle {list(cycle)} matches no Feigin-Odesskii matrix")


def render_text(diagram: SmoothingDiagram, decomposition: Optional[Decomposition] = None) -> str:
    """Human-readable listing of edges, their weights and shaded angles."""
    lines = [f"smoothing diagram on {diagram.n} vertices, {len(diagram.edges)} colored edges"]
    for e in diagram.edges:
        shaded = [
            f"{a.shade} at {a.apex}" for a in diagram.angles if a.edge == e.key
        ]
        weight = ",".join(str(x) for x in e.weight)
        lines.append(f"  edge {e.i}-{e.j}  weight ({weight})  angles: {', '.join(shaded)}")
    if decomposition is not None:
        for chain in decomposition.chains:
            lines.append("  chain " + "-".join(str(v) for v in chain))
        for cycle in decomposition.cycles:
            lines.append("  cycle " + "-".join(str(v) for v in cycle + cycle[:1]))
    return "\n".join(lines)


if __name__ == "__main__":
    from matrix import biresidue

    try:
        b = fo_matrix(5, 2)
        d = build_diagram(biresidue(b))
        parts = decompose(d)
        print(render_text(d, parts))
        for cycle in parts.cycles:
            print(classify_cycle(b, cycle))
    except ValueError as e:
        print(f"Error: {e}")
