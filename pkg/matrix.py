"""
Exact Alternating Matrices

An alternating matrix M satisfies M[i][i] = 0 and M[i][j] = -M[j][i]. The
same type carries three roles:

- the Poisson matrix lambda (rational entries, usually given as an integer
  matrix m over a common denominator d),
- the biresidue matrix b, the normalized alternating matrix that inverts
  lambda on the hyperplane of vectors with coordinate sum zero,
- the exponent matrix m of a q-symmetric algebra, q_ij = v^{m_ij}.

All arithmetic is exact: ranks come from fraction-free (Bareiss)
elimination over numpy object arrays of Python integers, inverses from
fraction-free Gauss-Jordan elimination. The generic helpers rref, solve and
nullspace work over any exact field (Fraction or RatFunc).

Example:
    >>> lam = fo_matrix(3, 1)
    >>> print(lam)
     0 -1  1
     1  0 -1
    -1  1  0
    >>> corank(lam)
    1
    >>> print(biresidue(lam))
       0  1/3 -1/3
    -1/3    0  1/3
     1/3 -1/3    0
"""

import math
from fractions import Fraction
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np

from exact import as_rational


class ValidationError(ValueError):
    """Raised when raw matrix data is not an alternating matrix."""

    def __init__(self, message: str, cells: Sequence[Tuple[int, int]] = ()):
        super().__init__(message)
        self.cells = list(cells)


class ParameterError(ValueError):
    """Raised for parameters outside the admissible range."""


class RankError(ValueError):
    """Raised when an operation needs a matrix of a different rank."""


class InconsistentSystemError(ValueError):
    """Raised when a linear system has no solution."""


class AltMatrix:
    """
    An immutable exact alternating matrix.

    Attributes:
        n (int): Dimension.
        denominator (int): Common denominator metadata; printed coefficients
            use v = e^{1/denominator}.
    """

    __slots__ = ("_entries", "n", "denominator")

    def __init__(self, entries: Sequence[Sequence[Fraction]], denominator: int = 1):
        self._entries = tuple(tuple(as_rational(x) for x in row) for row in entries)
        self.n = len(self._entries)
        self.denominator = denominator

    def __getitem__(self, index: Tuple[int, int]) -> Fraction:
        i, j = index
        return self._entries[i][j]

    def rows(self) -> List[List[Fraction]]:
        return [list(row) for row in self._entries]

    def row(self, i: int) -> List[Fraction]:
        return list(self._entries[i])

    def scaled(self, factor) -> "AltMatrix":
        factor = as_rational(factor)
        return AltMatrix([[x * factor for x in row] for row in self._entries], self.denominator)

    def submatrix(self, indices: Sequence[int]) -> "AltMatrix":
        return AltMatrix(
            [[self._entries[i][j] for j in indices] for i in indices], self.denominator
        )

    def is_integral(self) -> bool:
        return all(x.denominator == 1 for row in self._entries for x in row)

    def exponents(self) -> "AltMatrix":
        """
        The integer exponent matrix m = denominator * M.

        Raises:
            ValidationError: If denominator * M is not integral.
        """
        m = self.scaled(self.denominator)
        if not m.is_integral():
            raise ValidationError(
                f"matrix times {self.denominator} is not an integer matrix"
            )
        return AltMatrix(m._entries, self.denominator)

    def to_json(self) -> Dict[str, object]:
        """Serialize as {"n", "numerators", "denominator"} over the least common denominator."""
        common = 1
        for row in self._entries:
            for x in row:
                common = math.lcm(common, x.denominator)
        return {
            "n": self.n,
            "numerators": [[int(x * common) for x in row] for row in self._entries],
            "denominator": common,
        }

    def __eq__(self, other) -> bool:
        if not isinstance(other, AltMatrix):
            return NotImplemented
        return self._entries == other._entries

    def __hash__(self) -> int:
        return hash(self._entries)

    def __repr__(self) -> str:
        return f"AltMatrix({self.rows()})"

    def __str__(self) -> str:
        cells = [[str(x) for x in row] for row in self._entries]
        width = max((len(c) for row in cells for c in row), default=1)
        return "\n".join(" ".join(c.rjust(width) for c in row) for row in cells)


def validate(raw: Sequence[Sequence[object]], denominator: int = 1) -> AltMatrix:
    """
    Check that raw data is a square alternating matrix of dimension >= 3.

    Args:
        raw: Rows of exact scalars (int, Fraction or rational strings).
        denominator (int): Metadata carried to the result.

    Returns:
        AltMatrix: The validated matrix.

    Raises:
        ValidationError: Listing every violated cell; the message names the
            first one.
    """
    n = len(raw)
    if n < 3:
        raise ValidationError(f"matrix dimension must be at least 3, got {n}")
    if any(len(row) != n for row in raw):
        raise ValidationError("matrix is not square")
    try:
        entries = [[as_rational(x) for x in row] for row in raw]
    except TypeError as exc:
        raise ValidationError(f"non-rational entry: {exc}") from exc

    bad = []
    for i in range(n):
        for j in range(i, n):
            if i == j and entries[i][i] != 0:
                bad.append((i, i))
            elif i != j and entries[i][j] != -entries[j][i]:
                bad.append((i, j))
    if bad:
        i, j = bad[0]
        reason = "nonzero diagonal" if i == j else "not antisymmetric"
        raise ValidationError(f"entry ({i},{j}) violates alternation: {reason}", bad)
    return AltMatrix(entries, denominator)


def from_numerators(numerators: Sequence[Sequence[int]], denominator: int = 1) -> AltMatrix:
    """Build lambda = numerators / denominator, validating alternation."""
    if not isinstance(denominator, int) or denominator <= 0:
        raise ValidationError(f"denominator must be a positive integer, got {denominator!r}")
    scaled = [[Fraction(as_rational(x), denominator) for x in row] for row in numerators]
    return validate(scaled, denominator)


def from_json(data: Dict[str, object]) -> AltMatrix:
    """Inverse of AltMatrix.to_json."""
    try:
        numerators = data["numerators"]
        denominator = data.get("denominator", 1)
    except (KeyError, AttributeError) as exc:
        raise ValidationError("matrix JSON needs a 'numerators' field") from exc
    matrix = from_numerators(numerators, denominator)
    if "n" in data and data["n"] != matrix.n:
        raise ValidationError(f"declared n={data['n']} but matrix has size {matrix.n}")
    return matrix


def is_normalized(M: AltMatrix) -> bool:
    """True iff every row sums to zero."""
    return all(sum(M.row(i)) == 0 for i in range(M.n))


def _integer_rows(rows: Sequence[Sequence[Fraction]]) -> List[List[int]]:
    """Scale each row by the lcm of its denominators."""
    result = []
    for row in rows:
        row = [as_rational(x) for x in row]
        common = 1
        for x in row:
            common = math.lcm(common, x.denominator)
        result.append([int(x * common) for x in row])
    return result


def _bareiss_rank(rows: List[List[int]]) -> int:
    if not rows or not rows[0]:
        return 0
    a = np.array(rows, dtype=object)
    nrows, ncols = a.shape
    rank, prev = 0, 1
    for col in range(ncols):
        if rank == nrows:
            break
        # Pivot: first nonzero in the column
        pivot = next((r for r in range(rank, nrows) if a[r, col] != 0), None)
        if pivot is None:
            continue
        if pivot != rank:
            a[[rank, pivot]] = a[[pivot, rank]]
        below = slice(rank + 1, nrows)
        right = slice(col + 1, ncols)
        a[below, right] = (
            a[rank, col] * a[below, right] - np.outer(a[below, col], a[rank, right])
        ) // prev
        a[below, col] = 0
        prev = a[rank, col]
        rank += 1
    return rank


def rank_of_rows(rows: Sequence[Sequence[object]]) -> int:
    """Exact rank of a rational matrix given by its rows."""
    return _bareiss_rank(_integer_rows(rows))


def rank(M: AltMatrix) -> int:
    """
    Exact rank of an alternating matrix.

    Args:
        M (AltMatrix): The matrix.

    Returns:
        int: Its rank over Q, always even.
    """
    return rank_of_rows(M.rows())


def corank(M: AltMatrix) -> int:
    """n - rank, by fraction-free elimination."""
    return M.n - rank(M)


def inverse(rows: Sequence[Sequence[object]]) -> List[List[Fraction]]:
    """
    Exact inverse of a square rational matrix by fraction-free Gauss-Jordan
    elimination on [A | I].

    Raises:
        RankError: If the matrix is singular.
    """
    size = len(rows)
    common = 1
    for row in rows:
        for x in row:
            common = math.lcm(common, as_rational(x).denominator)
    a = np.zeros((size, 2 * size), dtype=object)
    for i, row in enumerate(rows):
        for j, x in enumerate(row):
            a[i, j] = int(as_rational(x) * common)
        a[i, size + i] = 1

    prev = 1
    for k in range(size):
        pivot = next((r for r in range(k, size) if a[r, k] != 0), None)
        if pivot is None:
            raise RankError("matrix is singular")
        if pivot != k:
            a[[k, pivot]] = a[[pivot, k]]
        others = [i for i in range(size) if i != k]
        a[others, :] = (a[k, k] * a[others, :] - np.outer(a[others, k], a[k, :])) // prev
        prev = a[k, k]

    # Every diagonal entry now carries the same determinant
    result = [
        [Fraction(int(a[i, size + j]) * common, int(a[i, i])) for j in range(size)]
        for i in range(size)
    ]
    product = np.array(rows, dtype=object).dot(np.array(result, dtype=object))
    if any(product[i, j] != (1 if i == j else 0) for i in range(size) for j in range(size)):
        raise ArithmeticError("fraction-free inversion lost exactness")
    return result


def biresidue(lam: AltMatrix) -> AltMatrix:
    """
    The biresidue matrix of a normalized corank-one alternating matrix.

    Inverts the (n-1)x(n-1) matrix with entries
    lam[i][j] + lam[j][0] + lam[0][i] (i, j >= 1) and extends the inverse to
    the unique normalized alternating matrix.

    Raises:
        ValueError: If lam is not normalized.
        RankError: If lam does not have corank 1.
    """
    if not is_normalized(lam):
        raise ValueError("biresidue needs a normalized matrix (rows summing to zero)")
    if corank(lam) != 1:
        raise RankError(f"biresidue needs corank 1, matrix has corank {corank(lam)}")
    n = lam.n
    reduced = [
        [lam[i, j] + lam[j, 0] + lam[0, i] for j in range(1, n)] for i in range(1, n)
    ]
    inner = inverse(reduced)

    b = [[Fraction(0)] * n for _ in range(n)]
    for i in range(1, n):
        for j in range(1, n):
            b[i][j] = inner[i - 1][j - 1]
    for i in range(1, n):
        b[i][0] = -sum(b[i][1:])
        b[0][i] = -b[i][0]
    return AltMatrix(b)


def inverse_mod(k: int, n: int) -> int:
    """
    Modular inverse of k modulo n.

    Raises:
        ParameterError: If gcd(k, n) != 1.
    """
    if math.gcd(k, n) != 1:
        raise ParameterError(f"{k} has no inverse modulo {n}")
    return pow(k, -1, n)


def fo_matrix(n: int, k: int) -> AltMatrix:
    """
    The Feigin-Odesskii Poisson matrix:
    lam[i][j] = (j-i mod n) + (k(j-i) mod n) - n off the diagonal.

    Raises:
        ParameterError: Unless 0 < k < n and gcd(n, k) = 1.
    """
    if not 0 < k < n:
        raise ParameterError(f"need 0 < k < n, got n={n}, k={k}")
    if math.gcd(n, k) != 1:
        raise ParameterError(f"need gcd(n, k) = 1, got n={n}, k={k}")
    entries = [
        [0 if i == j else (j - i) % n + (k * (j - i)) % n - n for j in range(n)]
        for i in range(n)
    ]
    return AltMatrix(entries)


def _is_zero(x) -> bool:
    return x == 0


def rref(rows: Sequence[Sequence[object]]) -> Tuple[List[List[object]], List[int]]:
    """
    Reduced row echelon form over an exact field.

    Entries may be Fractions or RatFunc values; pivots are the first nonzero
    entry in each column, scanning rows top to bottom.

    Returns:
        Tuple[List[List], List[int]]: Nonzero rows of the reduced matrix and
        the pivot column of each.
    """
    matrix = [list(row) for row in rows if any(not _is_zero(x) for x in row)]
    if not matrix:
        return [], []
    ncols = len(matrix[0])
    pivots: List[int] = []
    top = 0
    for col in range(ncols):
        pivot = next((r for r in range(top, len(matrix)) if not _is_zero(matrix[r][col])), None)
        if pivot is None:
            continue
        matrix[top], matrix[pivot] = matrix[pivot], matrix[top]
        lead = matrix[top][col]
        matrix[top] = [x / lead for x in matrix[top]]
        for r in range(len(matrix)):
            if r != top and not _is_zero(matrix[r][col]):
                factor = matrix[r][col]
                matrix[r] = [x - factor * y for x, y in zip(matrix[r], matrix[top])]
        pivots.append(col)
        top += 1
        if top == len(matrix):
            break
    return matrix[:top], pivots


def solve(
    rows: Sequence[Sequence[object]],
    rhs: Sequence[object],
    ncols: Optional[int] = None,
    zero=Fraction(0),
) -> Tuple[List[object], List[int]]:
    """
    Solve rows * x = rhs over an exact field, setting free variables to zero.

    Args:
        rows: Coefficient matrix.
        rhs: Right-hand side.
        ncols: Number of unknowns, needed when rows is empty.
        zero: Zero of the field, used for free variables.

    Returns:
        Tuple[List, List[int]]: A solution and the free (zero-filled) columns.

    Raises:
        InconsistentSystemError: If no solution exists.
    """
    if ncols is None:
        ncols = len(rows[0]) if rows else 0
    if not rows:
        return [zero] * ncols, list(range(ncols))
    augmented = [list(row) + [value] for row, value in zip(rows, rhs)]
    reduced, pivots = rref(augmented)
    if ncols in pivots:
        raise InconsistentSystemError("linear system is inconsistent")
    solution = [zero] * ncols
    for row, col in zip(reduced, pivots):
        solution[col] = row[ncols]
    return solution, [c for c in range(ncols) if c not in pivots]


def nullspace(
    rows: Sequence[Sequence[object]],
    ncols: int,
    one=Fraction(1),
    zero=Fraction(0),
) -> List[List[object]]:
    """Basis of {x : rows * x = 0}, one vector per free column."""
    reduced, pivots = rref(rows) if rows else ([], [])
    basis = []
    for free in (c for c in range(ncols) if c not in pivots):
        vector = [zero] * ncols
        vector[free] = one
        for row, col in zip(reduced, pivots):
            vector[col] = -row[free]
        basis.append(vector)
    return basis


if __name__ == "__main__":
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
        print(f"normalized: {is_normalized(lam)}, corank: {corank(lam)}")
        print("biresidue:")
        print(biresidue(lam))
        print("FO(5,2):")
        print(fo_matrix(5, 2))
        fo_matrix(6, 2)
    except ValueError as e:
        print(f"Error: {e}")
