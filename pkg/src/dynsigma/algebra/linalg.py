"""Exact linear algebra over Q and over polynomial entries."""

from dataclasses import dataclass, field
from fractions import Fraction
from typing import List, Optional, Sequence, Tuple, Union

from dynsigma.algebra.exactpoly import ExactPolynomial, bareiss_determinant
from dynsigma.core.errors import PolynomialError, SingularMatrixError

__all__ = [
    "LinearSolution",
    "bareiss_determinant",
    "characteristic_polynomial",
    "cofactor_determinant",
    "identity_matrix",
    "invert_rational_matrix",
    "matmul",
    "matvec",
    "rational_charpoly",
    "rational_rref",
    "solve_rational_system",
]

Matrix = List[List[Fraction]]

UNIQUE = "unique"
UNDERDETERMINED = "underdetermined"
INCONSISTENT = "inconsistent"


@dataclass(frozen=True)
class LinearSolution:
    status: str
    solution: Optional[Tuple[Fraction, ...]] = None
    nullity: int = 0
    free_columns: Tuple[int, ...] = field(default_factory=tuple)

    @property
    def is_unique(self) -> bool:
        return self.status == UNIQUE


def _as_matrix(rows: Sequence[Sequence[Union[int, Fraction]]]) -> Matrix:
    return [[Fraction(x) for x in row] for row in rows]


def identity_matrix(n: int) -> Matrix:
    return [[Fraction(int(i == j)) for j in range(n)] for i in range(n)]


def matmul(a: Sequence[Sequence[Fraction]], b: Sequence[Sequence[Fraction]]) -> Matrix:
    if a and len(a[0]) != len(b):
        raise PolynomialError("Matrix shapes do not align")
    cols = len(b[0]) if b else 0
    return [
        [sum((Fraction(row[k]) * b[k][j] for k in range(len(b))), Fraction(0)) for j in range(cols)]
        for row in a
    ]


def matvec(a: Sequence[Sequence[Fraction]], v: Sequence[Fraction]) -> List[Fraction]:
    return [sum((Fraction(x) * y for x, y in zip(row, v)), Fraction(0)) for row in a]


def rational_rref(rows: Sequence[Sequence[Union[int, Fraction]]]) -> Tuple[Matrix, List[int]]:
    """Reduced row echelon form and the pivot columns."""
    m = _as_matrix(rows)
    if not m:
        return m, []
    n_rows, n_cols = len(m), len(m[0])
    pivots: List[int] = []
    r = 0
    for c in range(n_cols):
        pivot = next((i for i in range(r, n_rows) if m[i][c]), None)
        if pivot is None:
            continue
        m[r], m[pivot] = m[pivot], m[r]
        inv = 1 / m[r][c]
        m[r] = [x * inv for x in m[r]]
        for i in range(n_rows):
            if i != r and m[i][c]:
                factor = m[i][c]
                m[i] = [x - factor * y for x, y in zip(m[i], m[r])]
        pivots.append(c)
        r += 1
        if r == n_rows:
            break
    return m, pivots


def solve_rational_system(
    a: Sequence[Sequence[Union[int, Fraction]]],
    b: Sequence[Union[int, Fraction]],
) -> LinearSolution:
    if len(a) != len(b):
        raise PolynomialError("Right-hand side length does not match the row count")
    n_cols = len(a[0]) if a else 0
    augmented = [list(row) + [rhs] for row, rhs in zip(a, b)]
    reduced, pivots = rational_rref(augmented)
    if n_cols in pivots:
        return LinearSolution(status=INCONSISTENT)
    free = tuple(c for c in range(n_cols) if c not in pivots)
    if free:
        return LinearSolution(status=UNDERDETERMINED, nullity=len(free), free_columns=free)
    solution = [Fraction(0)] * n_cols
    for row, c in enumerate(pivots):
        solution[c] = reduced[row][n_cols]
    return LinearSolution(status=UNIQUE, solution=tuple(solution))


def invert_rational_matrix(rows: Sequence[Sequence[Union[int, Fraction]]]) -> Matrix:
    m = _as_matrix(rows)
    n = len(m)
    if any(len(row) != n for row in m):
        raise PolynomialError("Inverse of a non-square matrix")
    augmented = [row + ident for row, ident in zip(m, identity_matrix(n))]
    reduced, pivots = rational_rref(augmented)
    if pivots[:n] != list(range(n)):
        raise SingularMatrixError("Matrix is singular over Q")
    return [row[n:] for row in reduced]


def cofactor_determinant(matrix: Sequence[Sequence[ExactPolynomial]]) -> ExactPolynomial:
    """Laplace expansion along the first row; meant for N <= 3."""
    n = len(matrix)
    if n == 0:
        raise PolynomialError("Empty matrix needs an explicit variable list")
    if n == 1:
        return matrix[0][0]
    if n == 2:
        return matrix[0][0] * matrix[1][1] - matrix[0][1] * matrix[1][0]
    total = ExactPolynomial.zero(matrix[0][0].variables)
    for k, entry in enumerate(matrix[0]):
        if entry.is_zero:
            continue
        minor = [row[:k] + row[k + 1:] for row in matrix[1:]]
        term = entry * cofactor_determinant(minor)
        total = total - term if k % 2 else total + term
    return total


def characteristic_polynomial(
    matrix: Sequence[Sequence[Union[ExactPolynomial, int, Fraction]]],
    var: str,
    variables: Sequence[str],
) -> ExactPolynomial:
    """det(var*Id - matrix); entries may be scalars or polynomials in ``variables``."""
    names = tuple(variables)
    n = len(matrix)
    if n == 0:
        return ExactPolynomial.one(names)
    x = ExactPolynomial.variable(var, names)
    rows = []
    for i in range(n):
        row = []
        for j in range(n):
            entry = matrix[i][j]
            if not isinstance(entry, ExactPolynomial):
                entry = ExactPolynomial.constant(entry, names)
            row.append((x - entry) if i == j else -entry)
        rows.append(row)
    return bareiss_determinant(rows, names)


def rational_charpoly(
    rows: Sequence[Sequence[Union[int, Fraction]]], var: str = "t"
) -> ExactPolynomial:
    return characteristic_polynomial(_as_matrix(rows), var, (var,))
