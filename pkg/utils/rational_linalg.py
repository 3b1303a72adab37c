"""
Exact rational linear algebra
Matrices of Fractions with rank, inversion, rectangular solving and kernels.
All structural decisions of the reduction engine go through this module,
never through floating point.
"""
from dataclasses import dataclass
from fractions import Fraction
from math import gcd, lcm
from typing import Iterable, List, Sequence, Tuple

import numpy as np

from utils.exceptions import (
    DimensionMismatchError, InconsistentSystemError, NonMaximalRankError, SingularMatrixError
)

Rational = Fraction


def to_rational(value) -> Fraction:
    """Convert ints, strings ("p/q", "0.25") and floats (by decimal repr) to a Fraction"""
    if isinstance(value, Fraction):
        return value
    if isinstance(value, float):
        return Fraction(repr(value))
    if isinstance(value, str):
        return Fraction(value.strip())
    return Fraction(value)


def format_rational(value: Fraction) -> str:
    return str(value)


@dataclass(frozen=True)
class RatMatrix:
    """Immutable row-major matrix of Fractions"""
    rows: int
    cols: int
    entries: Tuple[Fraction, ...]

    def __post_init__(self):
        entries = tuple(to_rational(e) for e in self.entries)
        if self.rows < 0 or self.cols < 0 or len(entries) != self.rows * self.cols:
            raise DimensionMismatchError(
                f"{len(entries)} entries do not fill a {self.rows}x{self.cols} matrix"
            )
        object.__setattr__(self, 'entries', entries)

    # Constructors ---------------------------------------------------------

    @classmethod
    def from_rows(cls, rows: Sequence[Sequence], cols: int = None) -> 'RatMatrix':
        rows = [list(r) for r in rows]
        if cols is None:
            cols = len(rows[0]) if rows else 0
        for r in rows:
            if len(r) != cols:
                raise DimensionMismatchError(f"ragged matrix: expected {cols} columns, got {len(r)}")
        return cls(len(rows), cols, tuple(e for r in rows for e in r))

    @classmethod
    def from_array(cls, array: np.ndarray) -> 'RatMatrix':
        rows, cols = array.shape
        return cls(rows, cols, tuple(to_rational(e) for e in array.reshape(-1)))

    @classmethod
    def identity(cls, n: int) -> 'RatMatrix':
        return cls(n, n, tuple(Fraction(int(i == j)) for i in range(n) for j in range(n)))

    @classmethod
    def zeros(cls, rows: int, cols: int) -> 'RatMatrix':
        return cls(rows, cols, (Fraction(0),) * (rows * cols))

    @classmethod
    def column_vector(cls, values: Iterable) -> 'RatMatrix':
        values = tuple(values)
        return cls(len(values), 1, values)

    # Access ---------------------------------------------------------------

    @property
    def shape(self) -> Tuple[int, int]:
        return self.rows, self.cols

    def __getitem__(self, index: Tuple[int, int]) -> Fraction:
        i, j = index
        return self.entries[i * self.cols + j]

    def row(self, i: int) -> Tuple[Fraction, ...]:
        return self.entries[i * self.cols:(i + 1) * self.cols]

    def column(self, j: int) -> Tuple[Fraction, ...]:
        return tuple(self.entries[i * self.cols + j] for i in range(self.rows))

    def tolist(self) -> List[List[Fraction]]:
        return [list(self.row(i)) for i in range(self.rows)]

    def to_array(self) -> np.ndarray:
        return np.array(self.entries, dtype=object).reshape(self.rows, self.cols)

    def to_float(self) -> np.ndarray:
        return np.array([float(e) for e in self.entries], dtype=float).reshape(self.rows, self.cols)

    def to_strings(self) -> List[List[str]]:
        return [[format_rational(e) for e in self.row(i)] for i in range(self.rows)]

    # Algebra --------------------------------------------------------------

    def transpose(self) -> 'RatMatrix':
        return RatMatrix.from_rows([self.column(j) for j in range(self.cols)], self.rows)

    def __matmul__(self, other: 'RatMatrix') -> 'RatMatrix':
        if self.cols != other.rows:
            raise DimensionMismatchError(f"cannot multiply {self.shape} by {other.shape}")
        if self.cols == 0:
            return RatMatrix.zeros(self.rows, other.cols)
        return RatMatrix.from_array(self.to_array() @ other.to_array())

    def __neg__(self) -> 'RatMatrix':
        return RatMatrix(self.rows, self.cols, tuple(-e for e in self.entries))

    def hstack(self, other: 'RatMatrix') -> 'RatMatrix':
        if self.rows != other.rows:
            raise DimensionMismatchError(f"cannot stack {self.shape} beside {other.shape}")
        return RatMatrix.from_rows([self.row(i) + other.row(i) for i in range(self.rows)],
                                   self.cols + other.cols)

    def is_zero(self) -> bool:
        return all(e == 0 for e in self.entries)

    def __str__(self) -> str:
        return '[' + '; '.join(' '.join(format_rational(e) for e in self.row(i))
                               for i in range(self.rows)) + ']'


def _integer_rows(matrix: RatMatrix) -> List[List[int]]:
    """Scale each row by the lcm of its denominators; rank is unchanged"""
    rows = []
    for i in range(matrix.rows):
        row = matrix.row(i)
        scale = lcm(*(e.denominator for e in row)) if row else 1
        rows.append([int(e * scale) for e in row])
    return rows


def rank(matrix: RatMatrix) -> int:
    """Exact rank by fraction-free (Bareiss) elimination, pivot = first nonzero entry"""
    m = _integer_rows(matrix)
    n_rows, n_cols = matrix.rows, matrix.cols
    r = 0
    prev = 1
    for c in range(n_cols):
        if r == n_rows:
            break
        pivot = next((i for i in range(r, n_rows) if m[i][c] != 0), None)
        if pivot is None:
            continue
        if pivot != r:
            m[r], m[pivot] = m[pivot], m[r]
        p = m[r][c]
        for i in range(r + 1, n_rows):
            f = m[i][c]
            for j in range(c + 1, n_cols):
                # exact by Sylvester's identity
                m[i][j] = (p * m[i][j] - f * m[r][j]) // prev
            m[i][c] = 0
        prev = p
        r += 1
    return r


def rref(matrix: RatMatrix) -> Tuple[RatMatrix, Tuple[int, ...]]:
    """Reduced row echelon form and pivot columns (exact Gauss-Jordan)"""
    m = matrix.tolist()
    n_rows, n_cols = matrix.rows, matrix.cols
    pivots = []
    r = 0
    for c in range(n_cols):
        if r == n_rows:
            break
        pivot = next((i for i in range(r, n_rows) if m[i][c] != 0), None)
        if pivot is None:
            continue
        m[r], m[pivot] = m[pivot], m[r]
        p = m[r][c]
        m[r] = [e / p for e in m[r]]
        for i in range(n_rows):
            if i != r and m[i][c] != 0:
                f = m[i][c]
                m[i] = [a - f * b for a, b in zip(m[i], m[r])]
        pivots.append(c)
        r += 1
    return RatMatrix.from_rows(m, n_cols), tuple(pivots)


def is_invertible(matrix: RatMatrix) -> bool:
    return matrix.rows == matrix.cols and rank(matrix) == matrix.rows


def invert(matrix: RatMatrix) -> RatMatrix:
    if matrix.rows != matrix.cols:
        raise DimensionMismatchError(f"cannot invert a non-square {matrix.shape} matrix")
    n = matrix.rows
    reduced, pivots = rref(matrix.hstack(RatMatrix.identity(n)))
    if pivots != tuple(range(n)):
        raise SingularMatrixError(rank(matrix), n)
    return RatMatrix.from_rows([reduced.row(i)[n:] for i in range(n)], n)


def solve_right(b: RatMatrix, b_prime: RatMatrix) -> RatMatrix:
    """Unique C with B.C = B' for full-column-rank B; raises on inconsistent columns"""
    if b.rows != b_prime.rows:
        raise DimensionMismatchError(f"B is {b.shape} but B' is {b_prime.shape}")
    n = b.cols
    b_rank = rank(b)
    if b_rank != n:
        raise NonMaximalRankError(b_rank, n)
    reduced, _ = rref(b.hstack(b_prime))
    bad_columns = [
        j for j in range(b_prime.cols)
        if any(reduced[i, n + j] != 0 for i in range(n, b.rows))
    ]
    if bad_columns:
        raise InconsistentSystemError(bad_columns)
    return RatMatrix.from_rows([reduced.row(i)[n:] for i in range(n)], b_prime.cols)


def augment_ones(b: RatMatrix) -> RatMatrix:
    """B~ = [B | 1]"""
    return b.hstack(RatMatrix.column_vector([1] * b.rows))


def primitive_vector(vector: Sequence[Fraction]) -> Tuple[Fraction, ...]:
    """Scale to coprime integers with the first nonzero entry positive"""
    vector = [to_rational(v) for v in vector]
    nonzero = [v for v in vector if v != 0]
    if not nonzero:
        return tuple(vector)
    scale = lcm(*(v.denominator for v in nonzero))
    ints = [int(v * scale) for v in vector]
    g = 0
    for v in ints:
        g = gcd(g, v)
    sign = 1 if nonzero[0] > 0 else -1
    return tuple(Fraction(sign * v, g) for v in ints)


def null_space(matrix: RatMatrix) -> List[Tuple[Fraction, ...]]:
    """Basis of {v : M.v = 0}, one primitive vector per free column (increasing order)"""
    reduced, pivots = rref(matrix)
    free = [c for c in range(matrix.cols) if c not in pivots]
    basis = []
    for f in free:
        v = [Fraction(0)] * matrix.cols
        v[f] = Fraction(1)
        for r, p in enumerate(pivots):
            v[p] = -reduced[r, f]
        basis.append(primitive_vector(v))
    return basis
