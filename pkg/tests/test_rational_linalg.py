import random
from fractions import Fraction
from itertools import combinations, permutations

import pytest

from conftest import PROPERTY_SEEDS, random_full_rank, random_invertible, random_matrix
from utils.exceptions import (
    DimensionMismatchError, InconsistentSystemError, NonMaximalRankError, SingularMatrixError
)
from utils.rational_linalg import (
    RatMatrix, augment_ones, invert, is_invertible, null_space, primitive_vector, rank, rref,
    solve_right, to_rational
)

F = Fraction


def _det(rows):
    n = len(rows)
    total = F(0)
    for perm in permutations(range(n)):
        sign = 1
        for i in range(n):
            for j in range(i + 1, n):
                if perm[i] > perm[j]:
                    sign = -sign
        term = F(sign)
        for i in range(n):
            term *= rows[i][perm[i]]
        total += term
    return total


def _minor_rank(matrix: RatMatrix) -> int:
    """Largest k with a nonzero k x k minor"""
    for k in range(min(matrix.shape), 0, -1):
        for rs in combinations(range(matrix.rows), k):
            for cs in combinations(range(matrix.cols), k):
                if _det([[matrix[r, c] for c in cs] for r in rs]) != 0:
                    return k
    return 0


class TestBasics:
    def test_to_rational(self):
        assert to_rational("3/4") == F(3, 4)
        assert to_rational(" -2 ") == F(-2)
        assert to_rational(0.25) == F(1, 4)
        assert to_rational(5) == F(5)

    def test_ragged_rows_rejected(self):
        with pytest.raises(DimensionMismatchError):
            RatMatrix.from_rows([[1, 2], [3]])

    def test_matmul_and_transpose(self):
        a = RatMatrix.from_rows([[1, 2], [3, 4]])
        b = RatMatrix.from_rows([["1/2", 0], [0, 1]])
        assert (a @ b).tolist() == [[F(1, 2), F(2)], [F(3, 2), F(4)]]
        assert a.transpose().row(0) == (F(1), F(3))

    def test_to_strings(self):
        assert RatMatrix.from_rows([[F(-1, 2), 3]]).to_strings() == [["-1/2", "3"]]


class TestRankAndInverse:
    def test_rank_examples(self):
        assert rank(RatMatrix.from_rows([[1, 2], [2, 4]])) == 1
        assert rank(RatMatrix.identity(3)) == 3
        assert rank(RatMatrix.zeros(2, 3)) == 0

    def test_halphen_b_tilde_has_rank_three(self, halphen):
        assert rank(halphen.B) == 3
        assert rank(augment_ones(halphen.B)) == 3

    def test_invert(self):
        c = RatMatrix.from_rows([[1, "1/2", "1/2"], [1, 0, "1/2"], [1, "1/2", 0]])
        assert c @ invert(c) == RatMatrix.identity(3)

    def test_singular(self):
        with pytest.raises(SingularMatrixError) as info:
            invert(RatMatrix.from_rows([[1, 2], [2, 4]]))
        assert info.value.witness() == {'rank': 1, 'dimension': 2}
        assert not is_invertible(RatMatrix.from_rows([[1, 2], [2, 4]]))

    def test_rref_pivots(self):
        reduced, pivots = rref(RatMatrix.from_rows([[2, 4, 2], [1, 2, 3]]))
        assert pivots == (0, 2)
        assert reduced.row(0) == (F(1), F(2), F(0))


class TestSolveRight:
    def test_unique_solution(self):
        b = RatMatrix.from_rows([[1, 0], [0, 1], [1, 1]])
        c = RatMatrix.from_rows([[2, "1/3"], [-1, 0]])
        assert solve_right(b, b @ c) == c

    def test_inconsistent_columns_reported(self):
        b = RatMatrix.from_rows([[1, 0], [0, 1], [1, 1]])
        target = RatMatrix.from_rows([[1, 1], [1, 0], [2, 0]])
        with pytest.raises(InconsistentSystemError) as info:
            solve_right(b, target)
        assert info.value.columns == [1]

    def test_rank_deficient(self):
        with pytest.raises(NonMaximalRankError):
            solve_right(RatMatrix.from_rows([[1, 1], [2, 2]]), RatMatrix.from_rows([[1], [1]]))


class TestNullSpace:
    def test_riccati_kernel(self):
        ones = RatMatrix.from_rows([[1, 1, 1]] * 3)
        assert null_space(ones) == [(F(1), F(-1), F(0)), (F(1), F(0), F(-1))]

    def test_full_rank_has_trivial_kernel(self):
        assert null_space(RatMatrix.identity(3)) == []

    def test_primitive_vector(self):
        assert primitive_vector([F(-1, 2), F(1, 3), 0]) == (F(3), F(-2), F(0))


@pytest.mark.parametrize('seed', PROPERTY_SEEDS)
def test_rank_matches_minor_oracle(seed):
    rng = random.Random(seed)
    rows, cols = rng.randint(1, 4), rng.randint(1, 5)
    matrix = random_matrix(rng, rows, cols, span=2)
    if rng.random() < 0.3 and rows > 1:
        # force a dependent row
        dependent = [matrix[0, j] * 2 - matrix[rows - 1, j] for j in range(cols)]
        matrix = RatMatrix.from_rows([matrix.row(i) for i in range(rows - 1)] + [dependent], cols)
    assert rank(matrix) == _minor_rank(matrix)


@pytest.mark.parametrize('seed', PROPERTY_SEEDS)
def test_rank_invariant_under_invertible_c(seed):
    rng = random.Random(seed)
    n = rng.randint(1, 4)
    b = random_matrix(rng, rng.randint(n, 6), n)
    c = random_invertible(rng, n)
    assert rank(b @ c) == rank(b)
    assert c @ invert(c) == RatMatrix.identity(n)


@pytest.mark.parametrize('seed', PROPERTY_SEEDS)
def test_solve_right_agrees_with_rank(seed):
    rng = random.Random(seed)
    n = rng.randint(1, 4)
    m = rng.randint(n, min(n + 1, 4))
    b = random_full_rank(rng, m, n)
    c = random_matrix(rng, n, rng.randint(1, 3))
    assert solve_right(b, b @ c) == c

    column = RatMatrix.column_vector(random_matrix(rng, m, 1).column(0))
    consistent = rank(b.hstack(column)) == n
    if consistent:
        assert b @ solve_right(b, column) == column
    else:
        with pytest.raises(InconsistentSystemError):
            solve_right(b, column)


@pytest.mark.parametrize('seed', PROPERTY_SEEDS)
def test_null_space_vectors_annihilate(seed):
    rng = random.Random(seed)
    matrix = random_matrix(rng, rng.randint(1, 4), rng.randint(1, 5), span=1)
    basis = null_space(matrix)
    assert len(basis) == matrix.cols - rank(matrix)
    for v in basis:
        assert all(sum(matrix[i, k] * v[k] for k in range(matrix.cols)) == 0 for i in range(matrix.rows))
