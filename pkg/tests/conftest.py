"""
Shared fixtures and random generators for the test suites
"""
import random
from fractions import Fraction
from pathlib import Path
from typing import List

import pytest

from models.coefficients import Coefficient
from models.qp_system import QPSystem
from parsers.odeparse import loads
from utils.rational_linalg import RatMatrix, invert, rank

FIXTURES = Path(__file__).resolve().parent.parent / 'fixtures'

PROPERTY_SEEDS = range(200)


def fixture_path(name: str) -> Path:
    return FIXTURES / name


def fixture_text(name: str) -> str:
    return fixture_path(name).read_text(encoding='utf-8')


@pytest.fixture
def euler():
    return loads(fixture_text('euler.qp'))


@pytest.fixture
def halphen():
    return loads(fixture_text('halphen.qp'))


@pytest.fixture
def maxwell_bloch():
    return loads(fixture_text('maxwell_bloch.qp'))


@pytest.fixture
def maxwell_bloch_x30_zero():
    return loads(fixture_text('maxwell_bloch_x30_zero.qp'))


@pytest.fixture
def riccati3():
    return loads(fixture_text('riccati3.qp'))


@pytest.fixture
def riccati5():
    return loads(fixture_text('riccati5.qp'))


# Random generators ---------------------------------------------------------

def random_fraction(rng: random.Random, span: int = 3, denominators=(1, 1, 1, 2, 3)) -> Fraction:
    return Fraction(rng.randint(-span, span), rng.choice(denominators))


def random_matrix(rng: random.Random, rows: int, cols: int, **kwargs) -> RatMatrix:
    return RatMatrix.from_rows([[random_fraction(rng, **kwargs) for _ in range(cols)]
                                for _ in range(rows)], cols)


def random_invertible(rng: random.Random, n: int) -> RatMatrix:
    """Product of a random unit lower and a random nonsingular upper triangular matrix"""
    lower = [[Fraction(int(i == j)) if j >= i else random_fraction(rng) for j in range(n)] for i in range(n)]
    upper = [[Fraction(0) if j < i else random_fraction(rng) for j in range(n)] for i in range(n)]
    for i in range(n):
        upper[i][i] = Fraction(rng.choice([-2, -1, 1, 2]), rng.choice([1, 2]))
    return RatMatrix.from_rows(lower, n) @ RatMatrix.from_rows(upper, n)


def random_full_rank(rng: random.Random, rows: int, cols: int) -> RatMatrix:
    while True:
        candidate = random_matrix(rng, rows, cols)
        if rank(candidate) == cols:
            return candidate


def random_coefficient(rng: random.Random, params: List[str]) -> Coefficient:
    value = Coefficient.constant(random_fraction(rng))
    if params and rng.random() < 0.3:
        value = value + Coefficient.param(rng.choice(params)) * rng.choice([1, -1, 2])
    return value


def random_system(rng: random.Random, n: int, m: int, params: List[str] = (), with_lambda: bool = False) -> QPSystem:
    """QP system with distinct nonzero B rows and rank(B) = n"""
    while True:
        B = random_full_rank(rng, m, n)
        rows = {B.row(j) for j in range(m)}
        if len(rows) == m and all(any(e != 0 for e in r) for r in rows):
            break
    A = [[random_coefficient(rng, list(params)) for _ in range(m)] for _ in range(n)]
    for j in range(m):
        if all(A[i][j].is_zero() for i in range(n)):
            A[rng.randrange(n)][j] = Coefficient.constant(1)
    lam = [random_coefficient(rng, list(params)) if with_lambda else 0 for _ in range(n)]
    names = tuple(f"x{i + 1}" for i in range(n))
    return QPSystem(names, tuple(tuple(r) for r in A), B, tuple(lam))


def reducible_system(rng: random.Random, n: int, m: int) -> QPSystem:
    """lambda = 0 system that admits a QMT onto a ones column: B = B' . C^-1 with B'[:, 0] = 1"""
    while True:
        tail = random_matrix(rng, m, n - 1) if n > 1 else RatMatrix.zeros(m, 0)
        b_prime = RatMatrix.from_rows([(Fraction(1),) + tail.row(j) for j in range(m)], n)
        if rank(b_prime) != n:
            continue
        B = b_prime @ invert(random_invertible(rng, n))
        if len({B.row(j) for j in range(m)}) == m:
            break
    A = [[Coefficient.constant(random_fraction(rng)) for _ in range(m)] for _ in range(n)]
    for j in range(m):
        if all(A[i][j].is_zero() for i in range(n)):
            A[0][j] = Coefficient.constant(1)
    return QPSystem(tuple(f"x{i + 1}" for i in range(n)), tuple(tuple(r) for r in A), B)
