"""
Quasipolynomial system models

    QPSystem:     x_i' = x_i (lambda_i + sum_j A_ij prod_k x_k^B_jk)
    ExpQPSystem:  y_i' = y_i sum_j A_ij exp(Gamma_j t) prod_k y_k^B_jk
"""
from dataclasses import dataclass, field, replace
from typing import FrozenSet, Sequence, Set, Tuple

from models.coefficients import Coefficient
from utils.exceptions import DimensionMismatchError
from utils.rational_linalg import RatMatrix

CoefMatrix = Tuple[Tuple[Coefficient, ...], ...]


def as_coef_matrix(rows: Sequence[Sequence]) -> CoefMatrix:
    return tuple(tuple(Coefficient.coerce(e) for e in row) for row in rows)


def as_coef_vector(values: Sequence) -> Tuple[Coefficient, ...]:
    return tuple(Coefficient.coerce(v) for v in values)


def rat_times_coef_matrix(left: RatMatrix, right: CoefMatrix, right_cols: int) -> CoefMatrix:
    """Exact product of a rational matrix with a coefficient matrix"""
    if left.cols != len(right):
        raise DimensionMismatchError(f"cannot multiply {left.shape} by {len(right)}x{right_cols}")
    out = []
    for i in range(left.rows):
        row = []
        for j in range(right_cols):
            acc = Coefficient.zero()
            for k in range(left.cols):
                factor = left[i, k]
                if factor != 0 and not right[k][j].is_zero():
                    acc = acc + right[k][j] * factor
            row.append(acc)
        out.append(tuple(row))
    return tuple(out)


def rat_times_coef_vector(left: RatMatrix, vector: Sequence[Coefficient]) -> Tuple[Coefficient, ...]:
    column = tuple((v,) for v in vector)
    return tuple(row[0] for row in rat_times_coef_matrix(left, column, 1))


def _collect_params(*groups) -> FrozenSet[str]:
    names: Set[str] = set()
    for group in groups:
        for c in group:
            names |= c.params
    return frozenset(names)


@dataclass(frozen=True)
class _QPBase:
    var_names: Tuple[str, ...]
    A: CoefMatrix
    B: RatMatrix

    @property
    def n(self) -> int:
        return len(self.var_names)

    @property
    def m(self) -> int:
        return self.B.rows

    def _check_core(self):
        object.__setattr__(self, 'var_names', tuple(self.var_names))
        object.__setattr__(self, 'A', as_coef_matrix(self.A))
        if self.B.cols != self.n:
            raise DimensionMismatchError(f"B has {self.B.cols} columns for {self.n} variables")
        if len(self.A) != self.n:
            raise DimensionMismatchError(f"A has {len(self.A)} rows for {self.n} variables")
        for row in self.A:
            if len(row) != self.m:
                raise DimensionMismatchError(f"A row has {len(row)} entries for {self.m} monomials")
        if len(set(self.var_names)) != self.n:
            raise DimensionMismatchError(f"duplicate variable names in {self.var_names}")

    def a_column(self, j: int) -> Tuple[Coefficient, ...]:
        return tuple(self.A[i][j] for i in range(self.n))

    def equation_dependencies(self, i: int) -> FrozenSet[int]:
        """Variables appearing in the bracket of equation i"""
        deps = set()
        for j in range(self.m):
            if not self.A[i][j].is_zero():
                deps |= {k for k in range(self.n) if self.B[j, k] != 0}
        return frozenset(deps)

    def is_decoupled(self, index: int = 0) -> bool:
        """No equation other than `index` depends on variable `index`"""
        return all(index not in self.equation_dependencies(i)
                   for i in range(self.n) if i != index)


@dataclass(frozen=True)
class QPSystem(_QPBase):
    lam: Tuple[Coefficient, ...] = ()

    def __post_init__(self):
        self._check_core()
        lam = as_coef_vector(self.lam) if self.lam else tuple(Coefficient.zero() for _ in self.var_names)
        object.__setattr__(self, 'lam', lam)
        if len(self.lam) != self.n:
            raise DimensionMismatchError(f"lambda has {len(self.lam)} entries for {self.n} variables")

    @property
    def params(self) -> FrozenSet[str]:
        return _collect_params(self.lam, *self.A)

    @property
    def lambda_is_zero(self) -> bool:
        return all(c.is_zero() for c in self.lam)

    @property
    def is_numeric(self) -> bool:
        return not self.params

    def with_names(self, var_names: Sequence[str]) -> 'QPSystem':
        return replace(self, var_names=tuple(var_names))


@dataclass(frozen=True)
class ExpQPSystem(_QPBase):
    gamma: Tuple[Coefficient, ...] = ()
    origin_lambda: Tuple[Coefficient, ...] = field(default=(), compare=False)

    def __post_init__(self):
        self._check_core()
        object.__setattr__(self, 'gamma', as_coef_vector(self.gamma) if self.gamma
                           else tuple(Coefficient.zero() for _ in range(self.m)))
        object.__setattr__(self, 'origin_lambda', as_coef_vector(self.origin_lambda)
                           if self.origin_lambda else tuple(Coefficient.zero() for _ in self.var_names))
        if len(self.gamma) != self.m:
            raise DimensionMismatchError(f"Gamma has {len(self.gamma)} entries for {self.m} monomials")
        if len(self.origin_lambda) != self.n:
            raise DimensionMismatchError(
                f"origin lambda has {len(self.origin_lambda)} entries for {self.n} variables")

    @property
    def params(self) -> FrozenSet[str]:
        return _collect_params(self.gamma, self.origin_lambda, *self.A)

    @property
    def gamma_is_zero(self) -> bool:
        return all(g.is_zero() for g in self.gamma)

    @property
    def is_numeric(self) -> bool:
        return not self.params

    def with_names(self, var_names: Sequence[str]) -> 'ExpQPSystem':
        return replace(self, var_names=tuple(var_names))
