"""
Format-preserving transformations of quasipolynomial systems
Every function returns a new, canonicalized system; inputs are never mutated.
"""
import logging
from fractions import Fraction
from typing import Dict, List, Mapping, Optional, Sequence, Tuple, Union

from models.coefficients import Coefficient
from models.qp_system import (
    ExpQPSystem, QPSystem, rat_times_coef_matrix, rat_times_coef_vector
)
from utils.exceptions import (
    DimensionMismatchError, EmptySystemError, NonMaximalRankError, NonMonomialCoefficientError,
    UnboundParameterError, WrongCaseError, ZeroPrefactorError
)
from utils.rational_linalg import RatMatrix, invert, rank, to_rational

logger = logging.getLogger(__name__)

AnySystem = Union[QPSystem, ExpQPSystem]
Row = Tuple[Fraction, ...]

NAME_PREFIXES = ('x', 'y', 'z', 'w', 'u', 'v', 's')


def fresh_names(sys: AnySystem) -> Tuple[str, ...]:
    """Next family of variable names: x -> y -> z -> w ..."""
    current = sys.var_names[0].rstrip('0123456789') if sys.var_names else ''
    taken = set(sys.var_names) | set(sys.params)
    start = NAME_PREFIXES.index(current) + 1 if current in NAME_PREFIXES else 1
    for prefix in NAME_PREFIXES[start:] + NAME_PREFIXES[:start]:
        names = tuple(f"{prefix}{i + 1}" for i in range(sys.n))
        if not taken & set(names):
            return names
    return tuple(f"v{len(taken)}_{i + 1}" for i in range(sys.n))


def _resolve_names(sys: AnySystem, var_names: Optional[Sequence[str]]) -> Tuple[str, ...]:
    if var_names is None:
        return sys.var_names
    names = tuple(var_names)
    if len(names) != sys.n:
        raise DimensionMismatchError(f"{len(names)} names given for {sys.n} variables")
    return names


def _is_zero_row(row: Row) -> bool:
    return all(e == 0 for e in row)


def _add_columns(left: List[Coefficient], right: Sequence[Coefficient]) -> List[Coefficient]:
    return [a + b for a, b in zip(left, right)]


def canonicalize(sys: AnySystem) -> AnySystem:
    """Merge equal quasimonomials, fold constant ones into lambda, drop dead columns, sort rows"""
    if isinstance(sys, ExpQPSystem):
        return _canonicalize_exp(sys)
    lam = list(sys.lam)
    merged: Dict[Row, List[Coefficient]] = {}
    for j in range(sys.m):
        row = sys.B.row(j)
        column = sys.a_column(j)
        if _is_zero_row(row):
            lam = _add_columns(lam, column)
        elif row in merged:
            merged[row] = _add_columns(merged[row], column)
        else:
            merged[row] = list(column)
    rows = sorted(r for r, col in merged.items() if not all(c.is_zero() for c in col))
    A = tuple(tuple(merged[r][i] for r in rows) for i in range(sys.n))
    return QPSystem(sys.var_names, A, RatMatrix.from_rows(rows, sys.n), tuple(lam))


def _canonicalize_exp(sys: ExpQPSystem) -> ExpQPSystem:
    merged: Dict[Tuple[Row, Coefficient], List[Coefficient]] = {}
    for j in range(sys.m):
        key = (sys.B.row(j), sys.gamma[j])
        column = sys.a_column(j)
        merged[key] = _add_columns(merged[key], column) if key in merged else list(column)
    keys = sorted(
        (k for k, col in merged.items() if not all(c.is_zero() for c in col)),
        key=lambda k: (k[0], k[1].sort_key()),
    )
    A = tuple(tuple(merged[k][i] for k in keys) for i in range(sys.n))
    return ExpQPSystem(
        sys.var_names, A, RatMatrix.from_rows([k[0] for k in keys], sys.n),
        gamma=tuple(k[1] for k in keys), origin_lambda=sys.origin_lambda,
    )


def normalize(sys: QPSystem) -> QPSystem:
    """Canonical form plus the standing assumptions: something to reduce and rank(B) = n"""
    result = canonicalize(sys)
    if result.m == 0:
        if result.lambda_is_zero:
            raise EmptySystemError()
        logger.debug("pure-lambda system with %d variables", result.n)
        return result
    b_rank = rank(result.B)
    if b_rank < result.n:
        raise NonMaximalRankError(b_rank, result.n)
    return result


def apply_qmt(sys: AnySystem, C: RatMatrix, var_names: Optional[Sequence[str]] = None) -> AnySystem:
    """x_i = prod_k y_k^C_ik, so B' = B.C, A' = C^-1.A, lambda' = C^-1.lambda"""
    if C.shape != (sys.n, sys.n):
        raise DimensionMismatchError(f"QMT matrix is {C.rows}x{C.cols}, expected {sys.n}x{sys.n}")
    c_inv = invert(C)
    names = _resolve_names(sys, var_names)
    B = sys.B @ C
    A = rat_times_coef_matrix(c_inv, sys.A, sys.m)
    if isinstance(sys, ExpQPSystem):
        result = ExpQPSystem(names, A, B, gamma=sys.gamma,
                             origin_lambda=rat_times_coef_vector(c_inv, sys.origin_lambda))
    else:
        result = QPSystem(names, A, B, rat_times_coef_vector(c_inv, sys.lam))
    return canonicalize(result)


def check_prefactor(prefactor) -> Coefficient:
    prefactor = Coefficient.coerce(prefactor)
    if prefactor.is_zero():
        raise ZeroPrefactorError()
    if not prefactor.is_monomial():
        raise NonMonomialCoefficientError(str(prefactor))
    return prefactor


def apply_monomial_ntt(sys: QPSystem, prefactor, beta: Sequence,
                       var_names: Optional[Sequence[str]] = None) -> QPSystem:
    """
    d tau = prefactor * prod_k x_k^beta_k dt.

    Every B row shifts by -beta and A is divided by the prefactor; a nonzero
    lambda becomes the quasimonomial with exponent row -beta.
    """
    prefactor = check_prefactor(prefactor)
    beta = tuple(to_rational(b) for b in beta)
    if len(beta) != sys.n:
        raise DimensionMismatchError(f"beta has {len(beta)} entries for {sys.n} variables")
    rows = [tuple(e - b for e, b in zip(sys.B.row(j), beta)) for j in range(sys.m)]
    A = [[a / prefactor for a in row] for row in sys.A]
    if not sys.lambda_is_zero:
        rows.append(tuple(-b for b in beta))
        for i, row in enumerate(A):
            row.append(sys.lam[i] / prefactor)
    result = QPSystem(
        _resolve_names(sys, var_names), tuple(tuple(r) for r in A),
        RatMatrix.from_rows(rows, sys.n),
    )
    return canonicalize(result)


def exp_scale(sys: QPSystem, var_names: Optional[Sequence[str]] = None) -> ExpQPSystem:
    """y_i = exp(-lambda_i t) x_i turns lambda into factors exp(Gamma_j t) with Gamma = B.lambda"""
    gamma = rat_times_coef_vector(sys.B, sys.lam)
    return ExpQPSystem(_resolve_names(sys, var_names), sys.A, sys.B,
                       gamma=gamma, origin_lambda=sys.lam)


def apply_exp_ntt(sys: ExpQPSystem, gamma) -> ExpQPSystem:
    """d tau = exp(gamma t) dt shifts every Gamma_j by -gamma"""
    gamma = Coefficient.coerce(gamma)
    shifted = tuple(g - gamma for g in sys.gamma)
    return canonicalize(ExpQPSystem(sys.var_names, sys.A, sys.B,
                                    gamma=shifted, origin_lambda=sys.origin_lambda))


def as_autonomous(sys: ExpQPSystem) -> QPSystem:
    """Drop the exponential wrapper once every Gamma_j vanishes"""
    if not sys.gamma_is_zero:
        raise WrongCaseError("time factors exp(Gamma_j t) do not all vanish")
    return canonicalize(QPSystem(sys.var_names, sys.A, sys.B))


def substitute_params(sys: AnySystem, assignments: Mapping[str, object]) -> AnySystem:
    """Partial symbolic binding; unassigned parameters stay symbolic"""
    values = {name: Coefficient.coerce(v) for name, v in assignments.items()}
    A = tuple(tuple(c.substitute(values) for c in row) for row in sys.A)
    if isinstance(sys, ExpQPSystem):
        result = ExpQPSystem(
            sys.var_names, A, sys.B,
            gamma=tuple(g.substitute(values) for g in sys.gamma),
            origin_lambda=tuple(c.substitute(values) for c in sys.origin_lambda),
        )
    else:
        result = QPSystem(sys.var_names, A, sys.B, tuple(c.substitute(values) for c in sys.lam))
    return canonicalize(result)


def bind_params(sys: AnySystem, assignments: Mapping[str, object]) -> AnySystem:
    """Substitute and require every coefficient to become a pure rational"""
    result = substitute_params(sys, assignments)
    missing = sorted(result.params)
    if missing:
        raise UnboundParameterError(missing[0])
    return result
