"""
Reduction engine
Case classification, QMT construction, the lambda = 0 and uniform-Gamma
reductions, and kernel decoupling for systems whose A has a left kernel.
"""
import logging
from dataclasses import replace
from fractions import Fraction
from typing import List, Optional, Sequence, Tuple, Union

from models.coefficients import ONE, Atom, Coefficient, atom_to_str
from models.qp_system import ExpQPSystem, QPSystem, rat_times_coef_vector
from models.reduction import (
    BPrimePolicy, CaseLabel, ConditionSet, PolicyKind, ReductionMethod, ReductionResult, Satisfiability
)
from models.transforms import ExpNtt, ExpScaling, MonomialNtt, Qmt, TransformChain
from parsers.odeparse import render_bracket, render_monomial
from services.qp_transforms import (
    apply_exp_ntt, apply_monomial_ntt, apply_qmt, as_autonomous, check_prefactor, exp_scale, fresh_names
)
from utils.exceptions import (
    ConditionsUnsatisfiedError, FullRankError, InconsistentSystemError, NonMaximalRankError,
    NotReducibleError, PolicyInfeasibleError, WrongCaseError
)
from utils.rational_linalg import (
    RatMatrix, augment_ones, invert, null_space, rank, rref, solve_right
)

logger = logging.getLogger(__name__)


def classify(sys: QPSystem) -> CaseLabel:
    if not sys.lambda_is_zero:
        return CaseLabel.CASE_III
    if sys.m == sys.n:
        return CaseLabel.CASE_I
    return CaseLabel.CASE_II


def _unit(n: int, k: int) -> Tuple[Fraction, ...]:
    return tuple(Fraction(int(i == k)) for i in range(n))


def _completion(B: RatMatrix) -> Tuple[RatMatrix, int]:
    c1 = solve_right(B, RatMatrix.column_vector([1] * B.rows)).column(0)
    pivot = next(i for i, v in enumerate(c1) if v != 0)
    columns = [c1] + [_unit(B.cols, k) for k in range(B.cols) if k != pivot]
    return RatMatrix.from_rows(list(zip(*columns)), B.cols), pivot


def _cvm(B: RatMatrix) -> RatMatrix:
    m, n = B.shape
    target = [[Fraction(1)] + [Fraction(int(i == j)) for j in range(1, n)] for i in range(m)]
    try:
        return solve_right(B, RatMatrix.from_rows(target, n))
    except InconsistentSystemError as exc:
        raise PolicyInfeasibleError(
            f"CVM target columns {[c + 1 for c in exc.columns]} lie outside the column space of B"
        ) from exc


def build_qmt(sys: QPSystem, policy: BPrimePolicy = BPrimePolicy()) -> Tuple[RatMatrix, int]:
    """
    QMT matrix C with column 1 of B.C all ones.

    Returns:
        (C, pivot) where pivot is the 0-based original column replaced by the
        decoupled variable (0 unless the Completion rule picks another)
    """
    n = sys.n
    if policy.kind is PolicyKind.EXPLICIT:
        C = policy.matrix
        invert(C)
        if any(e != 1 for e in (sys.B @ C).column(0)):
            raise PolicyInfeasibleError("column 1 of B.C is not all ones for the given QMT")
        return C, 0

    b_rank = rank(sys.B)
    if b_rank != n:
        raise NonMaximalRankError(b_rank, n)
    tilde_rank = rank(augment_ones(sys.B))
    if tilde_rank != n:
        raise NotReducibleError(
            f"rank(B~) = {tilde_rank} = n + 1: no QMT maps every quasimonomial onto the first variable",
            {'rank_B': b_rank, 'rank_B_tilde': tilde_rank},
        )
    if policy.kind is PolicyKind.CVM:
        return _cvm(sys.B), 0
    return _completion(sys.B)


def independent_equations(sys: Union[QPSystem, ExpQPSystem]) -> Tuple[int, ...]:
    """1-based indices i >= 2 whose equation involves only its own variable"""
    return tuple(i + 1 for i in range(1, sys.n) if sys.equation_dependencies(i) <= {i})


def assert_decoupled(sys: Union[QPSystem, ExpQPSystem]):
    if not sys.is_decoupled(0):
        offending = [j for j in range(sys.m) if sys.B[j, 0] != 0
                     and any(not sys.A[i][j].is_zero() for i in range(1, sys.n))]
        raise NotReducibleError(
            "transformed equations 2..n still depend on variable 1",
            {'quasimonomials': [j + 1 for j in offending]},
        )


def _quadrature_note(sys: QPSystem, prefactor: Coefficient, independent: Tuple[int, ...]) -> str:
    first = sys.var_names[0]
    note = f"{first}' = {first}*({render_bracket(sys, 0)}) in tau with d tau = "
    note += f"{first} dt" if prefactor == ONE else f"({prefactor})*{first} dt"
    if sys.n == 1:
        return note + "; pure quadrature"
    rest = ', '.join(sys.var_names[1:])
    note += f"; log({first}) follows by quadrature once {rest} are known"
    if independent:
        names = ', '.join(sys.var_names[i - 1] for i in independent)
        note += f"; directly integrable: {names}"
    return note


def reduce_lambda_zero(sys: QPSystem, policy: BPrimePolicy = BPrimePolicy()) -> ReductionResult:
    """QMT onto a ones column, then d tau = prefactor * y1 dt"""
    if not sys.lambda_is_zero:
        raise WrongCaseError("lambda != 0: use the uniform-Gamma reduction")
    C, pivot = build_qmt(sys, policy)
    prefactor = check_prefactor(policy.prefactor)
    beta = _unit(sys.n, 0)
    transformed = apply_qmt(sys, C, fresh_names(sys))
    reduced = apply_monomial_ntt(transformed, prefactor, beta)
    assert_decoupled(reduced)
    independent = independent_equations(reduced)
    logger.info("decoupled %s via %s QMT", transformed.var_names[0], policy.kind.value)
    return ReductionResult(
        case=classify(sys),
        reduced=reduced,
        chain=TransformChain((Qmt(C), MonomialNtt(prefactor, beta))),
        quadrature_note=_quadrature_note(reduced, prefactor, independent),
        method=ReductionMethod.LAMBDA_ZERO,
        source_index=pivot + 1,
        independent=independent,
        qmt=C,
        b_prime=sys.B @ C,
        policy=policy.kind.value,
    )


# Uniform-Gamma conditions -------------------------------------------------

def _linear_solve(equations: Tuple[Coefficient, ...]):
    """
    Treat every parameter atom as an unknown and row-reduce the equations.

    Returns:
        (consistent, solution) with solution mapping pivot atoms to expressions
        in the free atoms
    """
    atoms: List[Atom] = sorted({a for eq in equations for a, _ in eq.terms if a != ()}, reverse=True)
    rows = []
    for eq in equations:
        weights = eq.as_dict()
        rows.append([weights.get(a, Fraction(0)) for a in atoms] + [-weights.get((), Fraction(0))])
    reduced, pivots = rref(RatMatrix.from_rows(rows, len(atoms) + 1))
    if len(atoms) in pivots:
        return False, ()
    solution = []
    for r, p in enumerate(pivots):
        value = Coefficient.constant(reduced[r, len(atoms)])
        for f, atom in enumerate(atoms):
            if f != p and f not in pivots and reduced[r, f] != 0:
                value = value - Coefficient(((atom, Fraction(1)),)) * reduced[r, f]
        solution.append((atom_to_str(atoms[p]), value))
    return True, tuple(sorted(solution))


def _single_params(solution) -> bool:
    return all('*' not in name and '^' not in name for name, _ in solution)


def gamma_conditions(esys: ExpQPSystem) -> ConditionSet:
    """Gamma_j - Gamma_1 = 0 for j >= 2, as linear forms in the parameters"""
    gamma = esys.gamma
    equations = tuple(eq for eq in (g - gamma[0] for g in gamma[1:]) if not eq.is_zero())
    if not equations:
        return ConditionSet(gamma, (), Satisfiability.YES, reason='Gamma is uniform')
    consistent, solution = _linear_solve(equations)
    if not consistent:
        return ConditionSet(gamma, equations, Satisfiability.NO,
                            reason='the conditions are contradictory')
    if _single_params(solution):
        values = dict(solution)
        lam = [c.substitute(values) for c in esys.origin_lambda]
        if all(c.is_zero() for c in lam):
            return ConditionSet(gamma, equations, Satisfiability.NO, solution,
                                reason='only lambda = 0 satisfies the conditions')
    return ConditionSet(gamma, equations, Satisfiability.NEEDS_BINDING, solution,
                        reason='holds only for parameters satisfying the solution')


def reduce_case3(sys: QPSystem, policy: BPrimePolicy = BPrimePolicy()) -> ReductionResult:
    """y = exp(-lambda t) x, d tau = exp(gamma t) dt, then the lambda = 0 reduction"""
    if sys.lambda_is_zero:
        raise WrongCaseError("lambda = 0: use the lambda = 0 reduction")
    esys = exp_scale(sys, fresh_names(sys))
    conditions = gamma_conditions(esys)
    if conditions.satisfiable is not Satisfiability.YES:
        raise ConditionsUnsatisfiedError(conditions)
    gamma = conditions.common_gamma
    autonomous = as_autonomous(apply_exp_ntt(esys, gamma))
    head = TransformChain((ExpScaling(sys.lam), ExpNtt(gamma)))
    if autonomous.m == 0:
        return ReductionResult(
            case=CaseLabel.CASE_III,
            reduced=autonomous,
            chain=head,
            quadrature_note=f"{', '.join(autonomous.var_names)} constant after scaling",
            method=ReductionMethod.UNIFORM_GAMMA,
            independent=tuple(range(2, sys.n + 1)),
            policy=policy.kind.value,
            conditions=conditions,
        )
    inner = reduce_lambda_zero(autonomous, policy)
    logger.info("uniform Gamma = %s, reduced through case %s", gamma, inner.case.value)
    return replace(
        inner,
        case=CaseLabel.CASE_III,
        chain=head + inner.chain,
        method=ReductionMethod.UNIFORM_GAMMA,
        conditions=conditions,
    )


# Kernel decoupling --------------------------------------------------------

def _expanded_a(esys: ExpQPSystem) -> RatMatrix:
    """One row per (quasimonomial, parameter atom); v.A = 0 iff v annihilates every row"""
    rows = []
    for j in range(esys.m):
        column = esys.a_column(j)
        atoms = sorted({a for c in column for a, _ in c.terms})
        for atom in atoms:
            rows.append([c.as_dict().get(atom, Fraction(0)) for c in column])
    return RatMatrix.from_rows(rows, esys.n)


def _complete_basis(kernel: List[Tuple[Fraction, ...]], n: int) -> List[Tuple[Fraction, ...]]:
    """Unit rows, e1 first when possible, that extend the kernel rows to a basis"""
    rows: List[Tuple[Fraction, ...]] = []
    for k in range(n):
        if len(rows) + len(kernel) == n:
            break
        candidate = _unit(n, k)
        if rank(RatMatrix.from_rows(rows + [candidate] + kernel, n)) == len(rows) + 1 + len(kernel):
            rows.append(candidate)
    return rows


def kernel_decoupling(esys: ExpQPSystem, source_names: Optional[Sequence[str]] = None) -> ReductionResult:
    """
    QMT whose inverse ends with a basis of the left kernel of A: the last
    n - rank(A) transformed variables are constants of motion.

    With rank(A) = 1 every variable but the first is constant and the first
    equation is a quadrature. With rank(A) = r > 1 variables 1..r stay coupled.

    Args:
        esys: scaled system (lambda already moved into the Gamma factors)
        source_names: names of the unscaled variables the constants are written in

    Returns:
        ReductionResult with one constant expression per kernel row
    """
    n = esys.n
    kernel = null_space(_expanded_a(esys))
    if not kernel:
        raise FullRankError(n)
    dynamic = n - len(kernel)
    c_inv = RatMatrix.from_rows(_complete_basis(kernel, n) + kernel, n)
    C = invert(c_inv)
    reduced = apply_qmt(esys, C, fresh_names(esys))
    moving = [i + 1 for i in range(dynamic, n) if any(not c.is_zero() for c in reduced.A[i])]
    if moving:
        raise NotReducibleError("kernel rows did not yield constant variables", {'variables': moving})
    if dynamic == 1:
        assert_decoupled(reduced)

    names = tuple(source_names) if source_names is not None else esys.var_names
    lam = esys.origin_lambda
    shift = rat_times_coef_vector(c_inv, lam)
    constants = []
    for i in range(dynamic, n):
        monomial = render_monomial(names, c_inv.row(i)) or '1'
        if shift[i].is_zero():
            constants.append(f"{reduced.var_names[i]} = {monomial}")
        else:
            constants.append(f"{reduced.var_names[i]} = {monomial}*exp(({-shift[i]})*t)")

    first = reduced.var_names[0]
    if dynamic <= 1:
        note = f"{first}' = {first}*({render_bracket(reduced, 0)}) is a nonautonomous quadrature"
        if n > 1:
            note += f"; {', '.join(reduced.var_names[1:])} are constants of motion"
    else:
        note = (f"{', '.join(reduced.var_names[:dynamic])} form a nonautonomous system; "
                f"{', '.join(reduced.var_names[dynamic:])} are constants of motion")
    logger.info("kernel decoupling: %d constants of motion", len(constants))
    if not all(c.is_zero() for c in lam):
        case = CaseLabel.CASE_III
    else:
        case = CaseLabel.CASE_I if esys.m == n else CaseLabel.CASE_II
    return ReductionResult(
        case=case,
        reduced=reduced,
        chain=TransformChain((ExpScaling(lam), Qmt(C))),
        quadrature_note=note,
        method=ReductionMethod.KERNEL,
        constants=tuple(constants),
        independent=tuple(range(max(dynamic, 1) + 1, n + 1)),
        qmt=C,
        b_prime=esys.B @ C,
    )


def reduce(sys: QPSystem, policy: BPrimePolicy = BPrimePolicy()) -> ReductionResult:
    """Dispatch on the case label; Case III falls back to kernel decoupling"""
    case = classify(sys)
    if case is not CaseLabel.CASE_III:
        return reduce_lambda_zero(sys, policy)
    try:
        return reduce_case3(sys, policy)
    except (ConditionsUnsatisfiedError, NotReducibleError) as exc:
        failure = exc
    logger.info("uniform-Gamma reduction failed (%s); trying kernel decoupling", failure)
    esys = exp_scale(sys, fresh_names(sys))
    try:
        result = kernel_decoupling(esys, source_names=sys.var_names)
    except FullRankError:
        result = None
    if result is None or not result.reduced.is_decoupled(0):
        witness = dict(failure.witness())
        witness['rank_A'] = sys.n - (len(result.constants) if result is not None else 0)
        raise NotReducibleError(f"not reducible: {failure}", witness) from failure
    conditions = failure.conditions if isinstance(failure, ConditionsUnsatisfiedError) else None
    return replace(result, conditions=conditions, policy=policy.kind.value)
