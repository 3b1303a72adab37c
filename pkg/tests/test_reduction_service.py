import random
from dataclasses import replace
from fractions import Fraction

import pytest

from conftest import PROPERTY_SEEDS, fixture_path, random_full_rank, random_system, reducible_system
from connectors.qp_files import QPFileConnector
from models.coefficients import Coefficient
from models.qp_system import QPSystem
from models.reduction import BPrimePolicy, CaseLabel, ReductionMethod, Satisfiability
from parsers.odeparse import loads, render
from services.qp_transforms import apply_monomial_ntt, apply_qmt, exp_scale, normalize, substitute_params
from services.reduction_service import (
    build_qmt, classify, gamma_conditions, kernel_decoupling, reduce, reduce_case3, reduce_lambda_zero
)
from utils.exceptions import (
    ConditionsUnsatisfiedError, FullRankError, NotReducibleError, PolicyInfeasibleError, WrongCaseError
)
from utils.rational_linalg import RatMatrix, augment_ones, rank

EULER_CVM = """\
params: a1, a2, a3
vars: y1, y2, y3
y1' = y1*(-a1 + a2*y2 + a3*y3)
y2' = y2*(2*a1 - 2*a2*y2)
y3' = y3*(2*a1 - 2*a3*y3)
"""

EULER_COMPLETION = """\
params: a1, a2, a3
vars: y1, y2, y3
y1' = y1*(a1*y2*y3)
y2' = y2*(-a1*y2*y3 + a2*y2^-1*y3)
y3' = y3*(-a1*y2*y3 + a3*y2*y3^-1)
"""

HALPHEN_COMPLETION = """\
vars: y1, y2, y3
y1' = y1*(y2*y3 - y2 - y3)
y2' = y2*(-y2*y3 + y2^-1*y3 + y2 - 1)
y3' = y3*(-y2*y3 + y2*y3^-1 + y3 - 1)
"""

MAXWELL_BLOCH_EXPLICIT = """\
vars: z1, z2, z3
z1' = z1*(z2 - 1)
z2' = 2*z2*(1 - z2 - 2*z3)
z3' = 2*z3*(1 + 2*z3)
"""


def _bound_maxwell_bloch(sys):
    one, two = Coefficient.constant(1), Coefficient.constant(2)
    return normalize(substitute_params(sys, {'a1': one, 'a3': two, 'a4': two}))


class TestClassify:
    def test_case_labels(self, euler, halphen, maxwell_bloch):
        assert classify(euler) is CaseLabel.CASE_I
        assert classify(halphen) is CaseLabel.CASE_II
        assert classify(maxwell_bloch) is CaseLabel.CASE_III


class TestLambdaZero:
    def test_euler_cvm(self, euler):
        result = reduce(euler, BPrimePolicy.cvm())
        assert result.qmt == RatMatrix.from_rows([[1, "1/2", "1/2"], [1, 0, "1/2"], [1, "1/2", 0]])
        assert result.b_prime == RatMatrix.from_rows([[1, 0, 0], [1, 1, 0], [1, 0, 1]])
        assert result.reduced == loads(EULER_CVM, normalize=False)
        assert result.independent == (2, 3)
        assert "directly integrable: y2, y3" in result.quadrature_note
        assert result.case is CaseLabel.CASE_I
        assert result.policy == 'cvm'

    def test_euler_completion(self, euler):
        result = reduce(euler)
        assert result.qmt == RatMatrix.from_rows([[1, 0, 0], [1, 1, 0], [1, 0, 1]])
        assert result.reduced == loads(EULER_COMPLETION, normalize=False)
        assert result.independent == ()
        assert result.source_index == 1

    def test_halphen_completion(self, halphen):
        result = reduce(halphen)
        assert result.case is CaseLabel.CASE_II
        assert result.method is ReductionMethod.LAMBDA_ZERO
        assert result.reduced == loads(HALPHEN_COMPLETION, normalize=False)
        assert [s['kind'] for s in result.chain.to_dicts()] == ['qmt', 'monomial_ntt']

    def test_halphen_cvm_is_infeasible(self, halphen):
        with pytest.raises(PolicyInfeasibleError):
            reduce(halphen, BPrimePolicy.cvm())

    def test_explicit_qmt_must_produce_ones(self, euler):
        with pytest.raises(PolicyInfeasibleError):
            reduce(euler, BPrimePolicy.explicit(RatMatrix.identity(3)))

    def test_full_rank_b_tilde_is_not_reducible(self):
        sys = loads("params: a, b\nx' = a*x^2 + b*x^3\n")
        with pytest.raises(NotReducibleError) as info:
            build_qmt(sys)
        assert info.value.witness() == {'rank_B': 1, 'rank_B_tilde': 2}
        assert info.value.exit_code == 2

    def test_wrong_case(self, maxwell_bloch, euler):
        with pytest.raises(WrongCaseError):
            reduce_lambda_zero(maxwell_bloch)
        with pytest.raises(WrongCaseError):
            reduce_case3(euler)


class TestUniformGamma:
    def test_maxwell_bloch_conditions_need_binding(self, maxwell_bloch_x30_zero):
        conditions = gamma_conditions(exp_scale(maxwell_bloch_x30_zero))
        a1 = Coefficient.param('a1')
        assert conditions.satisfiable is Satisfiability.NEEDS_BINDING
        assert conditions.solution == (('a3', a1 * 2), ('a4', a1 * 2))
        assert conditions.to_dict()['equations'] == ["-2*a1 + 2*a3 - a4 = 0", "-2*a1 + a4 = 0"]
        assert conditions.to_dict()['gamma'] == ["a1 - a3", "-a1 + a3 - a4", "-a1 - a3 + a4"]

    def test_full_maxwell_bloch_is_unsatisfiable(self, maxwell_bloch):
        conditions = gamma_conditions(exp_scale(maxwell_bloch))
        assert len(conditions.gamma) == 4
        assert conditions.satisfiable is Satisfiability.NO

    def test_full_maxwell_bloch_is_not_reducible(self, maxwell_bloch):
        with pytest.raises(NotReducibleError) as info:
            reduce(maxwell_bloch)
        assert info.value.witness()['rank_A'] == 3
        assert info.value.witness()['conditions']['satisfiable'] == 'no'

    def test_unbound_maxwell_bloch_raises_conditions(self, maxwell_bloch_x30_zero):
        with pytest.raises(ConditionsUnsatisfiedError):
            reduce_case3(maxwell_bloch_x30_zero)

    def test_bound_maxwell_bloch_with_explicit_qmt(self, maxwell_bloch_x30_zero):
        sys = _bound_maxwell_bloch(maxwell_bloch_x30_zero)
        C = QPFileConnector.read_matrix(fixture_path('maxwell_bloch_qmt.csv'))
        result = reduce(sys, BPrimePolicy.explicit(C, Coefficient.param('a2')))
        assert result.case is CaseLabel.CASE_III
        assert result.method is ReductionMethod.UNIFORM_GAMMA
        assert result.conditions.satisfiable is Satisfiability.YES
        assert result.reduced == loads(MAXWELL_BLOCH_EXPLICIT, normalize=False)
        assert [s['kind'] for s in result.chain.to_dicts()] == ['exp_scaling', 'exp_ntt', 'qmt', 'monomial_ntt']

    def test_single_variable_with_rate(self):
        sys = loads("params: l\nx' = l*x + x^2\n")
        result = reduce(sys)
        assert result.method is ReductionMethod.UNIFORM_GAMMA
        assert result.reduced.m == 0


class TestKernelDecoupling:
    def test_riccati3(self, riccati3):
        result = reduce(riccati3)
        assert result.method is ReductionMethod.KERNEL
        assert result.case is CaseLabel.CASE_III
        assert result.qmt == RatMatrix.from_rows([[1, 0, 0], [1, -1, 0], [1, 0, -1]])
        assert result.constants == (
            "z2 = x1*x2^-1*exp((-l1 + l2)*t)",
            "z3 = x1*x3^-1*exp((-l1 + l3)*t)",
        )
        assert result.reduced.is_decoupled(0)
        assert result.conditions.satisfiable is Satisfiability.NEEDS_BINDING

    def test_riccati5_has_four_constants(self, riccati5):
        result = reduce(riccati5)
        assert len(result.constants) == 4
        assert result.constants[-1] == "z5 = x1*x5^-1*exp((-l1 + l5)*t)"
        assert result.independent == (2, 3, 4, 5)

    def test_full_rank_a(self, maxwell_bloch_x30_zero):
        with pytest.raises(FullRankError):
            kernel_decoupling(exp_scale(maxwell_bloch_x30_zero))

    def test_rank_one_two_variables(self):
        sys = QPSystem(('x1', 'x2'), ((1, 1), (2, 2)), RatMatrix.identity(2))
        result = kernel_decoupling(exp_scale(sys))
        assert result.constants == ('y2 = x1^2*x2^-1',)
        assert result.reduced.is_decoupled(0)

    def test_rank_two_keeps_two_variables_coupled(self):
        A = ((1, 0, 1), (0, 1, 1), (1, 1, 2))
        sys = QPSystem(('x1', 'x2', 'x3'), A, RatMatrix.identity(3), (1, 2, 3))
        result = kernel_decoupling(exp_scale(sys))
        assert result.constants == ('y3 = x1*x2*x3^-1',)
        assert result.independent == (3,)
        assert all(c.is_zero() for c in result.reduced.A[2])
        assert not result.reduced.is_decoupled(0)
        with pytest.raises(NotReducibleError) as info:
            reduce(sys)
        assert info.value.witness()['rank_A'] == 2

    def test_exp_form_renders_and_reads_back(self, riccati3):
        values = {'a1': -1, 'a2': -1, 'a3': -1, 'l1': 1, 'l2': 2, 'l3': 3}
        result = reduce(normalize(substitute_params(riccati3, values)))
        assert loads(render(result.reduced), normalize=False) == result.reduced


@pytest.mark.parametrize('seed', PROPERTY_SEEDS)
def test_completion_decouples_reducible_systems(seed):
    rng = random.Random(seed)
    n = rng.randint(2, 4)
    sys = reducible_system(rng, n, rng.randint(n, 5))
    result = reduce(sys)
    assert all(e == 1 for e in result.b_prime.column(0))
    assert result.reduced.is_decoupled(0)
    assert all(e == 0 for e in result.reduced.B.column(0))
    unit = tuple(Fraction(int(k == 0)) for k in range(n))
    expected = apply_monomial_ntt(apply_qmt(sys, result.qmt, result.reduced.var_names), 1, unit)
    assert result.reduced == expected


@pytest.mark.parametrize('seed', PROPERTY_SEEDS)
def test_cvm_hits_its_target_for_square_systems(seed):
    rng = random.Random(seed)
    n = rng.randint(2, 4)
    sys = reducible_system(rng, n, n)
    result = reduce(sys, BPrimePolicy.cvm())
    target = [[1] + [int(i == j) for j in range(1, n)] for i in range(n)]
    assert result.b_prime == RatMatrix.from_rows(target)


@pytest.mark.parametrize('seed', PROPERTY_SEEDS)
def test_kernel_constants_match_rank_of_a(seed):
    rng = random.Random(seed)
    n = rng.randint(2, 4)
    r = rng.randint(1, n - 1)
    base = random_system(rng, n, rng.randint(n, 5))
    A = random_full_rank(rng, n, r) @ random_full_rank(rng, base.m, r).transpose()
    sys = QPSystem(base.var_names, [A.row(i) for i in range(n)], base.B)
    result = kernel_decoupling(exp_scale(sys))
    assert len(result.constants) == n - rank(A)
    for i in range(rank(A), n):
        assert all(c.is_zero() for c in result.reduced.A[i])


@pytest.mark.parametrize('seed', PROPERTY_SEEDS)
def test_doubling_lambda_doubles_gamma(seed):
    rng = random.Random(seed)
    n = rng.randint(1, 3)
    sys = random_system(rng, n, rng.randint(n, 4), params=['p', 'q'], with_lambda=True)
    doubled = replace(sys, lam=tuple(c * 2 for c in sys.lam))
    single, double = gamma_conditions(exp_scale(sys)), gamma_conditions(exp_scale(doubled))
    assert double.gamma == tuple(g * 2 for g in single.gamma)
    assert double.equations == tuple(eq * 2 for eq in single.equations)
    assert double.satisfiable is single.satisfiable
    assert double.solution == single.solution


@pytest.mark.parametrize('seed', PROPERTY_SEEDS)
def test_completion_exists_exactly_when_ones_are_in_the_column_space(seed):
    rng = random.Random(seed)
    n = rng.randint(2, 4)
    sys = random_system(rng, n, rng.randint(n, 6))
    if rank(augment_ones(sys.B)) == n:
        C, _ = build_qmt(sys)
        assert all(e == 1 for e in (sys.B @ C).column(0))
    else:
        with pytest.raises(NotReducibleError):
            build_qmt(sys)
