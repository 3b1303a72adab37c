import random
from fractions import Fraction

import pytest

from conftest import PROPERTY_SEEDS, fixture_text, random_system
from models.coefficients import Coefficient
from models.qp_system import ExpQPSystem, QPSystem
from parsers.odeparse import loads, parse, parse_coefficient, render
from services.qp_transforms import canonicalize
from utils.exceptions import (
    EmptySystemError, IrrationalExponentError, NonMaximalRankError, NonPositiveStateError,
    OdeSyntaxError, UnknownSymbolError
)
from utils.rational_linalg import RatMatrix

F = Fraction
a = {name: Coefficient.param(name) for name in ('a1', 'a2', 'a3', 'a4', 'x30')}


class TestLowering:
    def test_euler_matrices(self, euler):
        assert euler.var_names == ('x1', 'x2', 'x3')
        assert euler.B == RatMatrix.from_rows([[-1, 1, 1], [1, -1, 1], [1, 1, -1]])
        assert euler.A == ((a['a1'], Coefficient(), Coefficient()),
                           (Coefficient(), a['a2'], Coefficient()),
                           (Coefficient(), Coefficient(), a['a3']))
        assert euler.lambda_is_zero

    def test_halphen_has_six_quasimonomials(self, halphen):
        assert (halphen.n, halphen.m) == (3, 6)
        assert halphen.params == frozenset()

    def test_maxwell_bloch_constant_term_is_a_quasimonomial(self, maxwell_bloch):
        assert maxwell_bloch.m == 4
        assert maxwell_bloch.lam == (-a['a1'], -a['a3'], -a['a4'])
        row = [j for j in range(maxwell_bloch.m) if maxwell_bloch.B.row(j) == (0, 0, -1)][0]
        assert maxwell_bloch.a_column(row) == (Coefficient(), Coefficient(), a['a4'] * a['x30'])

    def test_init_directive(self):
        ast = parse(fixture_text('halphen.qp'))
        assert ast.init == (F(1, 10), F(1, 5), F(3, 10))

    def test_exp_factors_lower_to_exp_system(self):
        sys = loads("vars: y1, y2\ny1' = y1*y2*exp(2*t)\ny2' = -y2^2*exp(2*t)\n")
        assert isinstance(sys, ExpQPSystem)
        assert sys.gamma == (Coefficient.constant(2),)

    def test_sums_and_quotients_expand(self):
        sys = loads("params: k\nx' = (x + y)^2/y\ny' = k*y\n", normalize=False)
        assert sys.m == 2
        assert sys.lam == (Coefficient.constant(2), Coefficient.param('k'))

    def test_fractional_exponent(self):
        sys = loads("x' = x^(1/2)*y\ny' = y*x^-1\n")
        assert sorted(sys.B.row(j) for j in range(sys.m)) == [(F(-1), F(0)), (F(-1, 2), F(1))]

    def test_large_powers_of_single_terms_are_direct(self):
        sys = loads("params: k\nx' = k^3000*x^50000000\n")
        assert sys.B == RatMatrix.from_rows([[49_999_999]])
        assert sys.A == ((Coefficient.param('k') ** 3000,),)

    def test_power_limits(self):
        assert loads("x' = (x + 1)^3*x\n", normalize=False).m == 3
        with pytest.raises(OdeSyntaxError):
            loads("x' = (x + 1)^100000000*x\n")
        with pytest.raises(OdeSyntaxError):
            loads("x' = 2^5000*x^2\n")
        assert loads("x' = (-1)^5001*x^2\n").A == ((Coefficient.constant(-1),),)


class TestErrors:
    def test_unknown_symbol_position(self):
        with pytest.raises(UnknownSymbolError) as info:
            parse("x' = b*x\n")
        assert (info.value.line, info.value.col) == (1, 6)

    def test_syntax_error_has_line(self):
        with pytest.raises(OdeSyntaxError) as info:
            parse("params: a\nx' = a*x +\n")
        assert info.value.line == 2

    def test_symbolic_exponent(self):
        with pytest.raises(IrrationalExponentError):
            parse("params: p\nx' = x^p\n")

    def test_time_outside_exp(self):
        with pytest.raises(UnknownSymbolError):
            parse("x' = t*x\n")

    def test_nonpositive_init(self):
        with pytest.raises(NonPositiveStateError):
            parse("x' = x^2\ninit: x = 0\n")

    def test_duplicate_equation(self):
        with pytest.raises(OdeSyntaxError):
            parse("x' = x\nx' = x^2\n")

    def test_normalize_rejects_redundant_systems(self):
        with pytest.raises(NonMaximalRankError) as info:
            loads("x' = x*y\ny' = y^2\n")
        assert info.value.rank == 1

    def test_empty_system(self):
        with pytest.raises(EmptySystemError):
            loads("x' = 0\n")


class TestCoefficientExpressions:
    def test_rational(self):
        assert parse_coefficient("3/2") == Coefficient.constant(F(3, 2))

    def test_parametric(self):
        assert parse_coefficient("2*a1 - a3", ['a1', 'a3']) == a['a1'] * 2 - Coefficient.param('a3')

    def test_rejects_variables(self):
        with pytest.raises(UnknownSymbolError):
            parse_coefficient("x1", ['a1'])


class TestRender:
    def test_euler_text(self, euler):
        assert render(euler) == (
            "params: a1, a2, a3\n"
            "vars: x1, x2, x3\n"
            "x1' = a1*x2*x3\n"
            "x2' = a2*x1*x3\n"
            "x3' = a3*x1*x2\n"
        )

    def test_fixture_round_trip(self, maxwell_bloch, riccati3):
        for sys in (maxwell_bloch, riccati3):
            assert loads(render(sys)) == sys


@pytest.mark.parametrize('seed', PROPERTY_SEEDS)
def test_lower_parse_render_is_identity(seed):
    rng = random.Random(seed)
    n = rng.randint(1, 4)
    m = rng.randint(n, 6)
    sys = random_system(rng, n, m, params=['p', 'q'], with_lambda=rng.random() < 0.5)
    expected = canonicalize(sys)
    again = loads(render(expected), normalize=False)
    assert isinstance(again, QPSystem)
    assert again == expected
