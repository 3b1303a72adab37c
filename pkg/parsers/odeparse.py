"""
odeparse: the .qp text language

    # Euler rigid body
    params: a1, a2, a3
    x1' = a1*x2*x3
    x2' = a2*x1*x3
    x3' = a3*x1*x2

Directives: `params:` (required for every symbol that is not a variable),
`vars:` (explicit variable order), `init:` (positive initial state). Right-hand
sides are sums of coefficient * power products; exp(<coef>*t) factors are
allowed so that systems with exponential time factors round-trip.
"""
import logging
import re
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Dict, List, Optional, Sequence, Tuple, Union

import pyparsing as pp

from models.coefficients import ONE, ZERO, Coefficient
from models.qp_system import ExpQPSystem, QPSystem
from parsers import grammar
from services.qp_transforms import canonicalize, normalize as normalize_system
from utils.exceptions import (
    IrrationalExponentError, NonMonomialCoefficientError, NonPositiveStateError,
    OdeSyntaxError, UnknownSymbolError
)
from utils.rational_linalg import RatMatrix, format_rational

logger = logging.getLogger(__name__)

Exponents = Tuple[Tuple[str, Fraction], ...]
TermKey = Tuple[Exponents, Coefficient]

TIME = 't'
DIRECTIVE = re.compile(r"^\s*(params|vars|init)\s*:(.*)$")
EQUATION_START = re.compile(r"^\s*([A-Za-z_][A-Za-z0-9_]*)\s*'")
MAX_EXPANDED_POWER = 64
MAX_NUMERIC_POWER = 1024


@dataclass(frozen=True)
class Term:
    coefficient: Coefficient
    exponents: Exponents = ()
    gamma: Coefficient = ZERO

    def exponent_of(self, name: str) -> Fraction:
        return dict(self.exponents).get(name, Fraction(0))


@dataclass(frozen=True)
class OdeAst:
    variables: Tuple[str, ...]
    parameters: Tuple[str, ...]
    equations: Dict[str, Tuple[Term, ...]] = field(compare=False)
    init: Optional[Tuple[Fraction, ...]] = None

    @property
    def is_exponential(self) -> bool:
        return any(not term.gamma.is_zero() for terms in self.equations.values() for term in terms)


# Term sums ---------------------------------------------------------------

class TermSum:
    """Sum of coefficient * power product * exp(gamma t), keyed by (exponents, gamma)"""

    def __init__(self, terms: Optional[Dict[TermKey, Coefficient]] = None):
        self.terms = {k: v for k, v in (terms or {}).items() if not v.is_zero()}

    @classmethod
    def constant(cls, value) -> 'TermSum':
        return cls({((), ZERO): Coefficient.coerce(value)})

    @classmethod
    def power_product(cls, name: str) -> 'TermSum':
        return cls({(((name, Fraction(1)),), ZERO): ONE})

    def is_single(self) -> bool:
        return len(self.terms) == 1

    def constant_value(self) -> Optional[Fraction]:
        if not self.terms:
            return Fraction(0)
        if len(self.terms) != 1:
            return None
        (key, coef), = self.terms.items()
        if key != ((), ZERO) or not coef.is_constant():
            return None
        return coef.constant_value

    def __add__(self, other: 'TermSum') -> 'TermSum':
        merged = dict(self.terms)
        for key, coef in other.terms.items():
            merged[key] = merged.get(key, ZERO) + coef
        return TermSum(merged)

    def __neg__(self) -> 'TermSum':
        return TermSum({k: -v for k, v in self.terms.items()})

    def __sub__(self, other: 'TermSum') -> 'TermSum':
        return self + (-other)

    def __mul__(self, other: 'TermSum') -> 'TermSum':
        product: Dict[TermKey, Coefficient] = {}
        for (ea, ga), ca in self.terms.items():
            for (eb, gb), cb in other.terms.items():
                key = (_merge_exponents(ea, eb, 1), ga + gb)
                product[key] = product.get(key, ZERO) + ca * cb
        return TermSum(product)

    def power(self, p: Fraction, line: int, col: int) -> 'TermSum':
        """
        Single terms scale their exponents directly; sums are expanded by
        repeated multiplication, up to MAX_EXPANDED_POWER.
        """
        if p == 0:
            return TermSum.constant(1)
        if not self.is_single():
            if p.denominator != 1 or p < 0:
                raise OdeSyntaxError(line, col, "negative or fractional powers apply to a single term only")
            if not self.terms:
                return TermSum()
            if p > MAX_EXPANDED_POWER:
                raise OdeSyntaxError(line, col, f"powers of sums up to {MAX_EXPANDED_POWER}")
            result = TermSum.constant(1)
            for _ in range(int(p)):
                result = result * self
            return result
        ((exps, gamma), coef), = self.terms.items()
        if p.denominator != 1:
            if coef != ONE:
                raise OdeSyntaxError(line, col, "fractional powers apply to power products with coefficient 1")
            new_coef = ONE
        else:
            if not coef.is_monomial() and p > MAX_EXPANDED_POWER:
                raise OdeSyntaxError(line, col, f"powers of coefficient sums up to {MAX_EXPANDED_POWER}")
            if abs(p) > MAX_NUMERIC_POWER and any(abs(w) != 1 for _, w in coef.terms):
                raise OdeSyntaxError(line, col, f"powers of numeric factors up to {MAX_NUMERIC_POWER}")
            try:
                new_coef = coef ** int(p)
            except NonMonomialCoefficientError as exc:
                raise OdeSyntaxError(line, col, str(exc)) from exc
        return TermSum({(_merge_exponents((), exps, p), gamma * p): new_coef})


def _merge_exponents(left: Exponents, right: Exponents, scale: Fraction) -> Exponents:
    merged = dict(left)
    for name, e in right:
        merged[name] = merged.get(name, Fraction(0)) + e * scale
    return tuple(sorted((k, v) for k, v in merged.items() if v != 0))


# Evaluation --------------------------------------------------------------

@dataclass
class _Scope:
    variables: Tuple[str, ...]
    parameters: Tuple[str, ...]
    line: int
    allow_time: bool = False


def _evaluate(node, scope: _Scope) -> TermSum:
    col = node.loc + 1
    if isinstance(node, grammar.Number):
        return TermSum.constant(node.value)
    if isinstance(node, grammar.Symbol):
        if node.name in scope.variables:
            return TermSum.power_product(node.name)
        if node.name in scope.parameters:
            return TermSum.constant(Coefficient.param(node.name))
        if node.name == TIME and scope.allow_time:
            return TermSum.power_product(TIME)
        raise UnknownSymbolError(node.name, scope.line, col)
    if isinstance(node, grammar.ExpCall):
        if scope.allow_time:
            raise OdeSyntaxError(scope.line, col, "exp() cannot be nested")
        inner = _evaluate(node.argument, _Scope(scope.variables, scope.parameters, scope.line, True))
        gamma = ZERO
        for (exps, g), coef in inner.terms.items():
            if exps != ((TIME, Fraction(1)),) or not g.is_zero():
                raise OdeSyntaxError(scope.line, col, "exp() argument of the form <coefficient>*t")
            gamma = gamma + coef
        return TermSum({((), gamma): ONE})
    if isinstance(node, grammar.Negate):
        return -_evaluate(node.operand, scope)
    if isinstance(node, grammar.BinaryOp):
        if node.op == '^':
            if node.right.contains_symbol():
                raise IrrationalExponentError(str(node.right), scope.line, node.right.loc + 1)
            exponent = _evaluate(node.right, scope).constant_value()
            return _evaluate(node.left, scope).power(exponent, scope.line, col)
        left = _evaluate(node.left, scope)
        right = _evaluate(node.right, scope)
        if node.op == '+':
            return left + right
        if node.op == '-':
            return left - right
        if node.op == '*':
            return left * right
        if not right.terms:
            raise OdeSyntaxError(scope.line, col, "nonzero divisor")
        if not right.is_single():
            raise OdeSyntaxError(scope.line, col, "division by a single term")
        return left * right.power(Fraction(-1), scope.line, col)
    raise OdeSyntaxError(scope.line, col, f"expression, got {node!r}")


def _to_terms(total: TermSum) -> Tuple[Term, ...]:
    terms = [Term(coef, exps, gamma) for (exps, gamma), coef in total.terms.items()]
    return tuple(sorted(terms, key=lambda t: (t.exponents, t.gamma.sort_key())))


# Parsing -----------------------------------------------------------------

def _strip_comment(line: str) -> str:
    return line.split('#', 1)[0].rstrip()


def _names(body: str, line_no: int, offset: int) -> Tuple[str, ...]:
    names = []
    for chunk in body.rstrip().rstrip(';').split(','):
        name = chunk.strip()
        if not name:
            continue
        if not re.fullmatch(r"[A-Za-z_][A-Za-z0-9_]*", name):
            raise OdeSyntaxError(line_no, offset + body.find(chunk) + 1, f"identifier, got '{name}'")
        if name in grammar.RESERVED:
            raise OdeSyntaxError(line_no, offset + body.find(chunk) + 1, f"'{name}' is reserved")
        names.append(name)
    return tuple(names)


def _syntax_error(exc: pp.ParseBaseException, line_no: int, offset: int = 0) -> OdeSyntaxError:
    return OdeSyntaxError(line_no, exc.col + offset, exc.msg)


def parse(text: str) -> OdeAst:
    """Parse .qp text into an OdeAst; errors carry 1-based line and column"""
    params: List[str] = []
    declared_vars: Optional[Tuple[str, ...]] = None
    init_lines: List[Tuple[int, int, str]] = []
    equation_lines: List[Tuple[int, str, str]] = []

    for line_no, raw in enumerate(text.splitlines(), start=1):
        line = _strip_comment(raw)
        if not line.strip():
            continue
        directive = DIRECTIVE.match(line)
        if directive:
            kind, body = directive.group(1), directive.group(2)
            offset = directive.start(2)
            if kind == 'params':
                params.extend(_names(body, line_no, offset))
            elif kind == 'vars':
                if declared_vars is not None:
                    raise OdeSyntaxError(line_no, 1, "a single vars: directive")
                declared_vars = _names(body, line_no, offset)
            else:
                init_lines.append((line_no, offset, body))
            continue
        start = EQUATION_START.match(line)
        if not start:
            raise OdeSyntaxError(line_no, len(line) - len(line.lstrip()) + 1,
                                 "an equation x' = ... or a params:/vars:/init: directive")
        equation_lines.append((line_no, start.group(1), line))

    lhs_order = []
    for line_no, name, line in equation_lines:
        if name in lhs_order:
            raise OdeSyntaxError(line_no, line.find(name) + 1, f"a single equation for {name}")
        if name in grammar.RESERVED:
            raise OdeSyntaxError(line_no, line.find(name) + 1, f"'{name}' is reserved")
        lhs_order.append(name)

    variables = declared_vars if declared_vars is not None else tuple(lhs_order)
    for line_no, name, line in equation_lines:
        if name not in variables:
            raise UnknownSymbolError(name, line_no, line.find(name) + 1)
    clash = set(variables) & set(params)
    if clash:
        raise OdeSyntaxError(1, 1, f"names used both as variable and parameter: {sorted(clash)}")
    if len(set(params)) != len(params):
        raise OdeSyntaxError(1, 1, "each parameter declared once")

    equations: Dict[str, Tuple[Term, ...]] = {name: () for name in variables}
    scope_params = tuple(params)
    for line_no, name, line in equation_lines:
        try:
            _, rhs = grammar.parse_equation(line)
        except pp.ParseBaseException as exc:
            raise _syntax_error(exc, line_no) from exc
        equations[name] = _to_terms(_evaluate(rhs, _Scope(variables, scope_params, line_no)))

    init = _parse_init(init_lines, variables, scope_params) if init_lines else None
    ast = OdeAst(variables, scope_params, equations, init)
    logger.debug("parsed %d equations over %d parameters", len(variables), len(params))
    return ast


def _parse_init(lines, variables: Tuple[str, ...], params: Tuple[str, ...]) -> Tuple[Fraction, ...]:
    values: Dict[str, Fraction] = {}
    for line_no, offset, body in lines:
        for chunk in body.rstrip().rstrip(';').split(','):
            if not chunk.strip():
                continue
            col = offset + body.find(chunk) + 1
            try:
                result = grammar.ASSIGNMENT.parse_string(chunk, parse_all=True)
            except pp.ParseBaseException as exc:
                raise _syntax_error(exc, line_no, offset + body.find(chunk)) from exc
            name = result['name']
            if name not in variables:
                raise UnknownSymbolError(name, line_no, col)
            value = _evaluate(result['value'], _Scope((), (), line_no)).constant_value()
            if value is None:
                raise OdeSyntaxError(line_no, col, "a rational initial value")
            values[name] = value
    missing = [v for v in variables if v not in values]
    if missing:
        raise OdeSyntaxError(lines[-1][0], 1, f"initial values for {', '.join(missing)}")
    state = tuple(values[v] for v in variables)
    if any(v <= 0 for v in state):
        raise NonPositiveStateError([float(v) for v in state], lines[0][0], 1)
    return state


# Lowering ----------------------------------------------------------------

def lower(ast: OdeAst, normalize: bool = True) -> Union[QPSystem, ExpQPSystem]:
    """
    Divide equation i by x_i: constant quotients go to lambda_i, every other
    quotient becomes a quasimonomial row of B.

    Args:
        ast: parsed system
        normalize: apply the rank checks; reduced systems are read with False

    Returns:
        QPSystem, or ExpQPSystem when some term carries an exp(gamma t) factor
    """
    n = len(ast.variables)
    exponential = ast.is_exponential
    lam = [ZERO] * n
    columns: Dict[Tuple[Tuple[Fraction, ...], Coefficient], List[Coefficient]] = {}
    for i, name in enumerate(ast.variables):
        for term in ast.equations[name]:
            row = [term.exponent_of(v) for v in ast.variables]
            row[i] -= 1
            key = (tuple(row), term.gamma)
            if not exponential and all(e == 0 for e in row):
                lam[i] = lam[i] + term.coefficient
                continue
            column = columns.setdefault(key, [ZERO] * n)
            column[i] = column[i] + term.coefficient
    keys = list(columns)
    A = tuple(tuple(columns[k][i] for k in keys) for i in range(n))
    B = RatMatrix.from_rows([k[0] for k in keys], n)
    if exponential:
        return canonicalize(ExpQPSystem(ast.variables, A, B, gamma=tuple(k[1] for k in keys)))
    system = QPSystem(ast.variables, A, B, tuple(lam))
    return normalize_system(system) if normalize else canonicalize(system)


def loads(text: str, normalize: bool = True) -> Union[QPSystem, ExpQPSystem]:
    return lower(parse(text), normalize=normalize)


def parse_coefficient(text: str, parameters: Sequence[str] = ()) -> Coefficient:
    """A variable-free expression such as "3/2", "2*a1" or "a1 - a3" as a Coefficient"""
    try:
        node = grammar.parse_expression(text)
    except pp.ParseBaseException as exc:
        raise _syntax_error(exc, 1) from exc
    total = _evaluate(node, _Scope((), tuple(parameters), 1))
    if not total.terms:
        return ZERO
    coef = total.terms.get(((), ZERO))
    if coef is None or not total.is_single():
        raise OdeSyntaxError(1, 1, f"a coefficient expression, got '{text}'")
    return coef


# Rendering ---------------------------------------------------------------

def _exponent_text(e: Fraction) -> str:
    if e.denominator == 1:
        return str(e)
    return f"({format_rational(e)})"


def render_monomial(names: Sequence[str], exponents: Sequence[Fraction]) -> str:
    factors = []
    for name, e in zip(names, exponents):
        if e == 0:
            continue
        factors.append(name if e == 1 else f"{name}^{_exponent_text(e)}")
    return '*'.join(factors)


def _time_factor(gamma: Coefficient) -> str:
    if gamma.is_zero():
        return ''
    if gamma == ONE:
        return 'exp(t)'
    if gamma.is_monomial():
        return f"exp({gamma}*t)"
    return f"exp(({gamma})*t)"


def _signed_term(coef: Coefficient, factors: List[str]) -> Tuple[bool, str]:
    """(negative, text) of coef * factors"""
    factors = [f for f in factors if f]
    if coef.is_monomial():
        (_, weight), = coef.terms
        negative = weight < 0
        magnitude = -coef if negative else coef
        if magnitude == ONE and factors:
            return negative, '*'.join(factors)
        return negative, '*'.join([str(magnitude)] + factors)
    return False, '*'.join([f"({coef})"] + factors)


def _join(parts: List[Tuple[bool, str]]) -> str:
    if not parts:
        return '0'
    text = ''
    for k, (negative, body) in enumerate(parts):
        if k == 0:
            text = f"-{body}" if negative else body
        else:
            text += f" - {body}" if negative else f" + {body}"
    return text


def _equation_parts(sys: Union[QPSystem, ExpQPSystem], i: int, multiply: bool) -> List[Tuple[bool, str]]:
    parts = []
    lam = sys.lam[i] if isinstance(sys, QPSystem) else ZERO
    if not lam.is_zero():
        parts.append(_signed_term(lam, [sys.var_names[i] if multiply else '']))
    for j in range(sys.m):
        coef = sys.A[i][j]
        if coef.is_zero():
            continue
        exps = list(sys.B.row(j))
        if multiply:
            exps[i] += 1
        gamma = sys.gamma[j] if isinstance(sys, ExpQPSystem) else ZERO
        parts.append(_signed_term(coef, [render_monomial(sys.var_names, exps), _time_factor(gamma)]))
    return parts


def render_bracket(sys: Union[QPSystem, ExpQPSystem], i: int) -> str:
    """Right-hand side of equation i divided by its own variable"""
    return _join(_equation_parts(sys, i, multiply=False))


def render_equation(sys: Union[QPSystem, ExpQPSystem], i: int) -> str:
    return f"{sys.var_names[i]}' = {_join(_equation_parts(sys, i, multiply=True))}"


def render(sys: Union[QPSystem, ExpQPSystem], init: Optional[Sequence[Fraction]] = None) -> str:
    """Canonical text: lower(parse(render(sys))) reproduces sys"""
    lines = []
    if sys.params:
        lines.append(f"params: {', '.join(sorted(sys.params))}")
    lines.append(f"vars: {', '.join(sys.var_names)}")
    if init is not None:
        lines.append('init: ' + ', '.join(f"{name} = {format_rational(Fraction(v))}"
                                          for name, v in zip(sys.var_names, init)))
    for i in range(sys.n):
        if _equation_parts(sys, i, multiply=True):
            lines.append(render_equation(sys, i))
    return '\n'.join(lines) + '\n'
