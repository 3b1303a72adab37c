"""
Expression grammar for right-hand sides of .qp files

    expr     :: sum
    sum      :: product [('+' | '-') product]*
    product  :: signed [('*' | '/') signed]*
    signed   :: ['-' | '+'] power
    power    :: operand ['^' power]
    operand  :: number | 'exp' '(' expr ')' | identifier | '(' expr ')'

`^` binds tighter than unary minus, so -x^2 is -(x^2). Numbers may carry a
sign so that exponents like x^-1 read naturally.
"""
from dataclasses import dataclass
from fractions import Fraction
from typing import Any

import pyparsing as pp

pp.ParserElement.enable_packrat()


class Node:
    loc: int

    def contains_symbol(self) -> bool:
        return False


@dataclass(frozen=True)
class Number(Node):
    value: Fraction
    loc: int

    def __str__(self) -> str:
        return str(self.value)


@dataclass(frozen=True)
class Symbol(Node):
    name: str
    loc: int

    def contains_symbol(self) -> bool:
        return True

    def __str__(self) -> str:
        return self.name


@dataclass(frozen=True)
class ExpCall(Node):
    argument: Any
    loc: int

    def contains_symbol(self) -> bool:
        return True

    def __str__(self) -> str:
        return f"exp({self.argument})"


@dataclass(frozen=True)
class Negate(Node):
    operand: Any
    loc: int

    def contains_symbol(self) -> bool:
        return self.operand.contains_symbol()

    def __str__(self) -> str:
        return f"-{self.operand}"


@dataclass(frozen=True)
class BinaryOp(Node):
    op: str
    left: Any
    right: Any
    loc: int

    def contains_symbol(self) -> bool:
        return self.left.contains_symbol() or self.right.contains_symbol()

    def __str__(self) -> str:
        return f"({self.left}{self.op}{self.right})"


def _number(s, loc, toks):
    return Number(Fraction(toks[0]), loc)


def _symbol(s, loc, toks):
    return Symbol(toks[0], loc)


def _exp_call(s, loc, toks):
    return ExpCall(toks[1], loc)


def _power(s, loc, toks):
    operands = list(toks[0])[0::2]
    node = operands[-1]
    for base in reversed(operands[:-1]):
        node = BinaryOp('^', base, node, base.loc)
    return node


def _signed(s, loc, toks):
    items = list(toks[0])
    node = items[-1]
    for op in reversed(items[:-1]):
        if op == '-':
            node = Negate(node, loc)
    return node


def _left_assoc(s, loc, toks):
    items = list(toks[0])
    node = items[0]
    for op, rhs in zip(items[1::2], items[2::2]):
        node = BinaryOp(op, node, rhs, rhs.loc)
    return node


IDENTIFIER = pp.Regex(r"[A-Za-z_][A-Za-z0-9_]*")
NUMBER = pp.Regex(r"-?(?:\d+(?:\.\d+)?|\.\d+)(?:[eE][-+]?\d+)?")
RESERVED = frozenset({'t', 'exp'})


def build_expression() -> pp.ParserElement:
    expr = pp.Forward()
    exp_call = (pp.Keyword('exp') + pp.Suppress('(') + expr + pp.Suppress(')')).set_parse_action(_exp_call)
    operand = exp_call | NUMBER.copy().set_parse_action(_number) | IDENTIFIER.copy().set_parse_action(_symbol)
    expr <<= pp.infix_notation(operand, [
        (pp.Literal('^'), 2, pp.OpAssoc.RIGHT, _power),
        (pp.one_of('+ -'), 1, pp.OpAssoc.RIGHT, _signed),
        (pp.one_of('* /'), 2, pp.OpAssoc.LEFT, _left_assoc),
        (pp.one_of('+ -'), 2, pp.OpAssoc.LEFT, _left_assoc),
    ])
    return expr


EXPRESSION = build_expression()
EQUATION = (
    IDENTIFIER('lhs') + pp.Suppress("'") + pp.Suppress('=') + EXPRESSION('rhs')
)
ASSIGNMENT = IDENTIFIER('name') + pp.Suppress('=') + EXPRESSION('value')


def parse_expression(text: str) -> Node:
    """Parse a full expression; raises pyparsing.ParseException"""
    return EXPRESSION.parse_string(text, parse_all=True)[0]


def parse_equation(text: str):
    """(lhs name, rhs node) of an `x' = expr` line; raises pyparsing.ParseException"""
    result = EQUATION.parse_string(text, parse_all=True)
    return result['lhs'], result['rhs']
