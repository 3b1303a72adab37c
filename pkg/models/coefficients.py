"""
Parametric coefficients
A Coefficient is a rational-weighted sum of parameter atoms; an atom is a
formal product of named parameters with integer powers (the empty atom is 1).
"""
from dataclasses import dataclass
from fractions import Fraction
from typing import Dict, FrozenSet, Mapping, Tuple, Union

from utils.exceptions import NonMonomialCoefficientError, UnboundParameterError
from utils.rational_linalg import format_rational, to_rational

Atom = Tuple[Tuple[str, int], ...]
ONE_ATOM: Atom = ()


def atom_mul(a: Atom, b: Atom) -> Atom:
    powers: Dict[str, int] = dict(a)
    for name, p in b:
        powers[name] = powers.get(name, 0) + p
    return tuple(sorted((k, v) for k, v in powers.items() if v != 0))


def atom_pow(a: Atom, k: int) -> Atom:
    if k == 0:
        return ONE_ATOM
    return tuple((name, p * k) for name, p in a)


def atom_to_str(atom: Atom) -> str:
    return '*'.join(name if p == 1 else f"{name}^{p}" for name, p in atom)


@dataclass(frozen=True)
class Coefficient:
    """Immutable sum of weighted parameter atoms, no zero weights stored"""
    terms: Tuple[Tuple[Atom, Fraction], ...] = ()

    @classmethod
    def from_mapping(cls, mapping: Mapping[Atom, Fraction]) -> 'Coefficient':
        return cls(tuple(sorted((a, Fraction(w)) for a, w in mapping.items() if w != 0)))

    @classmethod
    def constant(cls, value) -> 'Coefficient':
        return cls.from_mapping({ONE_ATOM: to_rational(value)})

    @classmethod
    def zero(cls) -> 'Coefficient':
        return cls()

    @classmethod
    def param(cls, name: str, power: int = 1) -> 'Coefficient':
        if power == 0:
            return cls.constant(1)
        atom: Atom = ((name, power),)
        return cls(((atom, Fraction(1)),))

    @classmethod
    def coerce(cls, value: Union['Coefficient', int, Fraction, str]) -> 'Coefficient':
        if isinstance(value, Coefficient):
            return value
        return cls.constant(value)

    # Predicates -----------------------------------------------------------

    def is_zero(self) -> bool:
        return not self.terms

    def is_constant(self) -> bool:
        return all(atom == ONE_ATOM for atom, _ in self.terms)

    def is_monomial(self) -> bool:
        return len(self.terms) == 1

    @property
    def constant_value(self) -> Fraction:
        """Numeric value; only valid when is_constant()"""
        if not self.is_constant():
            raise UnboundParameterError(sorted(self.params)[0])
        return self.terms[0][1] if self.terms else Fraction(0)

    @property
    def params(self) -> FrozenSet[str]:
        return frozenset(name for atom, _ in self.terms for name, _ in atom)

    def as_dict(self) -> Dict[Atom, Fraction]:
        return dict(self.terms)

    def sort_key(self):
        return self.terms

    # Arithmetic -----------------------------------------------------------

    def __add__(self, other) -> 'Coefficient':
        other = Coefficient.coerce(other)
        merged = self.as_dict()
        for atom, w in other.terms:
            merged[atom] = merged.get(atom, Fraction(0)) + w
        return Coefficient.from_mapping(merged)

    __radd__ = __add__

    def __neg__(self) -> 'Coefficient':
        return Coefficient(tuple((a, -w) for a, w in self.terms))

    def __sub__(self, other) -> 'Coefficient':
        return self + (-Coefficient.coerce(other))

    def __rsub__(self, other) -> 'Coefficient':
        return Coefficient.coerce(other) - self

    def __mul__(self, other) -> 'Coefficient':
        other = Coefficient.coerce(other)
        product: Dict[Atom, Fraction] = {}
        for a, wa in self.terms:
            for b, wb in other.terms:
                atom = atom_mul(a, b)
                product[atom] = product.get(atom, Fraction(0)) + wa * wb
        return Coefficient.from_mapping(product)

    __rmul__ = __mul__

    def __pow__(self, k: int) -> 'Coefficient':
        if k == 0:
            return Coefficient.constant(1)
        if self.is_monomial():
            (atom, w), = self.terms
            return Coefficient(((atom_pow(atom, k), w ** k),))
        if k < 0:
            raise NonMonomialCoefficientError(str(self))
        result = Coefficient.constant(1)
        for _ in range(k):
            result = result * self
        return result

    def __truediv__(self, other) -> 'Coefficient':
        other = Coefficient.coerce(other)
        if other.is_zero():
            raise ZeroDivisionError("division by a zero coefficient")
        return self * (other ** -1)

    # Evaluation -----------------------------------------------------------

    def substitute(self, assignments: Mapping[str, 'Coefficient']) -> 'Coefficient':
        """Replace bound parameters by coefficients, leaving the rest symbolic"""
        if not assignments or not (self.params & set(assignments)):
            return self
        result = Coefficient.zero()
        for atom, w in self.terms:
            term = Coefficient.constant(w)
            for name, p in atom:
                value = Coefficient.coerce(assignments[name]) if name in assignments \
                    else Coefficient.param(name)
                term = term * (value ** p)
            result = result + term
        return result

    def evaluate(self, assignments: Mapping[str, Fraction] = None) -> Fraction:
        assignments = assignments or {}
        missing = sorted(self.params - set(assignments))
        if missing:
            raise UnboundParameterError(missing[0])
        total = Fraction(0)
        for atom, w in self.terms:
            value = w
            for name, p in atom:
                value *= to_rational(assignments[name]) ** p
            total += value
        return total

    def __float__(self) -> float:
        return float(self.constant_value)

    def __str__(self) -> str:
        if not self.terms:
            return '0'
        parts = []
        for atom, w in self.terms:
            magnitude = abs(w)
            if atom == ONE_ATOM:
                text = format_rational(magnitude)
            elif magnitude == 1:
                text = atom_to_str(atom)
            else:
                text = f"{format_rational(magnitude)}*{atom_to_str(atom)}"
            if not parts:
                parts.append(f"-{text}" if w < 0 else text)
            else:
                parts.append(f"{'-' if w < 0 else '+'} {text}")
        return ' '.join(parts)


ZERO = Coefficient.zero()
ONE = Coefficient.constant(1)
