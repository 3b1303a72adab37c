"""
Transformation steps and chains
A chain records the composite of the substitutions applied to a QP system
and maps states (and time) between the original and the transformed
coordinates. Numeric maps live on the positive orthant.
"""
from dataclasses import dataclass, field
from enum import Enum
from fractions import Fraction
from functools import cached_property
from typing import Any, Dict, Mapping, Optional, Sequence, Tuple, Union

import numpy as np

from models.coefficients import Coefficient
from utils.exceptions import NonPositiveStateError
from utils.rational_linalg import RatMatrix, format_rational, invert


class Direction(str, Enum):
    FORWARD = 'forward'
    INVERSE = 'inverse'


def _values(coefs: Sequence[Coefficient]) -> np.ndarray:
    return np.array([float(c) for c in coefs], dtype=float)


@dataclass(frozen=True)
class Qmt:
    """x_i = prod_k y_k^C_ik"""
    matrix: RatMatrix
    kind: str = field(default='qmt', init=False)

    @cached_property
    def inverse_matrix(self) -> RatMatrix:
        return invert(self.matrix)

    @cached_property
    def _c(self) -> np.ndarray:
        return self.matrix.to_float()

    @cached_property
    def _c_inv(self) -> np.ndarray:
        return self.inverse_matrix.to_float()

    def forward(self, state: np.ndarray, t: float) -> np.ndarray:
        return np.exp(self._c_inv @ np.log(state))

    def inverse(self, state: np.ndarray, t: float) -> np.ndarray:
        return np.exp(self._c @ np.log(state))

    def push_log_derivative(self, dlog: np.ndarray, t: float) -> np.ndarray:
        return self._c_inv @ dlog

    def substitute(self, assignments: Mapping[str, Coefficient]) -> 'Qmt':
        return self

    def to_dict(self) -> Dict[str, Any]:
        return {'kind': self.kind, 'C': self.matrix.to_strings()}


@dataclass(frozen=True)
class MonomialNtt:
    """d tau = prefactor * prod_k x_k^beta_k dt"""
    prefactor: Coefficient
    beta: Tuple[Fraction, ...]
    kind: str = field(default='monomial_ntt', init=False)

    def forward(self, state: np.ndarray, t: float) -> np.ndarray:
        return state

    inverse = forward

    def rate(self, state: np.ndarray, t: float) -> float:
        beta = np.array([float(b) for b in self.beta])
        return float(self.prefactor) * float(np.prod(np.power(state, beta)))

    def push_log_derivative(self, dlog: np.ndarray, t: float) -> np.ndarray:
        return dlog

    def substitute(self, assignments: Mapping[str, Coefficient]) -> 'MonomialNtt':
        return MonomialNtt(self.prefactor.substitute(assignments), self.beta)

    def to_dict(self) -> Dict[str, Any]:
        return {
            'kind': self.kind,
            'prefactor': str(self.prefactor),
            'beta': [format_rational(b) for b in self.beta],
        }


@dataclass(frozen=True)
class ExpScaling:
    """y_i = exp(-lambda_i t) x_i"""
    lam: Tuple[Coefficient, ...]
    kind: str = field(default='exp_scaling', init=False)

    def forward(self, state: np.ndarray, t: float) -> np.ndarray:
        return state * np.exp(-_values(self.lam) * t)

    def inverse(self, state: np.ndarray, t: float) -> np.ndarray:
        return state * np.exp(_values(self.lam) * t)

    def push_log_derivative(self, dlog: np.ndarray, t: float) -> np.ndarray:
        return dlog - _values(self.lam)

    def substitute(self, assignments: Mapping[str, Coefficient]) -> 'ExpScaling':
        return ExpScaling(tuple(c.substitute(assignments) for c in self.lam))

    def to_dict(self) -> Dict[str, Any]:
        return {'kind': self.kind, 'lambda': [str(c) for c in self.lam]}


@dataclass(frozen=True)
class ExpNtt:
    """d tau = exp(gamma t) dt"""
    gamma: Coefficient
    kind: str = field(default='exp_ntt', init=False)

    def forward(self, state: np.ndarray, t: float) -> np.ndarray:
        return state

    inverse = forward

    def rate(self, state: np.ndarray, t: float) -> float:
        return float(np.exp(float(self.gamma) * t))

    def push_log_derivative(self, dlog: np.ndarray, t: float) -> np.ndarray:
        return dlog

    def substitute(self, assignments: Mapping[str, Coefficient]) -> 'ExpNtt':
        return ExpNtt(self.gamma.substitute(assignments))

    def to_dict(self) -> Dict[str, Any]:
        return {'kind': self.kind, 'gamma': str(self.gamma)}


TransformStep = Union[Qmt, MonomialNtt, ExpScaling, ExpNtt]
TIME_STEPS = (MonomialNtt, ExpNtt)


def check_positive(state: Sequence[float]) -> np.ndarray:
    state = np.asarray(state, dtype=float)
    if not np.all(np.isfinite(state)) or np.any(state <= 0):
        raise NonPositiveStateError([float(v) for v in state])
    return state


@dataclass(frozen=True)
class TransformChain:
    steps: Tuple[TransformStep, ...] = ()

    def then(self, *steps: TransformStep) -> 'TransformChain':
        return TransformChain(self.steps + tuple(steps))

    def __add__(self, other: 'TransformChain') -> 'TransformChain':
        return TransformChain(self.steps + other.steps)

    def __len__(self) -> int:
        return len(self.steps)

    def substitute(self, assignments: Mapping[str, Coefficient]) -> 'TransformChain':
        return TransformChain(tuple(s.substitute(assignments) for s in self.steps))

    @property
    def has_state_dependent_time(self) -> bool:
        return any(isinstance(s, MonomialNtt) for s in self.steps)

    def forward(self, state: Sequence[float], t: float) -> np.ndarray:
        current = check_positive(state)
        for step in self.steps:
            current = step.forward(current, t)
        return current

    def inverse(self, state: Sequence[float], t: float) -> np.ndarray:
        current = check_positive(state)
        for step in reversed(self.steps):
            current = step.inverse(current, t)
        return current

    def time_rate(self, state: Sequence[float], t: float) -> float:
        """d tau / dt at base time t, chain rule over every new-time step"""
        current = check_positive(state)
        rate = 1.0
        for step in self.steps:
            if isinstance(step, TIME_STEPS):
                rate *= step.rate(current, t)
            current = step.forward(current, t)
        return rate

    def closed_form_time(self, t: float) -> Optional[float]:
        """tau(t) when no step depends on the state, else None"""
        if self.has_state_dependent_time:
            return None
        gamma = sum(float(s.gamma) for s in self.steps if isinstance(s, ExpNtt))
        if gamma == 0.0:
            return float(t)
        return float(np.expm1(gamma * t) / gamma)

    def push_log_derivative(self, dlog: Sequence[float], t: float) -> np.ndarray:
        """Map d(log x)/dt of the original state to d(log y)/dt of the final state"""
        current = np.asarray(dlog, dtype=float)
        for step in self.steps:
            current = step.push_log_derivative(current, t)
        return current

    def log_derivative(self, state: Sequence[float], velocity: Sequence[float], t: float) -> np.ndarray:
        """d(log y)/dt of the final state from x and dx/dt of the original one"""
        state = check_positive(state)
        return self.push_log_derivative(np.asarray(velocity, dtype=float) / state, t)

    def to_dicts(self):
        return [s.to_dict() for s in self.steps]


def map_state(chain: TransformChain, direction: Direction, state: Sequence[float], t: float) -> np.ndarray:
    """Map a positive state through the chain; t is the base (original) time"""
    if Direction(direction) is Direction.FORWARD:
        return chain.forward(state, t)
    return chain.inverse(state, t)
