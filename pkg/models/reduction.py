"""
Reduction engine value types
"""
from dataclasses import dataclass, field
from enum import Enum
from typing import Any, Dict, Optional, Tuple, Union

from models.coefficients import ONE, ZERO, Coefficient
from models.qp_system import ExpQPSystem, QPSystem
from models.transforms import TransformChain
from utils.rational_linalg import RatMatrix


class CaseLabel(str, Enum):
    CASE_I = 'CaseI'
    CASE_II = 'CaseII'
    CASE_III = 'CaseIII'


class Satisfiability(str, Enum):
    YES = 'yes'
    NO = 'no'
    NEEDS_BINDING = 'needs-binding'


class PolicyKind(str, Enum):
    COMPLETION = 'completion'
    CVM = 'cvm'
    EXPLICIT = 'explicit'


class ReductionMethod(str, Enum):
    LAMBDA_ZERO = 'lambda_zero'
    UNIFORM_GAMMA = 'uniform_gamma'
    KERNEL = 'kernel'


@dataclass(frozen=True)
class BPrimePolicy:
    """How the target B' (equivalently the QMT matrix C) is chosen"""
    kind: PolicyKind = PolicyKind.COMPLETION
    matrix: Optional[RatMatrix] = None
    prefactor: Coefficient = ONE

    @classmethod
    def completion(cls, prefactor=ONE) -> 'BPrimePolicy':
        return cls(PolicyKind.COMPLETION, None, Coefficient.coerce(prefactor))

    @classmethod
    def cvm(cls, prefactor=ONE) -> 'BPrimePolicy':
        return cls(PolicyKind.CVM, None, Coefficient.coerce(prefactor))

    @classmethod
    def explicit(cls, matrix: RatMatrix, prefactor=ONE) -> 'BPrimePolicy':
        return cls(PolicyKind.EXPLICIT, matrix, Coefficient.coerce(prefactor))

    @classmethod
    def from_name(cls, name: str, prefactor=ONE) -> 'BPrimePolicy':
        kind = PolicyKind(name.lower())
        if kind is PolicyKind.EXPLICIT:
            raise ValueError("the explicit policy needs a QMT matrix")
        return cls(kind, None, Coefficient.coerce(prefactor))


@dataclass(frozen=True)
class ConditionSet:
    """Uniform-Gamma requirements Gamma_j - Gamma_1 = 0, j >= 2"""
    gamma: Tuple[Coefficient, ...]
    equations: Tuple[Coefficient, ...]
    satisfiable: Satisfiability
    solution: Tuple[Tuple[str, Coefficient], ...] = ()
    reason: str = ''

    @property
    def common_gamma(self) -> Coefficient:
        return self.gamma[0] if self.gamma else ZERO

    @property
    def solution_map(self) -> Dict[str, Coefficient]:
        return dict(self.solution)

    def to_dict(self) -> Dict[str, Any]:
        return {
            'gamma': [str(g) for g in self.gamma],
            'equations': [f"{eq} = 0" for eq in self.equations],
            'satisfiable': self.satisfiable.value,
            'solution': {name: str(value) for name, value in self.solution},
            'reason': self.reason,
        }


@dataclass(frozen=True)
class ReductionResult:
    """
    A successful decoupling.

    Indices are 1-based as reported: the decoupled variable is always 1 in the
    reduced system, `source_index` names the original column it replaced.
    """
    case: CaseLabel
    reduced: Union[QPSystem, ExpQPSystem]
    chain: TransformChain
    quadrature_note: str
    method: ReductionMethod
    decoupled_index: int = 1
    constants: Tuple[str, ...] = ()
    source_index: int = 1
    independent: Tuple[int, ...] = ()
    qmt: Optional[RatMatrix] = None
    b_prime: Optional[RatMatrix] = None
    policy: Optional[str] = None
    conditions: Optional[ConditionSet] = field(default=None, compare=False)
