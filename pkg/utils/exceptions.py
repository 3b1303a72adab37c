"""
Exception hierarchy for the QP reduction toolkit
Every error carries the CLI exit code it maps to and a witness for reports
"""
from typing import Any, Dict, List, Optional

EXIT_OK = 0
EXIT_NOT_REDUCIBLE = 2
EXIT_INPUT_ERROR = 3
EXIT_VERIFICATION_FAILED = 4


class QPRError(Exception):
    """Base class for all toolkit errors"""

    exit_code = EXIT_INPUT_ERROR

    def witness(self) -> Dict[str, Any]:
        return {}

    def to_dict(self) -> Dict[str, Any]:
        return {
            'type': type(self).__name__,
            'message': str(self),
            'witness': self.witness(),
        }


# Input / structural errors -----------------------------------------------

class InputError(QPRError):
    exit_code = EXIT_INPUT_ERROR


class PositionedInputError(InputError):
    """Input error that knows where in the source text it happened"""

    def __init__(self, message: str, line: Optional[int] = None, col: Optional[int] = None):
        self.line = line
        self.col = col
        where = f" (line {line}, col {col})" if line is not None else ""
        super().__init__(f"{message}{where}")

    def to_dict(self) -> Dict[str, Any]:
        data = super().to_dict()
        data['line'] = self.line
        data['col'] = self.col
        return data


class OdeSyntaxError(PositionedInputError):
    def __init__(self, line: int, col: int, expected: str):
        self.expected = expected
        super().__init__(f"syntax error: {expected}", line, col)


class UnknownSymbolError(PositionedInputError):
    def __init__(self, name: str, line: Optional[int] = None, col: Optional[int] = None):
        self.name = name
        super().__init__(f"unknown symbol '{name}'", line, col)


class IrrationalExponentError(PositionedInputError):
    def __init__(self, text: str, line: Optional[int] = None, col: Optional[int] = None):
        self.text = text
        super().__init__(f"exponent must be a rational literal, got '{text}'", line, col)


class NonPositiveStateError(PositionedInputError):
    def __init__(self, values: List[float], line: Optional[int] = None, col: Optional[int] = None):
        self.values = values
        super().__init__(f"states must lie in the positive orthant, got {values}", line, col)


class DimensionMismatchError(InputError):
    pass


class EmptySystemError(InputError):
    def __init__(self):
        super().__init__("all quasimonomials vanish and lambda = 0: nothing to reduce")


class NonMaximalRankError(InputError):
    def __init__(self, rank: int, expected: int):
        self.rank = rank
        self.expected = expected
        super().__init__(
            f"rank(B) = {rank} < n = {expected}: the system is redundant "
            "and must be embedded in a smaller one first"
        )

    def witness(self) -> Dict[str, Any]:
        return {'rank_B': self.rank, 'n': self.expected}


class ZeroPrefactorError(InputError):
    def __init__(self):
        super().__init__("new-time prefactor must be nonzero")


class NonMonomialCoefficientError(InputError):
    def __init__(self, text: str):
        super().__init__(f"'{text}' is not a single-term coefficient and cannot be used as a divisor")


class UnboundParameterError(InputError):
    def __init__(self, name: str):
        self.name = name
        super().__init__(f"parameter '{name}' has no numeric binding")

    def witness(self) -> Dict[str, Any]:
        return {'parameter': self.name}


class SingularMatrixError(InputError):
    def __init__(self, rank: int, dimension: int):
        self.rank = rank
        self.dimension = dimension
        super().__init__(f"matrix is singular (rank {rank} < {dimension})")

    def witness(self) -> Dict[str, Any]:
        return {'rank': self.rank, 'dimension': self.dimension}


class InconsistentSystemError(InputError):
    def __init__(self, columns: List[int]):
        self.columns = columns
        cols = ', '.join(str(c + 1) for c in columns)
        super().__init__(f"columns {cols} of the right-hand side lie outside the column space")

    def witness(self) -> Dict[str, Any]:
        return {'columns': [c + 1 for c in self.columns]}


# Reducibility verdicts ----------------------------------------------------

class ReductionError(QPRError):
    exit_code = EXIT_NOT_REDUCIBLE


class NotReducibleError(ReductionError):
    def __init__(self, message: str, witness: Optional[Dict[str, Any]] = None):
        self._witness = witness or {}
        super().__init__(message)

    def witness(self) -> Dict[str, Any]:
        return self._witness


class PolicyInfeasibleError(ReductionError):
    pass


class ConditionsUnsatisfiedError(ReductionError):
    def __init__(self, conditions):
        self.conditions = conditions
        super().__init__(
            f"uniform-Gamma conditions are not satisfied (verdict: {conditions.satisfiable.value})"
        )

    def witness(self) -> Dict[str, Any]:
        return {'conditions': self.conditions.to_dict()}


class WrongCaseError(ReductionError):
    pass


class FullRankError(ReductionError):
    def __init__(self, n: int):
        super().__init__(f"rank(A) = n = {n}: the left kernel of A is trivial")

    def witness(self) -> Dict[str, Any]:
        return {}


# Numeric failures ---------------------------------------------------------

class NumericError(QPRError):
    exit_code = EXIT_VERIFICATION_FAILED


class LeftPositiveOrthantError(NumericError):
    def __init__(self, t: float):
        self.t = t
        super().__init__(f"trajectory left the positive orthant at t = {t:.6g}")

    def witness(self) -> Dict[str, Any]:
        return {'t': self.t}


class StepSizeUnderflowError(NumericError):
    def __init__(self, t: float, detail: str = ""):
        self.t = t
        super().__init__(f"step size underflow at t = {t:.6g} {detail}".rstrip())

    def witness(self) -> Dict[str, Any]:
        return {'t': self.t}
