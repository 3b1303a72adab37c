"""
Pydantic models for reports and HTTP requests
"""
from typing import Any, Dict, List, Optional
from pydantic import BaseModel, Field

import config


class SystemBlock(BaseModel):
    """A QP system with rationals as "p/q" strings"""
    var_names: List[str]
    params: List[str]
    n: int
    m: int
    A: List[List[str]]
    B: List[List[str]]
    lam: Optional[List[str]] = Field(default=None, alias='lambda')
    gamma: Optional[List[str]] = Field(default=None, description="Exponential time factors")
    text: str

    model_config = {'populate_by_name': True}


class ConditionsBlock(BaseModel):
    """Uniform-Gamma conditions"""
    gamma: List[str]
    equations: List[str]
    satisfiable: str
    solution: Dict[str, str] = {}
    reason: str = ''


class ReductionBlock(BaseModel):
    """Decoupling result"""
    method: str
    policy: Optional[str] = None
    decoupled_index: int = 1
    source_index: int = 1
    independent: List[int] = []
    quadrature_note: str
    constants: List[str] = []
    C: Optional[List[List[str]]] = None
    B_prime: Optional[List[List[str]]] = None
    chain: List[Dict[str, Any]] = []
    reduced: SystemBlock


class VerificationBlock(BaseModel):
    """Numeric round-trip summary"""
    max_rel_error: float
    per_variable: List[float]
    quadrature_error: float
    residual_error: float
    constants_drift: Optional[float] = None
    steps_taken: int
    tol: float
    atol: float
    samples: int
    t_end: float
    threshold: float
    passed: bool


class ErrorBlock(BaseModel):
    """Failure description"""
    type: str
    message: str
    line: Optional[int] = None
    col: Optional[int] = None
    witness: Dict[str, Any] = {}


class Report(BaseModel):
    """Machine-readable result of one command"""
    schema_id: str = Field(default=config.REPORT_SCHEMA, alias='schema')
    command: str
    input_digest: Optional[str] = None
    bindings: Dict[str, str] = {}
    case: Optional[str] = None
    system: Optional[SystemBlock] = None
    conditions: Optional[ConditionsBlock] = None
    reduction: Optional[ReductionBlock] = None
    verification: Optional[VerificationBlock] = None
    error: Optional[ErrorBlock] = None
    exit_status: int = 0

    model_config = {'populate_by_name': True}


class ReductionRequest(BaseModel):
    """Body of the POST endpoints"""
    source: str = Field(description=".qp text")
    bind: Dict[str, str] = Field(default={}, description="Parameter bindings, name -> expression")
    policy: str = Field(default=config.QPR_DEFAULT_POLICY, description="completion or cvm")
    qmt: Optional[List[List[str]]] = Field(default=None, description="Explicit QMT matrix")
    prefactor: Optional[str] = None
    x0: Optional[List[str]] = None
    t_end: Optional[float] = None
    tol: Optional[float] = None
    samples: Optional[int] = None
    reduced: Optional[str] = Field(default=None, description="Previously emitted reduced system (.qp text)")


class ErrorResponse(BaseModel):
    """Error response model"""
    detail: Any
