"""
Report service - runs one command and assembles its report
Shared by the command-line front end and the HTTP router.
"""
import json
import logging
from dataclasses import dataclass, replace
from fractions import Fraction
from typing import Dict, Optional, Sequence, Tuple, Union

import pandas as pd

import config
from connectors.qp_files import QPFileConnector, digest
from models.coefficients import ONE, Coefficient
from models.qp_system import ExpQPSystem, QPSystem
from models.reduction import BPrimePolicy, ConditionSet, ReductionResult, Satisfiability
from models.schemas import (
    ConditionsBlock, ErrorBlock, ReductionBlock, ReductionRequest, Report, SystemBlock, VerificationBlock
)
from parsers.odeparse import OdeAst, loads, lower, parse, parse_coefficient, render
from services.qp_transforms import bind_params, exp_scale, normalize, substitute_params
from services.reduction_service import classify, gamma_conditions, reduce
from services.verify_service import verify_reduction
from utils.exceptions import (
    EXIT_NOT_REDUCIBLE, EXIT_OK, EXIT_VERIFICATION_FAILED, DimensionMismatchError, InputError,
    NonPositiveStateError, QPRError, UnboundParameterError, UnknownSymbolError
)
from utils.rational_linalg import to_rational
from utils.validators import BINDING, InputValidator

logger = logging.getLogger(__name__)

AnySystem = Union[QPSystem, ExpQPSystem]

COMMANDS = ('parse', 'classify', 'conditions', 'reduce', 'verify', 'export')


@dataclass
class CommandResult:
    """Report plus the artifacts a command may write next to it"""
    report: Report
    text: Optional[str] = None
    samples: Optional[pd.DataFrame] = None

    @property
    def exit_status(self) -> int:
        return self.report.exit_status


def to_json(report: Report) -> str:
    """Deterministic serialization: sorted keys, rationals as "p/q" strings"""
    data = report.model_dump(mode='json', by_alias=True, exclude_none=True)
    return json.dumps(data, sort_keys=True, indent=2)


def system_block(sys: AnySystem, init: Optional[Sequence[Fraction]] = None) -> SystemBlock:
    block = SystemBlock(
        var_names=list(sys.var_names),
        params=sorted(sys.params),
        n=sys.n,
        m=sys.m,
        A=[[str(c) for c in row] for row in sys.A],
        B=sys.B.to_strings(),
        text=render(sys, init),
    )
    if isinstance(sys, ExpQPSystem):
        block.gamma = [str(g) for g in sys.gamma]
    else:
        block.lam = [str(c) for c in sys.lam]
    return block


def conditions_block(conditions: ConditionSet) -> ConditionsBlock:
    return ConditionsBlock(**conditions.to_dict())


def reduction_block(result: ReductionResult) -> ReductionBlock:
    return ReductionBlock(
        method=result.method.value,
        policy=result.policy,
        decoupled_index=result.decoupled_index,
        source_index=result.source_index,
        independent=list(result.independent),
        quadrature_note=result.quadrature_note,
        constants=list(result.constants),
        C=result.qmt.to_strings() if result.qmt is not None else None,
        B_prime=result.b_prime.to_strings() if result.b_prime is not None else None,
        chain=result.chain.to_dicts(),
        reduced=system_block(result.reduced),
    )


def error_block(exc: QPRError) -> ErrorBlock:
    data = exc.to_dict()
    return ErrorBlock(
        type=data['type'],
        message=data['message'],
        line=data.get('line'),
        col=data.get('col'),
        witness=data.get('witness', {}),
    )


class ReportService:
    """Runs parse / classify / conditions / reduce / verify / export on .qp text"""

    def run(self, command: str, request: ReductionRequest) -> CommandResult:
        """
        Execute one command

        Args:
            command: one of COMMANDS
            request: source text plus options

        Returns:
            CommandResult whose report carries the exit status; toolkit
            errors are turned into an error block instead of propagating
        """
        if command not in COMMANDS:
            raise ValueError(f"unknown command '{command}'")
        input_digest = digest(request.source)
        report = Report(command=command, input_digest=input_digest)
        try:
            handler = getattr(self, f"_{command}")
            return handler(request, report)
        except QPRError as exc:
            logger.info("%s failed: %s", command, exc)
            report.error = error_block(exc)
            report.exit_status = exc.exit_code
            return CommandResult(report)

    # Loading --------------------------------------------------------------

    def parse_bindings(self, bind: Dict[str, str], parameters: Sequence[str]) -> Dict[str, Coefficient]:
        """name -> expression, every name and every symbol a declared parameter"""
        bindings = {}
        for name, expression in sorted(bind.items()):
            ok, message = InputValidator.validate_binding(f"{name}={expression}")
            if not ok:
                raise InputError(message)
            if name not in parameters:
                raise UnknownSymbolError(name)
            bindings[name] = parse_coefficient(expression, parameters)
        return bindings

    @staticmethod
    def split_bindings(items: Sequence[str]) -> Dict[str, str]:
        """Repeated `name=expr` flags into a mapping"""
        bind = {}
        for item in items or ():
            ok, message = InputValidator.validate_binding(item)
            if not ok:
                raise InputError(message)
            name, expression = BINDING.match(item).groups()
            bind[name] = expression
        return bind

    def _load(self, request: ReductionRequest, report: Report) -> Tuple[OdeAst, AnySystem, Dict[str, Coefficient]]:
        ast = parse(request.source)
        bindings = self.parse_bindings(request.bind, ast.parameters)
        report.bindings = {name: str(value) for name, value in bindings.items()}
        sys = lower(ast)
        if bindings:
            sys = substitute_params(sys, bindings)
            if isinstance(sys, QPSystem):
                sys = normalize(sys)
        if isinstance(sys, QPSystem):
            report.case = classify(sys).value
        return ast, sys, bindings

    @staticmethod
    def _require_qp(sys: AnySystem, command: str) -> QPSystem:
        if not isinstance(sys, QPSystem):
            raise InputError(f"{command} needs a system without exp(...) time factors")
        return sys

    def _policy(self, request: ReductionRequest, parameters: Sequence[str],
                bindings: Dict[str, Coefficient]) -> BPrimePolicy:
        prefactor = ONE
        if request.prefactor is not None:
            prefactor = parse_coefficient(request.prefactor, parameters).substitute(bindings)
        if request.qmt is not None:
            return BPrimePolicy.explicit(QPFileConnector.parse_matrix(request.qmt), prefactor)
        ok, message = InputValidator.validate_policy(request.policy)
        if not ok:
            raise InputError(message)
        return BPrimePolicy.from_name(request.policy, prefactor)

    # Commands -------------------------------------------------------------

    def _parse(self, request: ReductionRequest, report: Report) -> CommandResult:
        _, sys, _ = self._load(request, report)
        report.system = system_block(sys)
        return CommandResult(report)

    def _classify(self, request: ReductionRequest, report: Report) -> CommandResult:
        _, sys, _ = self._load(request, report)
        self._require_qp(sys, 'classify')
        report.system = system_block(sys)
        return CommandResult(report)

    def _conditions(self, request: ReductionRequest, report: Report) -> CommandResult:
        _, sys, _ = self._load(request, report)
        conditions = gamma_conditions(exp_scale(self._require_qp(sys, 'conditions')))
        report.system = system_block(sys)
        report.conditions = conditions_block(conditions)
        if conditions.satisfiable is Satisfiability.NO:
            report.exit_status = EXIT_NOT_REDUCIBLE
        return CommandResult(report)

    def _reduce(self, request: ReductionRequest, report: Report) -> CommandResult:
        ast, sys, bindings = self._load(request, report)
        sys = self._require_qp(sys, 'reduce')
        report.system = system_block(sys)
        result = reduce(sys, self._policy(request, ast.parameters, bindings))
        report.reduction = reduction_block(result)
        if result.conditions is not None:
            report.conditions = conditions_block(result.conditions)
        return CommandResult(report, text=render(result.reduced))

    def _export(self, request: ReductionRequest, report: Report) -> CommandResult:
        ast, sys, _ = self._load(request, report)
        report.system = system_block(sys, ast.init)
        return CommandResult(report, text=render(sys, ast.init))

    def _verify(self, request: ReductionRequest, report: Report) -> CommandResult:
        ast, sys, bindings = self._load(request, report)
        sys = bind_params(self._require_qp(sys, 'verify'), {})
        x0 = self._initial_state(request, ast, sys.n)
        tol = request.tol or config.QPR_DEFAULT_TOL
        if request.t_end is None:
            raise InputError("verify needs a horizon t_end")
        ok, message = InputValidator.validate_verify_inputs(x0, request.t_end, tol, request.samples)
        if not ok:
            raise InputError(message)

        policy = self._policy(request, ast.parameters, bindings)
        if policy.prefactor.params:
            raise UnboundParameterError(sorted(policy.prefactor.params)[0])
        report.system = system_block(sys)
        result = reduce(sys, policy)
        if request.reduced is not None:
            result = replace(result, reduced=self._emitted(request.reduced, bindings, result))

        verification = verify_reduction(sys, result, [float(v) for v in x0], request.t_end, tol, request.samples)
        report.reduction = reduction_block(result)
        report.verification = VerificationBlock(**verification.to_dict())
        report.exit_status = EXIT_OK if verification.passed else EXIT_VERIFICATION_FAILED
        return CommandResult(report, samples=verification.samples_frame())

    @staticmethod
    def _initial_state(request: ReductionRequest, ast: OdeAst, n: int) -> Tuple[Fraction, ...]:
        if request.x0 is not None:
            try:
                state = tuple(to_rational(v) for v in request.x0)
            except (ValueError, ZeroDivisionError) as exc:
                raise InputError(f"initial state is not rational: {exc}") from exc
        elif ast.init is not None:
            state = ast.init
        else:
            raise InputError("verify needs an initial state (--x0 or an init: directive)")
        if len(state) != n:
            raise DimensionMismatchError(f"initial state has {len(state)} entries for {n} variables")
        if any(v <= 0 for v in state):
            raise NonPositiveStateError([float(v) for v in state])
        return state

    @staticmethod
    def _emitted(text: str, bindings: Dict[str, Coefficient], result: ReductionResult) -> AnySystem:
        """A reduced system written by an earlier `reduce`, bound like the original"""
        emitted = loads(text, normalize=False)
        if emitted.n != result.reduced.n:
            raise DimensionMismatchError(
                f"emitted system has {emitted.n} variables, the reduction has {result.reduced.n}"
            )
        relevant = {name: value for name, value in bindings.items() if name in emitted.params}
        return bind_params(emitted, relevant)
