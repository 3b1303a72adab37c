"""
Numeric verification of reductions
Integrates the original and the reduced system independently and compares
them through the transformation chain.
"""
import logging
from typing import Callable, Optional, Sequence, Union

import numpy as np
from scipy.integrate import solve_ivp

import config
from models.qp_system import ExpQPSystem, QPSystem
from models.reduction import ReductionMethod, ReductionResult
from models.trajectory import TimeMap, Trajectory, VerifyReport
from models.transforms import TransformChain
from utils.exceptions import LeftPositiveOrthantError, StepSizeUnderflowError, UnboundParameterError

logger = logging.getLogger(__name__)

AnySystem = Union[QPSystem, ExpQPSystem]
TimeRate = Callable[[np.ndarray, float], float]


class NumericField:
    """x' = x * (lambda + A . exp(B log x + Gamma t)) with every coefficient bound"""

    def __init__(self, sys: AnySystem):
        if sys.params:
            raise UnboundParameterError(sorted(sys.params)[0])
        self.n, self.m = sys.n, sys.m
        self.A = np.array([[float(c) for c in row] for row in sys.A], dtype=float).reshape(sys.n, sys.m)
        self.B = sys.B.to_float()
        if isinstance(sys, ExpQPSystem):
            self.lam = np.zeros(sys.n)
            self.gamma = np.array([float(g) for g in sys.gamma], dtype=float)
        else:
            self.lam = np.array([float(c) for c in sys.lam], dtype=float)
            self.gamma = np.zeros(sys.m)

    def bracket(self, t: float, x: np.ndarray) -> np.ndarray:
        """d(log x)/dt"""
        if self.m == 0:
            return self.lam.copy()
        return self.lam + self.A @ np.exp(self.B @ np.log(x) + self.gamma * t)

    def __call__(self, t: float, x: np.ndarray) -> np.ndarray:
        if np.any(x <= 0):
            return np.full_like(x, np.nan)
        return x * self.bracket(t, x)


def integrate(sys: AnySystem, x0: Sequence[float], t_end: Optional[float], tol: float = None,
              samples: int = None, time_rate: Optional[TimeRate] = None,
              t_eval: Optional[np.ndarray] = None, time_label: str = 't') -> Trajectory:
    """
    Adaptive integration on the positive orthant.

    Args:
        sys: numeric system
        x0: positive initial state
        t_end: horizon, ignored when t_eval is given
        tol: relative tolerance (atol = tol * QPR_ATOL_FACTOR)
        samples: number of uniform sample points on [0, t_end]
        time_rate: d tau/dt as a function of (state, t); tau is integrated alongside
        t_eval: explicit monotone sample times starting at 0

    Returns:
        Trajectory sampled on the requested grid
    """
    field = NumericField(sys)
    x0 = np.asarray(x0, dtype=float)
    if x0.shape != (sys.n,):
        raise ValueError(f"initial state has {x0.size} entries for {sys.n} variables")
    if not np.all(np.isfinite(x0)) or np.any(x0 <= 0):
        raise LeftPositiveOrthantError(0.0)
    tol = tol or config.QPR_DEFAULT_TOL
    if t_eval is None:
        t_eval = np.linspace(0.0, float(t_end), samples or config.QPR_SAMPLE_POINTS)
    n = sys.n

    if time_rate is None:
        fun, y0 = field, x0
    else:
        def fun(t, z):
            x = z[:n]
            if np.any(x <= 0):
                return np.full_like(z, np.nan)
            return np.append(field(t, x), time_rate(x, t))
        y0 = np.append(x0, 0.0)

    def leave_orthant(t, z):
        return float(np.min(z[:n]))
    leave_orthant.terminal = True
    leave_orthant.direction = -1

    sol = solve_ivp(
        fun, (float(t_eval[0]), float(t_eval[-1])), y0,
        method=config.QPR_INTEGRATOR, t_eval=t_eval, dense_output=True,
        rtol=tol, atol=tol * config.QPR_ATOL_FACTOR, events=leave_orthant,
    )
    if sol.status == 1:
        raise LeftPositiveOrthantError(float(sol.t_events[0][0]))
    if sol.status != 0:
        raise StepSizeUnderflowError(float(sol.t[-1]) if sol.t.size else 0.0, sol.message)
    steps = len(sol.sol.ts) - 1
    logger.debug("integrated %d variables over %d steps", n, steps)
    return Trajectory(
        times=sol.t, states=sol.y[:n].T.copy(), var_names=sys.var_names, time_label=time_label,
        tau=sol.y[n].copy() if time_rate is not None else None, steps=steps,
    )


def transport_time(chain: TransformChain, base: Trajectory, sys: Optional[AnySystem] = None,
                   tol: float = None) -> TimeMap:
    """tau at every base sample; tau(0) = 0"""
    if not chain.has_state_dependent_time:
        taus = np.array([chain.closed_form_time(t) for t in base.times])
    elif base.tau is not None:
        taus = base.tau
    elif sys is not None:
        taus = integrate(sys, base.states[0], None, tol, time_rate=chain.time_rate, t_eval=base.times).tau
    else:
        raise ValueError("a state-dependent new time needs the original system")
    return TimeMap(base.times, taus)


def _relative(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    return np.abs(a - b) / np.maximum(np.abs(a), config.QPR_REL_ERROR_FLOOR)


def verify_reduction(sys: QPSystem, result: ReductionResult, x0: Sequence[float], t_end: float,
                     tol: float = None, samples: int = None) -> VerifyReport:
    """Map the original trajectory through the chain and compare with the reduced flow"""
    tol = tol or config.QPR_DEFAULT_TOL
    samples = samples or config.QPR_SAMPLE_POINTS
    chain = result.chain
    reduced_sys = result.reduced
    rate = chain.time_rate if chain.has_state_dependent_time else None

    base = integrate(sys, x0, t_end, tol, samples, time_rate=rate)
    time_map = transport_time(chain, base)
    mapped = np.array([chain.forward(x, t) for t, x in zip(base.times, base.states)])
    reduced = integrate(reduced_sys, mapped[0], None, tol, t_eval=time_map.taus, time_label='tau')

    errors = _relative(mapped, reduced.states).max(axis=0)
    per_variable = tuple(float(e) for e in errors)
    max_rel_error = max(per_variable[1:], default=0.0)

    drift = None
    if result.method is ReductionMethod.KERNEL and result.constants:
        idx = list(range(sys.n - len(result.constants), sys.n))
        drift = float(_relative(mapped[:1, idx], mapped[:, idx]).max())

    original_field = NumericField(sys)
    reduced_field = NumericField(reduced_sys)
    residual = 0.0
    for t, x, tau, y in zip(base.times, base.states, time_map.taus, mapped):
        lhs = chain.log_derivative(x, original_field(t, x), t) / chain.time_rate(x, t)
        rhs = reduced_field.bracket(tau, y)
        residual = max(residual, float(np.max(np.abs(lhs - rhs) / (1.0 + np.abs(rhs)))))

    report = VerifyReport(
        max_rel_error=max_rel_error,
        per_variable=per_variable,
        quadrature_error=per_variable[0],
        residual_error=residual,
        steps_taken=base.steps + reduced.steps,
        tol=tol,
        atol=tol * config.QPR_ATOL_FACTOR,
        samples=len(base),
        t_end=float(t_end),
        threshold=config.QPR_VERIFY_THRESHOLD,
        constants_drift=drift,
        mapped=Trajectory(base.times, mapped, reduced_sys.var_names, 't', tau=time_map.taus),
        reduced=reduced,
    )
    logger.info("verification: max_rel_error=%.3e residual=%.3e", max_rel_error, residual)
    return report
