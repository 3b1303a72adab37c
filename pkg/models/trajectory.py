"""
Numeric trajectories and verification results
"""
from dataclasses import dataclass, field
from typing import Any, Dict, Optional, Tuple

import numpy as np
import pandas as pd


@dataclass(frozen=True)
class Trajectory:
    """Samples of a positive solution; `tau` is the new time when it was integrated alongside"""
    times: np.ndarray
    states: np.ndarray
    var_names: Tuple[str, ...]
    time_label: str = 't'
    tau: Optional[np.ndarray] = None
    steps: int = 0

    def __post_init__(self):
        if self.states.shape != (len(self.times), len(self.var_names)):
            raise ValueError(
                f"states have shape {self.states.shape}, expected {(len(self.times), len(self.var_names))}"
            )

    def __len__(self) -> int:
        return len(self.times)

    def to_frame(self, prefix: str = '') -> pd.DataFrame:
        frame = pd.DataFrame(self.states, columns=[f"{prefix}{name}" for name in self.var_names])
        frame.insert(0, self.time_label, self.times)
        if self.tau is not None:
            frame.insert(1, 'tau', self.tau)
        return frame


@dataclass(frozen=True)
class TimeMap:
    """New time tau sampled at base times t"""
    times: np.ndarray
    taus: np.ndarray


@dataclass(frozen=True)
class VerifyReport:
    max_rel_error: float
    per_variable: Tuple[float, ...]
    quadrature_error: float
    residual_error: float
    steps_taken: int
    tol: float
    atol: float
    samples: int
    t_end: float
    threshold: float
    constants_drift: Optional[float] = None
    mapped: Optional[Trajectory] = field(default=None, compare=False, repr=False)
    reduced: Optional[Trajectory] = field(default=None, compare=False, repr=False)

    @property
    def passed(self) -> bool:
        checks = [self.max_rel_error]
        if self.constants_drift is not None:
            checks.append(self.constants_drift)
        return all(v < self.threshold for v in checks)

    def samples_frame(self) -> pd.DataFrame:
        """Mapped original samples beside the independently integrated reduced ones"""
        frame = self.mapped.to_frame(prefix='mapped_')
        reduced = self.reduced.to_frame(prefix='reduced_').drop(columns=[self.reduced.time_label])
        return pd.concat([frame, reduced.reset_index(drop=True)], axis=1)

    def to_dict(self) -> Dict[str, Any]:
        data = {
            'max_rel_error': self.max_rel_error,
            'per_variable': list(self.per_variable),
            'quadrature_error': self.quadrature_error,
            'residual_error': self.residual_error,
            'steps_taken': self.steps_taken,
            'tol': self.tol,
            'atol': self.atol,
            'samples': self.samples,
            't_end': self.t_end,
            'threshold': self.threshold,
            'passed': self.passed,
        }
        if self.constants_drift is not None:
            data['constants_drift'] = self.constants_drift
        return data
