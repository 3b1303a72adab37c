"""
Input Validators
Validates command-line and request inputs before any computation starts
"""
import re
from typing import Optional, Sequence, Tuple

BINDING = re.compile(r"^\s*([A-Za-z_][A-Za-z0-9_]*)\s*=\s*(\S.*?)\s*$")
POLICIES = ('completion', 'cvm')


class InputValidator:
    """Validates inputs for the reduction toolkit"""

    @staticmethod
    def validate_binding(text: str) -> Tuple[bool, str]:
        """Validate a `name=expr` parameter binding"""

        if not text or not isinstance(text, str):
            return False, "binding must be a non-empty string name=value"

        if not BINDING.match(text):
            return False, f"binding '{text}' is not of the form name=value"

        return True, ""

    @staticmethod
    def validate_state(values: Sequence[float]) -> Tuple[bool, str]:
        """Validate an initial state in the positive orthant"""

        if not values:
            return False, "initial state is empty"

        bad = [i + 1 for i, v in enumerate(values) if not v > 0]
        if bad:
            return False, f"initial state components {bad} are not positive"

        return True, ""

    @staticmethod
    def validate_tolerance(tol: float) -> Tuple[bool, str]:
        if not 0 < tol < 1:
            return False, f"tolerance {tol} must lie in (0, 1)"
        return True, ""

    @staticmethod
    def validate_horizon(t_end: float) -> Tuple[bool, str]:
        if not t_end > 0:
            return False, f"t_end {t_end} must be positive"
        return True, ""

    @staticmethod
    def validate_samples(samples: int) -> Tuple[bool, str]:
        if samples < 2:
            return False, f"need at least 2 sample points, got {samples}"
        return True, ""

    @staticmethod
    def validate_policy(name: str) -> Tuple[bool, str]:
        if name not in POLICIES:
            return False, f"unknown policy '{name}' (expected one of {', '.join(POLICIES)})"
        return True, ""

    @staticmethod
    def validate_verify_inputs(
        x0: Sequence[float],
        t_end: float,
        tol: float,
        samples: Optional[int] = None,
    ) -> Tuple[bool, str]:
        """Validate everything `verify` needs; first failure wins"""

        checks = [
            InputValidator.validate_state(x0),
            InputValidator.validate_horizon(t_end),
            InputValidator.validate_tolerance(tol),
        ]
        if samples is not None:
            checks.append(InputValidator.validate_samples(samples))

        for ok, message in checks:
            if not ok:
                return False, message

        return True, ""
