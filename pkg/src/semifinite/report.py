"""
Structured outcome of a single verification check.
"""
import json
import math
from dataclasses import dataclass, field
from typing import Any, Dict, Optional

from .config import resolve_tolerance


def _jsonable(value):
    """Convert numpy scalars/arrays and nested containers into JSON-ready values."""
    if hasattr(value, "tolist"):
        return _jsonable(value.tolist())
    if isinstance(value, dict):
        return {str(k): _jsonable(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [_jsonable(v) for v in value]
    if isinstance(value, complex):
        return [value.real, value.imag]
    if isinstance(value, float) and not math.isfinite(value):
        return str(value)
    return value


@dataclass(frozen=True)
class VerificationReport:
    """
    Outcome of one inequality or identity check.

    worst_margin is the minimum of RHS - LHS over every checkpoint. A check
    passes when worst_margin >= -(abs_tol + rel_tol * scale) and every boolean
    condition recorded in details["conditions"] holds.
    """

    name: str
    passed: bool
    worst_margin: float
    witness: Optional[Dict[str, Any]] = None
    details: Dict[str, Any] = field(default_factory=dict)

    @classmethod
    def evaluate(cls, name, worst_margin, scale, tol=None, *, witness=None, conditions=None, **details):
        """
        Build a report from a margin and its scale.

        Args:
            name: Check name
            worst_margin: Minimum over checkpoints of RHS - LHS
            scale: Magnitude used for the relative part of the threshold
            tol: ToleranceConfig (process default when None)
            witness: Optional serialized operators / time points
            conditions: Optional mapping of named boolean assertions
            **details: Extra key-value diagnostics

        Returns:
            VerificationReport
        """
        tol = resolve_tolerance(tol)
        threshold = tol.threshold(scale)
        worst_margin = float(worst_margin)
        conditions = {k: bool(v) for k, v in (conditions or {}).items()}
        passed = worst_margin >= -threshold and all(conditions.values())
        merged = {"scale": float(abs(scale)), "threshold": threshold}
        if conditions:
            merged["conditions"] = conditions
        merged.update(details)
        return cls(
            name=name,
            passed=passed,
            worst_margin=worst_margin,
            witness=witness,
            details=merged,
        )

    def to_dict(self):
        """Serialize with the stable key order name, passed, worst_margin, witness, details."""
        return {
            "name": self.name,
            "passed": self.passed,
            "worst_margin": _jsonable(self.worst_margin),
            "witness": _jsonable(self.witness),
            "details": _jsonable(self.details),
        }

    def to_json(self, indent=2):
        return json.dumps(self.to_dict(), indent=indent)

    def summary(self):
        """One human-readable line."""
        status = "PASS" if self.passed else "FAIL"
        return f"{status}  {self.name:<34} worst_margin={self.worst_margin: .6e}"
