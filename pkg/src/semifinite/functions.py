"""
Scalar functions used by the functional calculus and the Young-type checks.

- ScalarFunction: increasing continuous psi with psi(0) = 0 (functional calculus)
- ConvexFunction: convex nondecreasing F on [0, inf) with its conjugate domain
- ConjugatePair: exponents p, q > 1 with 1/p + 1/q = 1
"""
import math
from dataclasses import dataclass
from typing import Callable, Optional, Tuple

import numpy as np
from scipy.interpolate import interp1d

from .config import resolve_tolerance
from .errors import DomainError


def _linear_extrapolant(ts, values):
    ts = np.asarray(ts, dtype=np.float64)
    values = np.asarray(values, dtype=np.float64)
    if ts.ndim != 1 or ts.size < 2 or ts.shape != values.shape:
        raise DomainError("Samples need matching 1-D arrays with at least two points")
    if ts[0] != 0.0 or np.any(np.diff(ts) <= 0):
        raise DomainError("Sample points must start at 0 and be strictly increasing")
    if not np.all(np.isfinite(values)):
        raise DomainError("Sample values must be finite")
    return interp1d(ts, values, kind="linear", fill_value="extrapolate", assume_sorted=True)


@dataclass(frozen=True)
class ScalarFunction:
    """
    Evaluation rule psi: [0, inf) -> [0, inf), vectorized over numpy arrays.
    """

    name: str
    rule: Callable[[np.ndarray], np.ndarray]

    def __call__(self, t):
        return np.asarray(self.rule(np.asarray(t, dtype=np.float64)), dtype=np.float64)

    @classmethod
    def identity(cls):
        return cls("identity", lambda t: t)

    @classmethod
    def power(cls, r):
        """t -> t^r for r > 0."""
        if not r > 0:
            raise DomainError(f"Power exponent must be positive, got {r!r}")
        return cls(f"power({r:g})", lambda t: np.power(np.clip(t, 0.0, None), r))

    @classmethod
    def exponential(cls, c=1.0):
        """t -> exp(c t) - 1 for c > 0."""
        if not c > 0:
            raise DomainError(f"Exponential rate must be positive, got {c!r}")
        return cls(f"exp({c:g})", lambda t: np.expm1(c * t))

    @classmethod
    def sampled(cls, ts, values):
        """Piecewise-linear interpolant through user samples, extended linearly."""
        interpolant = _linear_extrapolant(ts, values)
        return cls("sampled", lambda t: interpolant(t))

    def check_calculus_ready(self, upper, points=257, tol=None):
        """
        Raise DomainError unless psi(0) = 0 and psi is finite and nondecreasing on [0, upper].
        """
        tol = resolve_tolerance(tol)
        grid = np.linspace(0.0, max(float(upper), 1.0), points)
        values = self(grid)
        if not np.all(np.isfinite(values)):
            raise DomainError(f"{self.name} is not finite on [0, {upper:g}]")
        if abs(values[0]) > tol.abs_tol:
            raise DomainError(f"{self.name} must vanish at 0, got {values[0]:g}")
        if np.any(np.diff(values) < -tol.threshold(np.max(np.abs(values)))):
            raise DomainError(f"{self.name} is not increasing on [0, {upper:g}]")


@dataclass(frozen=True)
class ConvexFunction:
    """
    Convex nondecreasing F: [0, inf) -> [0, inf) with conjugate domain Gamma_F.

    Named power and linear forms carry a closed-form conjugate; every other
    form is conjugated on a grid. Sampled forms keep their knots, where a
    piecewise-linear F attains every supremum defining F*.
    """

    name: str
    rule: Callable[[np.ndarray], np.ndarray]
    domain: Tuple[float, float]
    conjugate_rule: Optional[Callable[[np.ndarray], np.ndarray]] = None
    knots: Optional[Tuple[float, ...]] = None

    def __call__(self, t):
        return np.asarray(self.rule(np.asarray(t, dtype=np.float64)), dtype=np.float64)

    @property
    def at_zero(self):
        return float(self(0.0))

    @property
    def has_closed_conjugate(self):
        return self.conjugate_rule is not None

    @classmethod
    def power(cls, p):
        """F(t) = t^p / p, F*(s) = s^q / q on [0, inf)."""
        pair = ConjugatePair.from_p(p)
        return cls(
            f"power({p:g})",
            lambda t: np.power(np.clip(t, 0.0, None), pair.p) / pair.p,
            (0.0, math.inf),
            lambda s: np.power(np.clip(s, 0.0, None), pair.q) / pair.q,
        )

    @classmethod
    def linear(cls, c=1.0):
        """F(t) = c t, F* = 0 on [0, c]."""
        if not c > 0:
            raise DomainError(f"Slope must be positive, got {c!r}")
        return cls(f"linear({c:g})", lambda t: c * t, (0.0, float(c)), lambda s: np.zeros_like(s))

    @classmethod
    def exponential(cls, c=1.0):
        """F(t) = exp(c t) - 1; conjugate evaluated on a grid."""
        if not c > 0:
            raise DomainError(f"Exponential rate must be positive, got {c!r}")
        return cls(f"exp({c:g})", lambda t: np.expm1(c * t), (0.0, math.inf))

    @classmethod
    def from_samples(cls, ts, values, tol=None):
        """
        User grid F, piecewise linear and extended with its last slope.

        Gamma_F is [0, last slope]: beyond it the supremum defining F* is infinite.
        """
        tol = resolve_tolerance(tol)
        interpolant = _linear_extrapolant(ts, values)
        ts = np.asarray(ts, dtype=np.float64)
        values = np.asarray(values, dtype=np.float64)
        slopes = np.diff(values) / np.diff(ts)
        scale = float(np.max(np.abs(slopes)))
        if np.any(slopes < -tol.threshold(scale)):
            raise DomainError("Sampled F must be nondecreasing")
        if np.any(np.diff(slopes) < -tol.threshold(scale)):
            raise DomainError("Sampled F must be convex")
        if values[0] < -tol.abs_tol:
            raise DomainError("Sampled F must be nonnegative")
        return cls("sampled", lambda t: interpolant(t), (0.0, float(slopes[-1])), knots=tuple(float(t) for t in ts))

    def in_domain(self, r, tol=None):
        tol = resolve_tolerance(tol)
        lo, hi = self.domain
        return lo - tol.threshold(lo) <= r <= hi + tol.threshold(hi if math.isfinite(hi) else 0.0)

    def is_convex_on(self, upper, points=257, tol=None):
        """Midpoint test F((a+b)/2) <= (F(a)+F(b))/2 on consecutive grid triples."""
        tol = resolve_tolerance(tol)
        grid = np.linspace(0.0, max(float(upper), 1.0), points)
        values = self(grid)
        scale = float(np.max(np.abs(values)))
        return bool(np.all(values[1:-1] <= (values[:-2] + values[2:]) / 2 + tol.threshold(scale)))


@dataclass(frozen=True)
class ConjugatePair:
    """Exponents p, q > 1 with 1/p + 1/q = 1."""

    p: float
    q: float

    def __post_init__(self):
        if not (self.p > 1 and self.q > 1):
            raise DomainError(f"Conjugate exponents must exceed 1, got p={self.p!r}, q={self.q!r}")
        if abs(1.0 / self.p + 1.0 / self.q - 1.0) > 1e-12:
            raise DomainError(f"1/p + 1/q must equal 1, got p={self.p!r}, q={self.q!r}")

    @classmethod
    def from_p(cls, p):
        p = float(p)
        if not p > 1:
            raise DomainError(f"p must exceed 1, got {p!r}")
        return cls(p, p / (p - 1.0))

    def swapped(self):
        return ConjugatePair(self.q, self.p)
