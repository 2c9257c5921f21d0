"""
Generalized singular values mu_z as canonical step functions.

In a block algebra mu_z is the decreasing rearrangement of the singular
values of z, each carrying the trace weight of its block:
mu_h(t) = min{s : tau(p^h((s, inf))) <= t}. Everything here is exact
arithmetic on finitely many rectangles.
"""
import itertools
import math
from dataclasses import dataclass

import numpy as np
import scipy.linalg

from utils.logging_utils import get_logger
from .algebra import _require_same_algebra, adjoint, is_positive, is_projection, operator_norm, trace
from .config import resolve_tolerance
from .errors import DomainError, NotPositiveError, NotProjectionError
from .functions import ScalarFunction
from .report import VerificationReport
from .spectral import abs_op, power_pos

logger = get_logger("semifinite_snumbers")

MAX_VARIATIONAL_DIM = 10


@dataclass(frozen=True, eq=False)
class StepFunction:
    """
    Right-continuous nonincreasing step function on [0, inf).

    values[i] is the value on [breakpoints[i], breakpoints[i+1]); the function
    is 0 on [breakpoints[-1], inf). Canonical form: breakpoints start at 0 and
    strictly increase, values are positive and strictly decreasing.
    """

    breakpoints: np.ndarray
    values: np.ndarray

    def __post_init__(self):
        breakpoints = np.array(self.breakpoints, dtype=np.float64).ravel()
        values = np.array(self.values, dtype=np.float64).ravel()
        if breakpoints.size != values.size + 1:
            raise DomainError("A step function needs exactly one more breakpoint than values")
        if breakpoints[0] != 0.0 or np.any(np.diff(breakpoints) <= 0):
            raise DomainError("Breakpoints must start at 0 and strictly increase")
        if np.any(values <= 0) or np.any(np.diff(values) >= 0):
            raise DomainError("Values must be positive and strictly decreasing")
        breakpoints.setflags(write=False)
        values.setflags(write=False)
        object.__setattr__(self, "breakpoints", breakpoints)
        object.__setattr__(self, "values", values)

    @classmethod
    def zero(cls):
        return cls(np.zeros(1), np.zeros(0))

    @classmethod
    def indicator(cls, length, height=1.0):
        """height on [0, length), 0 after."""
        if length <= 0 or height <= 0:
            return cls.zero()
        return cls([0.0, float(length)], [float(height)])

    @classmethod
    def from_masses(cls, values, masses, merge_tol=0.0, zero_cut=0.0):
        """
        Decreasing rearrangement of values, each occupying an interval of length masses[i].

        Values at most zero_cut are dropped; values within merge_tol * max(values)
        of a cluster's largest member merge into one step at their mass-weighted mean.
        """
        values = np.asarray(values, dtype=np.float64).ravel()
        masses = np.asarray(masses, dtype=np.float64).ravel()
        keep = (values > zero_cut) & (values > 0) & (masses > 0)
        values, masses = values[keep], masses[keep]
        if values.size == 0:
            return cls.zero()
        order = np.argsort(-values, kind="stable")
        values, masses = values[order], masses[order]
        width = merge_tol * values[0]
        merged_values, merged_masses = [], []
        start = 0
        for i in range(1, values.size + 1):
            if i == values.size or values[start] - values[i] > width:
                chunk_mass = math.fsum(masses[start:i])
                merged_values.append(math.fsum(values[start:i] * masses[start:i]) / chunk_mass)
                merged_masses.append(chunk_mass)
                start = i
        breakpoints = np.concatenate(([0.0], np.cumsum(merged_masses)))
        return cls(breakpoints, np.asarray(merged_values))

    @property
    def support(self):
        """Length t_m of the support."""
        return float(self.breakpoints[-1])

    @property
    def widths(self):
        return np.diff(self.breakpoints)

    def __call__(self, t):
        return sample(self, t)

    def scaled(self, c):
        """c * f for c >= 0."""
        if c < 0:
            raise DomainError("Step functions can only be scaled by nonnegative numbers")
        if c == 0 or self.values.size == 0:
            return StepFunction.zero()
        return StepFunction(self.breakpoints, c * self.values)

    def to_dict(self):
        return {"breakpoints": self.breakpoints.tolist(), "values": self.values.tolist()}

    @classmethod
    def from_dict(cls, data):
        return cls(data["breakpoints"], data["values"])


def sample(f, points):
    """Right-continuous evaluation of f at an array of points."""
    points = np.asarray(points, dtype=np.float64)
    flat = np.atleast_1d(points)
    index = np.searchsorted(f.breakpoints, flat, side="right") - 1
    inside = (index >= 0) & (index < f.values.size)
    out = np.zeros(flat.shape)
    out[inside] = f.values[index[inside]]
    return out.reshape(points.shape)


def evaluate(f, t):
    """
    f(t) for t >= 0; at a breakpoint the value of the interval to the right.

    Raises:
        DomainError: for negative t
    """
    if t < 0:
        raise DomainError(f"Step functions live on [0, inf), got t={t!r}")
    return float(sample(f, t))


def integrate(f, s=math.inf):
    """Exact integral of f over [0, s]."""
    if s < 0:
        raise DomainError(f"Upper limit must be nonnegative, got {s!r}")
    overlap = np.clip(np.minimum(f.breakpoints[1:], s) - f.breakpoints[:-1], 0.0, None)
    return math.fsum(f.values * overlap)


def cumulative(f, points):
    """Vectorized integral of f over [0, s] for each s in points."""
    points = np.atleast_1d(np.asarray(points, dtype=np.float64))
    prefix = np.concatenate(([0.0], np.cumsum(f.values * f.widths)))
    index = np.clip(np.searchsorted(f.breakpoints, points, side="right") - 1, 0, f.values.size)
    out = prefix[index]
    inside = index < f.values.size
    out[inside] += f.values[index[inside]] * (points[inside] - f.breakpoints[index[inside]])
    return out


def merged_breakpoints(*functions, extra=()):
    """Union of the breakpoints of every function (plus extra points)."""
    arrays = [f.breakpoints for f in functions] + [np.asarray(extra, dtype=np.float64).ravel()]
    return np.unique(np.concatenate(arrays))


def combine(f, g, op, tol=None):
    """
    Pointwise op(f, g) for a nonnegative op preserving monotonicity
    (sum, product, mean), re-canonicalized.
    """
    tol = resolve_tolerance(tol)
    points = merged_breakpoints(f, g)
    combined = op(sample(f, points[:-1]), sample(g, points[:-1]))
    return StepFunction.from_masses(combined, np.diff(points), merge_tol=tol.merge_tol)


def pointwise_margins(lower, upper):
    """
    upper(t) - lower(t) at every merged breakpoint below the larger support.

    Both functions are constant between merged breakpoints and vanish past the
    last one, so these finitely many values decide every pointwise comparison.
    """
    points = merged_breakpoints(lower, upper)
    if points.size > 1:
        points = points[:-1]
    return points, sample(upper, points) - sample(lower, points)


def sup_distance(f, g):
    """(sup_t |f(t) - g(t)|, argmax t)."""
    points, margins = pointwise_margins(f, g)
    i = int(np.argmax(np.abs(margins)))
    return float(abs(margins[i])), float(points[i])


def mu(z, tol=None):
    """
    Singular value function mu_z.

    Singular values of every block, each with its block's weight as mass,
    rearranged decreasingly. Singular values at most rank_tol * ||z|| count as 0.
    """
    tol = resolve_tolerance(tol)
    values = [scipy.linalg.svdvals(m) for m in z.blocks]
    masses = [np.full(v.size, b.weight) for v, b in zip(values, z.algebra.blocks)]
    values = np.concatenate(values)
    top = float(values.max()) if values.size else 0.0
    return StepFunction.from_masses(
        values, np.concatenate(masses), merge_tol=tol.merge_tol, zero_cut=tol.rank_tol * top
    )


def transform(f, psi: ScalarFunction, tol=None):
    """
    psi o f for an increasing continuous psi with psi(0) = 0.

    Raises:
        DomainError: if psi(0) != 0 or psi is not increasing
    """
    tol = resolve_tolerance(tol)
    upper = float(f.values[0]) if f.values.size else 1.0
    psi.check_calculus_ready(upper, tol=tol)
    return StepFunction.from_masses(psi(f.values), f.widths, merge_tol=tol.merge_tol)


def lambda_of_step(f, s, tol=None):
    """
    exp(int_0^s log f) with the convention that it is exactly 0 when f
    vanishes on a set of positive measure in [0, s).
    """
    tol = resolve_tolerance(tol)
    if s - f.support > tol.threshold(f.support):
        return 0.0
    overlap = np.clip(np.minimum(f.breakpoints[1:], s) - f.breakpoints[:-1], 0.0, None)
    return math.exp(math.fsum(np.log(f.values) * overlap))


def lambda_fn(h, s, tol=None):
    """
    Lambda_h(s) = exp(int_0^s log mu_h(t) dt) for positive h and 0 < s < tau(1).
    """
    tol = resolve_tolerance(tol)
    if not is_positive(h, tol):
        raise NotPositiveError("lambda_fn requires a positive operator")
    total = h.algebra.total_trace
    if not 0 < s < total:
        raise DomainError(f"s must lie in (0, {total:g}), got {s!r}")
    return lambda_of_step(mu(h, tol), s, tol)


def mu_distance_bound(z1, z2, tol=None):
    """sup_t |mu_{z1}(t) - mu_{z2}(t)| <= ||z1 - z2||."""
    tol = resolve_tolerance(tol)
    _require_same_algebra(z1, z2)
    sup, at = sup_distance(mu(z1, tol), mu(z2, tol))
    distance = operator_norm(z1 - z2)
    return VerificationReport.evaluate(
        "mu_distance_bound",
        distance - sup,
        max(operator_norm(z1), operator_norm(z2)),
        tol,
        sup_difference=sup,
        operator_distance=distance,
        t=at,
    )


def check_trace_identity(z, tol=None):
    """int_0^inf mu_z = tau(|z|)."""
    tol = resolve_tolerance(tol)
    integral = integrate(mu(z, tol))
    direct = trace(abs_op(z, tol)).real
    difference = abs(integral - direct)
    return VerificationReport.evaluate(
        "trace_identity", -difference, direct, tol, integral=integral, trace_abs=direct, difference=difference
    )


def check_symmetry(x, y, tol=None):
    """mu_x = mu_{x*} = mu_{|x|} and mu_{|xy*|} = mu_{|yx*|}."""
    tol = resolve_tolerance(tol)
    mu_x = mu(x, tol)
    star_gap, _ = sup_distance(mu_x, mu(adjoint(x), tol))
    abs_gap, _ = sup_distance(mu_x, mu(abs_op(x, tol), tol))
    swap_gap, at = sup_distance(mu(abs_op(x @ adjoint(y), tol), tol), mu(abs_op(y @ adjoint(x), tol), tol))
    worst = max(star_gap, abs_gap, swap_gap)
    return VerificationReport.evaluate(
        "symmetry",
        -worst,
        max(operator_norm(x), operator_norm(x) * operator_norm(y)),
        tol,
        star_gap=star_gap,
        abs_gap=abs_gap,
        swap_gap=swap_gap,
        t=at,
    )


def check_contraction(w1, z, w2, tol=None):
    """mu_{w1 z w2}(t) <= ||w1|| ||w2|| mu_z(t) at every merged breakpoint."""
    tol = resolve_tolerance(tol)
    lower = mu(w1 @ z @ w2, tol)
    upper = mu(z, tol).scaled(operator_norm(w1) * operator_norm(w2))
    points, margins = pointwise_margins(lower, upper)
    i = int(np.argmin(margins))
    return VerificationReport.evaluate(
        "contraction", margins[i], evaluate(upper, 0.0), tol, t=float(points[i])
    )


def check_projection_snumbers(f, tol=None):
    """mu_f is exactly the indicator of [0, tau(f))."""
    tol = resolve_tolerance(tol)
    if not is_projection(f, tol):
        raise NotProjectionError("check_projection_snumbers requires a projection")
    step = mu(f, tol)
    expected = trace(f).real
    if step.values.size == 0:
        value_error, breakpoint_error = 0.0, abs(expected)
    elif step.values.size == 1:
        value_error = abs(float(step.values[0]) - 1.0)
        breakpoint_error = abs(step.support - expected)
    else:
        value_error, breakpoint_error = math.inf, math.inf
    return VerificationReport.evaluate(
        "projection_snumbers",
        -max(value_error, breakpoint_error),
        1.0,
        tol,
        conditions={"single_step": step.values.size <= 1},
        trace=expected,
        value_error=value_error,
        breakpoint_error=breakpoint_error,
    )


def check_functional_calculus(h, r, tol=None):
    """mu_{h^r} = (mu_h)^r for positive h and r > 0."""
    tol = resolve_tolerance(tol)
    transformed = transform(mu(h, tol), ScalarFunction.power(r), tol)
    direct = mu(power_pos(h, r, tol), tol)
    gap, at = sup_distance(transformed, direct)
    return VerificationReport.evaluate(
        "functional_calculus", -gap, evaluate(direct, 0.0), tol, r=r, gap=gap, t=at
    )


def mu_variational(h, t, basis=None, tol=None):
    """
    Brute-force inf over coordinate projections e with tau(1 - e) <= t of
    sup{<h xi, xi> : xi in ran e, ||xi|| = 1}.

    Coordinates are the columns of basis[k] in each block (standard basis by
    default). The minimum equals mu_h(t) when h is diagonal in that basis and
    bounds it from above otherwise.
    """
    tol = resolve_tolerance(tol)
    if not is_positive(h, tol):
        raise NotPositiveError("mu_variational requires a positive operator")
    if h.algebra.total_dim > MAX_VARIATIONAL_DIM:
        raise DomainError(f"Exhaustive search is limited to total dimension {MAX_VARIATIONAL_DIM}")
    per_block = []
    for k, (spec, m) in enumerate(zip(h.algebra.blocks, h.blocks)):
        b = np.eye(spec.dim) if basis is None else np.asarray(basis[k])
        compressed = b.conj().T @ m @ b
        compressed = (compressed + compressed.conj().T) / 2
        options = []
        for size in range(spec.dim + 1):
            for subset in itertools.combinations(range(spec.dim), size):
                top = float(scipy.linalg.eigvalsh(compressed[np.ix_(subset, subset)])[-1]) if subset else 0.0
                options.append((spec.weight * (spec.dim - size), top))
        per_block.append(options)
    logger.debug(f"Variational search over {math.prod(len(o) for o in per_block)} coordinate projections at t={t:g}")
    best = math.inf
    slack = tol.threshold(h.algebra.total_trace)
    for choice in itertools.product(*per_block):
        if sum(excluded for excluded, _ in choice) <= t + slack:
            best = min(best, max(top for _, top in choice))
    return best


def check_variational(h, basis=None, expect_exact=True, tol=None):
    """
    Compare mu_variational with mu at every breakpoint of mu_h.

    worst_margin is min(variational - mu), which is never negative; with
    expect_exact the largest gap must also vanish.
    """
    tol = resolve_tolerance(tol)
    step = mu(h, tol)
    points = step.breakpoints
    brute = np.array([mu_variational(h, t, basis, tol) for t in points])
    gaps = brute - sample(step, points)
    scale = evaluate(step, 0.0)
    conditions = {"exact": float(np.max(np.abs(gaps))) <= tol.threshold(scale)} if expect_exact else {}
    return VerificationReport.evaluate(
        "variational",
        float(np.min(gaps)),
        scale,
        tol,
        conditions=conditions,
        max_gap=float(np.max(gaps)),
        points=points.tolist(),
    )
