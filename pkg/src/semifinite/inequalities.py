"""
Young-type inequalities, their equality cases and the auxiliary lemmas.

Every check returns a VerificationReport; a violated inequality is a failed
report, never an exception. Exceptions are reserved for broken
preconditions (non-positive input, p outside the lemma's range, ...).

Reference values:
    - a = diag(4, 1), b = diag(2, 1), p = 2: mu_{|ab|} has steps {8, 1} and
      p^{-1}a^p + q^{-1}b^q = diag(10, 1)
    - x = e11, y = e12 in M_2, p = 2: |xy| has s-numbers (1, 0) against (1/2, 1/2)
      on the right, while xy* = 0
"""
import math
import time
from enum import Enum

import numpy as np

from utils.logging_utils import get_logger
from .algebra import (
    Operator,
    TracialAlgebra,
    _require_same_algebra,
    adjoint,
    is_positive,
    operator_norm,
    operator_to_dict,
    trace,
)
from .config import resolve_tolerance
from .errors import DomainError, NotPositiveError
from .functions import ConjugatePair, ConvexFunction
from .generators import RandomOperatorGenerator
from .majorization import majorization_margin
from .report import VerificationReport
from .snumbers import combine, mu, pointwise_margins, sample, sup_distance
from .spectral import (
    abs_op,
    abs_power,
    apply_function,
    eig_hermitian,
    inverse_pos,
    min_eigenvalue,
    mvn_equivalent,
    power_pos,
    range_projection,
    spectral_projection,
    young_combination,
)

logger = get_logger("semifinite_inequalities")

FENCHEL_GRID_POINTS = 2048
MAX_GRID_DOUBLINGS = 64
DEFAULT_EPSILONS = (1e-1, 1e-2, 1e-3)
SEARCH_P_RANGE = (1.1, 4.0)


class Dagger(str, Enum):
    """How an operand enters the tracial Young inequality: x, x*, |x| or |x*|."""

    PLAIN = "plain"
    STAR = "star"
    ABS = "abs"
    ABS_STAR = "abs_star"

    def apply(self, x, tol=None):
        if self is Dagger.PLAIN:
            return x
        if self is Dagger.STAR:
            return adjoint(x)
        if self is Dagger.ABS:
            return abs_op(x, tol)
        return abs_op(adjoint(x), tol)


def _require_positive(*operators, tol):
    for x in operators:
        if not is_positive(x, tol):
            raise NotPositiveError("Operator is not positive within tolerance")


def _tau(x):
    return trace(x).real


def _pointwise_report(name, lower, upper, tol, **details):
    """Report min(upper - lower) over merged breakpoints, scaled by upper(0)."""
    points, margins = pointwise_margins(lower, upper)
    i = int(np.argmin(margins))
    return VerificationReport.evaluate(
        name,
        margins[i],
        max(float(sample(upper, 0.0)), float(sample(lower, 0.0))),
        tol,
        witness={"t": float(points[i])},
        **details,
    )


# Young in singular values -------------------------------------------------

def check_young_sv(x, y, pq: ConjugatePair, tol=None):
    """
    mu_{|xy*|}(t) <= mu_{p^{-1}|x|^p + q^{-1}|y|^q}(t) for every t.

    Args:
        x: Operator
        y: Operator in the same algebra
        pq: Conjugate exponents
        tol: ToleranceConfig

    Returns:
        VerificationReport with the worst margin and the t attaining it
    """
    tol = resolve_tolerance(tol)
    _require_same_algebra(x, y)
    lhs = mu(abs_op(x @ adjoint(y), tol), tol)
    rhs = mu(young_combination(x, y, pq, tol), tol)
    return _pointwise_report("young_sv", lhs, rhs, tol, p=pq.p, q=pq.q)


def check_young_sv_xy(x, y, pq: ConjugatePair, tol=None):
    """
    mu_{|xy|}(t) <= mu_{p^{-1}|x|^p + q^{-1}|y|^q}(t), which fails in general.

    A failing report carries x, y and p in its witness.
    """
    tol = resolve_tolerance(tol)
    _require_same_algebra(x, y)
    lhs = mu(abs_op(x @ y, tol), tol)
    rhs = mu(young_combination(x, y, pq, tol), tol)
    report = _pointwise_report("young_sv_xy", lhs, rhs, tol, p=pq.p, q=pq.q)
    if report.passed:
        return report
    witness = dict(report.witness, p=pq.p, x=operator_to_dict(x), y=operator_to_dict(y))
    return VerificationReport(report.name, report.passed, report.worst_margin, witness, report.details)


def check_young_trace(x, y, pq: ConjugatePair, dagger_x=Dagger.PLAIN, dagger_y=Dagger.PLAIN, tol=None):
    """
    tau(|x' y'|) <= p^{-1} tau(|x|^p) + q^{-1} tau(|y|^q) for x' in {x, x*, |x|, |x*|}
    and likewise y'.

    The right-hand side is also evaluated on x', y' and must not change.
    """
    tol = resolve_tolerance(tol)
    _require_same_algebra(x, y)
    dagger_x, dagger_y = Dagger(dagger_x), Dagger(dagger_y)
    xd, yd = dagger_x.apply(x, tol), dagger_y.apply(y, tol)
    lhs = _tau(abs_op(xd @ yd, tol))
    rhs = _tau(young_combination(x, y, pq, tol))
    rhs_variant = _tau(young_combination(xd, yd, pq, tol))
    return VerificationReport.evaluate(
        f"young_trace[{dagger_x.value},{dagger_y.value}]",
        rhs - lhs,
        rhs,
        tol,
        conditions={"rhs_invariant": abs(rhs_variant - rhs) <= tol.threshold(rhs)},
        p=pq.p,
        lhs=lhs,
        rhs=rhs,
        rhs_variant=rhs_variant,
    )


def young_trace_variants(x, y, pq: ConjugatePair, tol=None):
    """check_young_trace for all 16 (dagger_x, dagger_y) combinations."""
    return [check_young_trace(x, y, pq, dx, dy, tol) for dx in Dagger for dy in Dagger]


# Equality cases -------------------------------------------------------------

def check_equality_trace(a, b, pq: ConjugatePair, tol=None):
    """
    tau(|ab|) = p^{-1} tau(a^p) + q^{-1} tau(b^q) holds exactly when b^q = a^p.

    Both sides of the biconditional are computed with their own tolerance
    (trace equality 1e-8 (1 + RHS), operator equality 1e-6 (1 + ||a^p||))
    and the report fails if they disagree.

    Raises:
        NotPositiveError: if a or b is not positive
    """
    tol = resolve_tolerance(tol)
    _require_same_algebra(a, b)
    _require_positive(a, b, tol=tol)
    a_p = power_pos(a, pq.p, tol)
    b_q = power_pos(b, pq.q, tol)
    lhs = _tau(abs_op(a @ b, tol))
    rhs = _tau(a_p) / pq.p + _tau(b_q) / pq.q
    gap = rhs - lhs
    dist = operator_norm(b_q - a_p)
    tol_eq = tol.trace_equality_tol(rhs)
    tol_op = tol.operator_equality_tol(operator_norm(a_p))
    gap_equal, dist_equal = gap <= tol_eq, dist <= tol_op
    return VerificationReport.evaluate(
        "equality_trace",
        gap,
        rhs,
        tol,
        conditions={"biconditional": gap_equal == dist_equal},
        p=pq.p,
        gap=gap,
        dist=dist,
        tol_eq=tol_eq,
        tol_op=tol_op,
        gap_equal=gap_equal,
        dist_equal=dist_equal,
    )


def check_equality_sv(x, y, pq: ConjugatePair, tol=None):
    """
    mu_{|xy*|} = mu_{p^{-1}|x|^p + q^{-1}|y|^q} exactly when |y|^q = |x|^p.
    """
    tol = resolve_tolerance(tol)
    _require_same_algebra(x, y)
    lhs = mu(abs_op(x @ adjoint(y), tol), tol)
    rhs = mu(young_combination(x, y, pq, tol), tol)
    points, margins = pointwise_margins(lhs, rhs)
    top = float(sample(rhs, 0.0))
    sv_gap = float(np.max(np.abs(margins)))
    x_p = abs_power(x, pq.p, tol)
    dist = operator_norm(abs_power(y, pq.q, tol) - x_p)
    tol_sv = tol.trace_equality_tol(top)
    tol_op = tol.operator_equality_tol(operator_norm(x_p))
    sv_equal, dist_equal = sv_gap <= tol_sv, dist <= tol_op
    i = int(np.argmin(margins))
    return VerificationReport.evaluate(
        "equality_sv",
        margins[i],
        top,
        tol,
        witness={"t": float(points[i])},
        conditions={"biconditional": sv_equal == dist_equal},
        p=pq.p,
        sv_gap=sv_gap,
        dist=dist,
        tol_sv=tol_sv,
        tol_op=tol_op,
        sv_equal=sv_equal,
        dist_equal=dist_equal,
    )


def check_equality_chain(a, b, pq: ConjugatePair, tol=None):
    """
    Intermediate identities of the equality case b^q = a^p:
    mu_{|ab|} = mu_h = p^{-1} mu_{a^p} + q^{-1} mu_{b^q}, ||b|| = ||a||^{p/q}
    and tau(a^p) = tau(b^q), with h = p^{-1}a^p + q^{-1}b^q.
    """
    tol = resolve_tolerance(tol)
    _require_same_algebra(a, b)
    _require_positive(a, b, tol=tol)
    a_p = power_pos(a, pq.p, tol)
    b_q = power_pos(b, pq.q, tol)
    h = a_p * (1.0 / pq.p) + b_q * (1.0 / pq.q)
    mu_h = mu(h, tol)
    split = combine(mu(a_p, tol).scaled(1.0 / pq.p), mu(b_q, tol).scaled(1.0 / pq.q), np.add, tol)
    norm_h = operator_norm(h)
    gaps = {
        "abs_vs_combination": sup_distance(mu(abs_op(a @ b, tol), tol), mu_h)[0],
        "combination_vs_split": sup_distance(mu_h, split)[0],
        "norm_power": abs(operator_norm(b) - operator_norm(a) ** (pq.p / pq.q)),
        "trace_powers": abs(_tau(a_p) - _tau(b_q)),
    }
    scales = {
        "abs_vs_combination": norm_h,
        "combination_vs_split": norm_h,
        "norm_power": operator_norm(b),
        "trace_powers": _tau(a_p),
    }
    dist = operator_norm(b_q - a_p)
    conditions = {"equality_case": dist <= tol.operator_equality_tol(operator_norm(a_p))}
    conditions.update({k: gaps[k] <= tol.operator_equality_tol(scales[k]) for k in gaps})
    return VerificationReport.evaluate(
        "equality_chain",
        -max(gaps.values()),
        max(scales.values()),
        tol.with_overrides(rel_tol=tol.eq_op_rel, abs_tol=tol.eq_op_rel),
        conditions=conditions,
        p=pq.p,
        dist=dist,
        **gaps,
    )


# Compression lemma --------------------------------------------------------

def compression_projection(a, b, s, tol=None):
    """
    f_s = R[b^{-1} p^{|ab|}((s, inf))] together with e = p^{|ab|}((s, inf)).
    """
    tol = resolve_tolerance(tol)
    e = spectral_projection(abs_op(a @ b, tol), s, tol)
    return range_projection(inverse_pos(b, tol) @ e, tol), e


def check_compression(a, b, pq: ConjugatePair, s, tol=None):
    """
    f_s (p^{-1}a^p + q^{-1}b^q) f_s >= s f_s and f_s ~ p^{|ab|}((s, inf)).

    Raises:
        DomainError: if p is outside (1, 2]
        NotPositiveError: if a or b is not positive
        NotInvertibleError: if b is not invertible
    """
    tol = resolve_tolerance(tol)
    if not 1 < pq.p <= 2:
        raise DomainError(f"The compression estimate needs p in (1, 2], got {pq.p}")
    _require_same_algebra(a, b)
    _require_positive(a, b, tol=tol)
    f, e = compression_projection(a, b, s, tol)
    h = power_pos(a, pq.p, tol) * (1.0 / pq.p) + power_pos(b, pq.q, tol) * (1.0 / pq.q)
    compressed = f @ h @ f - f * s
    compressed = (compressed + adjoint(compressed)) * 0.5
    return VerificationReport.evaluate(
        "compression",
        min_eigenvalue(compressed, tol),
        max(operator_norm(h), abs(s)),
        tol,
        conditions={"equivalent": mvn_equivalent(f, e, tol)},
        p=pq.p,
        s=s,
        rank=round(_tau(f), 12),
    )


def compression_levels(a, b, tol=None):
    """Midpoints between consecutive distinct s-numbers of |ab|, plus one level above ||ab||."""
    tol = resolve_tolerance(tol)
    values = mu(abs_op(a @ b, tol), tol).values
    levels = np.append(values, 0.0)
    mids = (levels[:-1] + levels[1:]) / 2
    return [float(v) for v in mids] + [float(values[0]) * 1.5 if values.size else 1.0]


def check_invertible_approximation(a, b, pq: ConjugatePair, epsilons=DEFAULT_EPSILONS, tol=None):
    """
    Compression checks with b_eps = b + eps 1 for every eps, at every
    midpoint level of mu_{|a b_eps|}.
    """
    tol = resolve_tolerance(tol)
    identity = b.algebra.identity()
    worst = math.inf
    conditions, per_epsilon = {}, {}
    for eps in epsilons:
        b_eps = b + identity * eps
        reports = [check_compression(a, b_eps, pq, s, tol) for s in compression_levels(a, b_eps, tol)]
        margin = min(r.worst_margin for r in reports)
        worst = min(worst, margin)
        conditions[f"eps={eps:g}"] = all(r.passed for r in reports)
        per_epsilon[f"{eps:g}"] = margin
    return VerificationReport.evaluate(
        "invertible_approximation",
        worst,
        operator_norm(young_combination(a, b, pq, tol)),
        tol,
        conditions=conditions,
        p=pq.p,
        margins=per_epsilon,
    )


# Reductions -------------------------------------------------------------------

def check_reduction_to_positives(x, y, tol=None):
    """mu_{|xy*|} <= mu_{| |x||y| |} at every merged breakpoint."""
    tol = resolve_tolerance(tol)
    _require_same_algebra(x, y)
    lhs = mu(abs_op(x @ adjoint(y), tol), tol)
    rhs = mu(abs_op(abs_op(x, tol) @ abs_op(y, tol), tol), tol)
    return _pointwise_report("reduction_to_positives", lhs, rhs, tol)


def check_symmetry_reduction(x, y, pq: ConjugatePair, tol=None):
    """
    Young in singular values for (x, y, p) and (y, x, q), and mu_{|ab|} = mu_{|ba|}
    for a = |x|, b = |y|.
    """
    tol = resolve_tolerance(tol)
    forward = check_young_sv(x, y, pq, tol)
    backward = check_young_sv(y, x, pq.swapped(), tol)
    a, b = abs_op(x, tol), abs_op(y, tol)
    swap_gap, at = sup_distance(mu(abs_op(a @ b, tol), tol), mu(abs_op(b @ a, tol), tol))
    return VerificationReport.evaluate(
        "symmetry_reduction",
        min(forward.worst_margin, backward.worst_margin, -swap_gap),
        max(forward.details["scale"], backward.details["scale"]),
        tol,
        conditions={"forward": forward.passed, "backward": backward.passed},
        p=pq.p,
        q=pq.q,
        swap_gap=swap_gap,
        t=at,
    )


# Arithmetic-geometric mean ----------------------------------------------------

def check_agm(a, b, tol=None):
    """
    mu(|ab|^{1/2}) weakly majorized by (mu(a) + mu(b)) / 2, and
    tau(|ab|^{1/2}) <= (tau(a) tau(b))^{1/2} <= (tau(a) + tau(b)) / 2.
    """
    tol = resolve_tolerance(tol)
    _require_same_algebra(a, b)
    _require_positive(a, b, tol=tol)
    mu_a, mu_b = mu(a, tol), mu(b, tol)
    root = mu(abs_power(a @ b, 0.5, tol), tol)
    mean = combine(mu_a, mu_b, lambda u, v: (u + v) / 2, tol)
    majorization, s = majorization_margin(root, mean)
    tau_root = _tau(abs_power(a @ b, 0.5, tol))
    tau_a, tau_b = _tau(a), _tau(b)
    geometric = math.sqrt(max(tau_a, 0.0) * max(tau_b, 0.0))
    arithmetic = (tau_a + tau_b) / 2
    chain = {"cauchy_schwarz": geometric - tau_root, "arithmetic_geometric": arithmetic - geometric}
    return VerificationReport.evaluate(
        "agm",
        min(majorization, *chain.values()),
        arithmetic,
        tol,
        majorization_margin=majorization,
        s=s,
        tau_root=tau_root,
        geometric=geometric,
        arithmetic=arithmetic,
        **chain,
    )


def _normalized(x, algebra):
    return Operator(algebra, x.blocks)


def check_tracial_young_positive(a, b, pq: ConjugatePair, tol=None):
    """
    Tracial Young and the AGM chain under the tracial state tau / tau(1),
    with equality in tracial Young exactly when b^q = a^p.
    """
    tol = resolve_tolerance(tol)
    _require_same_algebra(a, b)
    _require_positive(a, b, tol=tol)
    state = a.algebra.normalized()
    a_n, b_n = _normalized(a, state), _normalized(b, state)
    equality = check_equality_trace(a_n, b_n, pq, tol)
    lhs = _tau(abs_op(a_n @ b_n, tol))
    rhs = _tau(power_pos(a_n, pq.p, tol)) / pq.p + _tau(power_pos(b_n, pq.q, tol)) / pq.q
    root = _tau(abs_power(a_n @ b_n, 0.5, tol))
    tau_a, tau_b = _tau(a_n), _tau(b_n)
    geometric = math.sqrt(max(tau_a, 0.0) * max(tau_b, 0.0))
    margins = {
        "young": rhs - lhs,
        "cauchy_schwarz": geometric - root,
        "arithmetic_geometric": (tau_a + tau_b) / 2 - geometric,
    }
    return VerificationReport.evaluate(
        "tracial_young_positive",
        min(margins.values()),
        max(rhs, (tau_a + tau_b) / 2),
        tol,
        conditions={
            "unital": abs(state.total_trace - 1.0) <= tol.threshold(1.0),
            "equality_iff_powers_agree": equality.details["conditions"]["biconditional"],
        },
        p=pq.p,
        equality=equality.details["gap_equal"],
        powers_agree=equality.details["dist_equal"],
        **margins,
    )


# Fenchel-Young ----------------------------------------------------------------

def fenchel_grid(upper, points=FENCHEL_GRID_POINTS, knots=()):
    """Uniform grid on [0, upper] merged with the knots inside it, and the uniform spacing."""
    upper = float(upper) if upper > 0 else 1.0
    uniform = np.linspace(0.0, upper, points)
    knots = np.asarray(knots, dtype=np.float64)
    return np.union1d(uniform, knots[knots <= upper]), float(uniform[1] - uniform[0])


def conjugate_upper(F: ConvexFunction, r_max, start):
    """
    Right end of a grid holding a maximiser of r t - F(t) for every 0 <= r <= r_max.

    Sampled forms stop at their last knot. Other forms double the bound until
    the secant slope of F over [upper/2, upper] reaches r_max; past that point
    r t - F(t) is nonincreasing.

    Raises:
        DomainError: if no bound is found within MAX_GRID_DOUBLINGS doublings
    """
    upper = max(float(start), 1.0)
    if F.knots:
        return max(upper, F.knots[-1])
    for _ in range(MAX_GRID_DOUBLINGS):
        half = upper / 2
        if (float(F(upper)) - float(F(half))) / half >= r_max:
            return upper
        upper *= 2
    raise DomainError(f"Cannot bracket the conjugate of {F.name} up to r={r_max:g}")


def _conjugate_grid(F: ConvexFunction, r_max, start, tol):
    upper = conjugate_upper(F, r_max, start)
    if not F.is_convex_on(upper, tol=tol):
        raise DomainError(f"{F.name} fails the midpoint convexity test on [0, {upper:g}]")
    return fenchel_grid(upper, knots=F.knots or ())


def _grid_conjugate(F: ConvexFunction, r, grid):
    """max over the grid of r t - F(t), vectorized over r."""
    r = np.atleast_1d(np.asarray(r, dtype=np.float64))
    return np.max(r[:, None] * grid[None, :] - F(grid)[None, :], axis=1)


def fenchel_conjugate(F: ConvexFunction, r, upper=None, tol=None):
    """
    F*(r) = sup_{t >= 0} (r t - F(t)).

    Named forms with a closed conjugate return it; other forms take the max
    over FENCHEL_GRID_POINTS points on [0, upper] plus the knots of a sampled
    F, which makes sampled conjugates exact. The default upper comes from
    conjugate_upper.

    Raises:
        DomainError: if r lies outside the conjugate domain of F, or F fails
            the convexity test on the grid
    """
    tol = resolve_tolerance(tol)
    if not F.in_domain(r, tol):
        raise DomainError(f"r={r!r} lies outside the conjugate domain {F.domain} of {F.name}")
    if F.has_closed_conjugate:
        return float(F.conjugate_rule(np.asarray(r, dtype=np.float64)))
    if upper is None:
        grid, _ = _conjugate_grid(F, r, 2 * max(1.0, r), tol)
    else:
        grid, _ = fenchel_grid(upper, knots=F.knots or ())
    return float(_grid_conjugate(F, r, grid)[0])


def check_fenchel_young(a, b, F: ConvexFunction, tol=None):
    """
    tau(|ab|) <= tau(F(a)) + tau(F*(b)) + grid_error.

    F(a) and F*(b) come from the functional calculus; F(0) and F*(0) count on
    the kernels. Grid conjugates use FENCHEL_GRID_POINTS points from 0 to
    conjugate_upper(F, ||b||, 2 max(||a||, ||b||)), plus the knots of a sampled
    F, with grid_error = spacing * tau(b).

    Raises:
        NotPositiveError: if a or b is not positive
        DomainError: if the spectrum of b leaves the conjugate domain of F
    """
    tol = resolve_tolerance(tol)
    _require_same_algebra(a, b)
    _require_positive(a, b, tol=tol)
    spectrum = eig_hermitian(b, tol).eigenvalues
    outside = [float(v) for v in spectrum if not F.in_domain(max(float(v), 0.0), tol)]
    if outside:
        raise DomainError(f"Spectrum of b leaves the conjugate domain {F.domain} of {F.name}: {outside}")
    lhs = _tau(abs_op(a @ b, tol))
    tau_f = _tau(apply_function(a, F, tol))
    details = {"F": F.name, "F_at_zero": F.at_zero}
    if F.has_closed_conjugate:
        tau_conjugate = _tau(apply_function(b, F.conjugate_rule, tol))
        grid_error = 0.0
    else:
        r_max = float(np.max(spectrum, initial=0.0))
        grid, spacing = _conjugate_grid(F, r_max, 2 * max(operator_norm(a), operator_norm(b)), tol)
        tau_conjugate = _tau(apply_function(b, lambda values: _grid_conjugate(F, values, grid), tol))
        grid_error = spacing * _tau(b)
        details.update(
            grid_points=FENCHEL_GRID_POINTS,
            grid_knots=len(F.knots or ()),
            grid_upper=float(grid[-1]),
            grid_spacing=spacing,
        )
    rhs = tau_f + tau_conjugate
    return VerificationReport.evaluate(
        "fenchel_young",
        rhs + grid_error - lhs,
        rhs,
        tol,
        lhs=lhs,
        tau_F=tau_f,
        tau_conjugate=tau_conjugate,
        grid_error=grid_error,
        **details,
    )


# Counterexample search --------------------------------------------------------

def find_xy_counterexample(dim, seeds, seed=0, tol=None):
    """
    Random search for a violation of the |xy| form of Young in singular values.

    Entries are standard complex Gaussian and p is uniform in [1.1, 4].
    passed is True when a witness was found; worst_margin is the most
    negative |xy| margin seen. Not finding one is a result, not an error.

    Args:
        dim: Matrix size (>= 2)
        seeds: Number of trials
        seed: Campaign seed for the counter-based generator
        tol: ToleranceConfig

    Returns:
        VerificationReport with details["kind"] == "search"
    """
    tol = resolve_tolerance(tol)
    if dim < 2:
        raise DomainError(f"Counterexamples need dim >= 2, got {dim}")
    start_time = time.time()
    algebra = TracialAlgebra.factor(dim)
    generator = RandomOperatorGenerator(seed)
    worst = math.inf
    for trial in range(int(seeds)):
        x, y = generator.pair(algebra, trial)
        pq = ConjugatePair.from_p(generator.exponent(trial, *SEARCH_P_RANGE))
        report = check_young_sv_xy(x, y, pq, tol)
        worst = min(worst, report.worst_margin)
        if not report.passed:
            true_form = check_young_sv(x, y, pq, tol)
            elapsed = time.time() - start_time
            logger.info(f"Found |xy| counterexample at trial {trial} (p={pq.p:.4f}) in {elapsed:.2f}s")
            witness = dict(report.witness, trial=trial, xy_star_passes=true_form.passed)
            return VerificationReport(
                name="xy_counterexample_search",
                passed=True,
                worst_margin=report.worst_margin,
                witness=witness,
                details={"kind": "search", "dim": dim, "seed": seed, "trials": trial + 1, "p": pq.p},
            )
    elapsed = time.time() - start_time
    logger.info(f"No |xy| counterexample in {seeds} trials of dim {dim} ({elapsed:.2f}s)")
    return VerificationReport(
        name="xy_counterexample_search",
        passed=False,
        worst_margin=worst,
        witness=None,
        details={"kind": "search", "dim": dim, "seed": seed, "trials": int(seeds)},
    )
