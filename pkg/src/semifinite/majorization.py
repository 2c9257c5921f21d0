"""
Weak majorization, the spectral pre-order and log-majorization.

Also builds the unitary correction realizing |xy*| <= U h U* in a single
matrix factor, where h = p^{-1}|x|^p + q^{-1}|y|^q.
"""
import math

import numpy as np
import scipy.linalg

from utils.logging_utils import get_logger
from .algebra import Operator, _require_same_algebra, adjoint, is_positive, operator_norm, trace
from .config import resolve_tolerance
from .errors import NotAFactorError, NotPositiveError
from .functions import ConjugatePair
from .report import VerificationReport
from .snumbers import (
    combine,
    cumulative,
    integrate,
    lambda_of_step,
    merged_breakpoints,
    mu,
    pointwise_margins,
    sample,
)
from .spectral import abs_op, abs_power, eig_hermitian, min_eigenvalue, power_pos, young_combination

logger = get_logger("semifinite_majorization")


def _require_positive(*operators, tol):
    for x in operators:
        if not is_positive(x, tol):
            raise NotPositiveError("Operator is not positive within tolerance")


def _require_factor(x):
    if not x.algebra.is_factor:
        raise NotAFactorError(
            f"Spectral pre-order is defined for a single matrix factor, got {len(x.algebra.blocks)} blocks"
        )


def majorization_margin(f, g):
    """
    min over s of (int_0^s g - int_0^s f), and the s where it is attained.

    The difference of cumulative integrals is piecewise linear with kinks at
    the breakpoints and constant beyond both supports, so merged breakpoints
    cover every s including s = inf.
    """
    points = merged_breakpoints(f, g)
    gaps = cumulative(g, points) - cumulative(f, points)
    i = int(np.argmin(gaps))
    return float(gaps[i]), float(points[i])


def weak_majorize(f, g, tol=None):
    """f weakly majorized by g: int_0^s f <= int_0^s g + tol for every s."""
    tol = resolve_tolerance(tol)
    margin, _ = majorization_margin(f, g)
    return margin >= -tol.threshold(max(integrate(f), integrate(g)))


def check_submajorization(x, y, tol=None):
    """mu(xy) weakly majorized by the pointwise product mu(x) mu(y)."""
    tol = resolve_tolerance(tol)
    _require_same_algebra(x, y)
    lhs = mu(x @ y, tol)
    rhs = combine(mu(x, tol), mu(y, tol), np.multiply, tol)
    margin, at = majorization_margin(lhs, rhs)
    return VerificationReport.evaluate("submajorization", margin, integrate(rhs), tol, s=at)


def _preorder_margin(a, b, tol):
    """
    min over test points s of rank p^b((s, inf)) - rank p^a((s, inf)).

    Test points sit just below every eigenvalue of a and of b; the rank
    functions only change there.
    """
    values_a = eig_hermitian(a, tol).eigenvalues
    values_b = eig_hermitian(b, tol).eigenvalues
    radius = max(float(np.max(np.abs(values_a))), float(np.max(np.abs(values_b))))
    slack = tol.eig_tie_tol * radius + tol.abs_tol
    points = np.unique(np.concatenate((values_a, values_b))) - slack
    counts_a = np.sum(values_a[None, :] > points[:, None], axis=1)
    counts_b = np.sum(values_b[None, :] > points[:, None], axis=1)
    gaps = counts_b - counts_a
    i = int(np.argmin(gaps))
    return int(gaps[i]), float(points[i])


def spectral_preorder(a, b, tol=None):
    """
    a <_sp b for positive a, b in one matrix factor.

    In a finite factor p^a((s, inf)) is equivalent to a subprojection of
    p^b((s, inf)) exactly when its rank is no larger.

    Raises:
        NotAFactorError: for multi-block algebras
        NotPositiveError: for non-positive input
    """
    tol = resolve_tolerance(tol)
    _require_same_algebra(a, b)
    _require_factor(a)
    _require_positive(a, b, tol=tol)
    gap, _ = _preorder_margin(a, b, tol)
    return gap >= 0


def check_young_preorder(x, y, pq: ConjugatePair, tol=None):
    """|xy*| <_sp p^{-1}|x|^p + q^{-1}|y|^q in a single factor."""
    tol = resolve_tolerance(tol)
    _require_same_algebra(x, y)
    _require_factor(x)
    lhs = abs_op(x @ adjoint(y), tol)
    rhs = young_combination(x, y, pq, tol)
    gap, at = _preorder_margin(lhs, rhs, tol)
    return VerificationReport.evaluate(
        "young_preorder", gap, 0.0, tol, p=pq.p, q=pq.q, rank_gap=gap, s=at
    )


def doubly_stochastic_correction(x, y, pq: ConjugatePair, tol=None):
    """
    Unitary U with |xy*| <= U h U*, h = p^{-1}|x|^p + q^{-1}|y|^q.

    U maps the descending eigenbasis of h onto the descending eigenbasis of
    |xy*|, so U h U* - |xy*| is diagonal in the latter basis with entries
    lambda_i(h) - lambda_i(|xy*|) >= 0. Conjugation by U is a trace-preserving
    automorphism, hence doubly stochastic.

    Returns:
        (U, VerificationReport); an eigensolver failure yields U = 1 and a failed report
    """
    tol = resolve_tolerance(tol)
    _require_same_algebra(x, y)
    _require_factor(x)
    g = abs_op(x @ adjoint(y), tol)
    h = young_combination(x, y, pq, tol)
    h_norm = operator_norm(h)
    try:
        v_g = eig_hermitian(g, tol).eigenvectors[0]
        v_h = eig_hermitian(h, tol).eigenvectors[0]
    except (scipy.linalg.LinAlgError, ValueError) as e:
        logger.warning(f"Eigenbasis alignment failed: {e}")
        report = VerificationReport.evaluate(
            "doubly_stochastic_correction",
            -math.inf,
            h_norm,
            tol,
            conditions={"aligned": False},
            error=str(e),
        )
        return x.algebra.identity(), report
    u = Operator(x.algebra, (v_g @ v_h.conj().T,))
    unitary_error = operator_norm(adjoint(u) @ u - x.algebra.identity())
    conjugated = u @ h @ adjoint(u)
    trace_error = abs(trace(conjugated) - trace(h))
    margin = min_eigenvalue((conjugated - g + adjoint(conjugated - g)) * 0.5, tol)
    report = VerificationReport.evaluate(
        "doubly_stochastic_correction",
        margin,
        h_norm,
        tol,
        conditions={
            "unitary": unitary_error <= tol.threshold(1.0),
            "trace_preserved": trace_error <= tol.threshold(trace(h).real),
        },
        p=pq.p,
        unitary_error=unitary_error,
        trace_error=trace_error,
        min_eigenvalue=margin,
    )
    return u, report


def _lambda_points(total, *functions):
    """Midpoints of merged breakpoints inside (0, total), plus total itself."""
    points = merged_breakpoints(*functions, extra=(0.0, total))
    points = points[points <= total]
    mids = (points[:-1] + points[1:]) / 2
    return np.append(mids[(mids > 0) & (mids < total)], total)


def check_log_majorization(a, b, tol=None):
    """
    Lambda_{|ab|}(s) <= Lambda_a(s) Lambda_b(s), and Lambda_{h^{1/2}} = sqrt(Lambda_h) for h = |ab|.

    The value at s = tau(1) stands for the left limit s -> tau(1)-.
    """
    tol = resolve_tolerance(tol)
    _require_same_algebra(a, b)
    _require_positive(a, b, tol=tol)
    h = abs_op(a @ b, tol)
    mu_h, mu_a, mu_b = mu(h, tol), mu(a, tol), mu(b, tol)
    mu_root = mu(power_pos(h, 0.5, tol), tol)
    total = a.algebra.total_trace
    points = _lambda_points(total, mu_h, mu_a, mu_b, mu_root)
    lhs = np.array([lambda_of_step(mu_h, s, tol) for s in points])
    rhs = np.array([lambda_of_step(mu_a, s, tol) * lambda_of_step(mu_b, s, tol) for s in points])
    root = np.array([lambda_of_step(mu_root, s, tol) for s in points])
    margins = rhs - lhs
    i = int(np.argmin(margins))
    root_gap = float(np.max(np.abs(root - np.sqrt(lhs))))
    root_scale = float(np.max(np.sqrt(lhs)))
    return VerificationReport.evaluate(
        "log_majorization",
        margins[i],
        float(np.max(rhs)),
        tol,
        conditions={"root_identity": root_gap <= tol.threshold(root_scale)},
        s=float(points[i]),
        root_gap=root_gap,
    )


def check_young_majorization(x, y, pq: ConjugatePair, tol=None):
    """
    Pointwise Young in singular values implies mu_{|xy*|} weakly majorized by mu_h.

    The report fails if the pointwise inequality holds but the majorization does not.
    """
    tol = resolve_tolerance(tol)
    lhs = mu(abs_op(x @ adjoint(y), tol), tol)
    rhs = mu(young_combination(x, y, pq, tol), tol)
    _, pointwise = pointwise_margins(lhs, rhs)
    pointwise_margin = float(np.min(pointwise))
    pointwise_holds = pointwise_margin >= -tol.threshold(float(sample(rhs, 0.0)))
    margin, at = majorization_margin(lhs, rhs)
    return VerificationReport.evaluate(
        "young_majorization",
        margin,
        integrate(rhs),
        tol,
        conditions={"implication": (not pointwise_holds) or margin >= -tol.threshold(integrate(rhs))},
        p=pq.p,
        pointwise_margin=pointwise_margin,
        s=at,
    )


def check_agm_integrals(a, b, tol=None):
    """
    At every merged breakpoint s:
    int mu_{|ab|^{1/2}} <= int sqrt(mu_a mu_b) <= (int mu_a)^{1/2} (int mu_b)^{1/2}
    <= (int mu_a + int mu_b) / 2, all integrals over [0, s].
    """
    tol = resolve_tolerance(tol)
    _require_same_algebra(a, b)
    _require_positive(a, b, tol=tol)
    mu_a, mu_b = mu(a, tol), mu(b, tol)
    root = mu(abs_power(a @ b, 0.5, tol), tol)
    geometric = combine(mu_a, mu_b, lambda u, v: np.sqrt(u * v), tol)
    points = merged_breakpoints(root, geometric, mu_a, mu_b)
    c_root = cumulative(root, points)
    c_geometric = cumulative(geometric, points)
    c_a, c_b = cumulative(mu_a, points), cumulative(mu_b, points)
    c_cauchy = np.sqrt(c_a * c_b)
    c_mean = (c_a + c_b) / 2
    margins = np.stack((c_geometric - c_root, c_cauchy - c_geometric, c_mean - c_cauchy))
    step, i = np.unravel_index(int(np.argmin(margins)), margins.shape)
    return VerificationReport.evaluate(
        "agm_integrals",
        margins[step, i],
        float(c_mean[-1]),
        tol,
        s=float(points[i]),
        step=["log_majorization", "cauchy_schwarz", "arithmetic_geometric"][step],
    )
