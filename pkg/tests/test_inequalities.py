"""
Tests for Young-type inequalities in singular values and traces, their equality
cases, the compression estimate, the AGM chain and Fenchel-Young.
"""
import math
import sys
from pathlib import Path

import numpy as np
import pytest

# Add the src directory to the Python path
project_root = Path(__file__).parent.parent
src_path = project_root / "src"
sys.path.insert(0, str(src_path))

from semifinite.algebra import TracialAlgebra, operator_norm, operators_close
from semifinite.errors import DomainError, NotInvertibleError, NotPositiveError
from semifinite.functions import ConjugatePair, ConvexFunction
from semifinite.generators import OperatorKind
from semifinite.inequalities import (
    Dagger,
    check_agm,
    check_compression,
    check_equality_chain,
    check_equality_sv,
    check_equality_trace,
    check_fenchel_young,
    check_invertible_approximation,
    check_reduction_to_positives,
    check_symmetry_reduction,
    check_tracial_young_positive,
    check_young_sv,
    check_young_sv_xy,
    check_young_trace,
    compression_levels,
    compression_projection,
    fenchel_conjugate,
    find_xy_counterexample,
    young_trace_variants,
)
from semifinite.snumbers import StepFunction, mu, pointwise_margins
from semifinite.spectral import abs_op, power_pos, young_combination

P2 = ConjugatePair.from_p(2.0)


def test_young_sv_examples(m2):
    print("\n=== TESTING YOUNG IN SINGULAR VALUES ===")
    one = m2.identity()
    report = check_young_sv(one, one, P2)
    assert report.passed
    assert report.worst_margin == pytest.approx(0.0, abs=1e-12)

    a, b = m2.diagonal([4, 1]), m2.diagonal([2, 1])
    assert list(mu(abs_op(a @ b)).values) == pytest.approx([8, 1])
    assert list(mu(young_combination(a, b, P2)).values) == pytest.approx([10, 1])
    report = check_young_sv(a, b, P2)
    print(report.summary())
    assert report.passed
    assert report.worst_margin == pytest.approx(0.0, abs=1e-12)


def test_young_sv_reports_slack(m2):
    """x = diag(2, 0), y = diag(1, 0): mu_{|xy*|} = 2 against 5/2 on [0, 1), nothing after."""
    report = check_young_sv(m2.diagonal([2, 0]), m2.diagonal([1, 0]), P2)
    assert report.passed
    assert report.worst_margin == pytest.approx(0.5)
    assert report.witness["t"] == 0.0

    points, margins = pointwise_margins(StepFunction.indicator(1.0, 2.0), StepFunction.indicator(2.0, 3.0))
    assert list(points) == [0.0, 1.0]
    assert list(margins) == pytest.approx([1.0, 3.0])


def test_young_sv_on_random_pairs(generator):
    algebra = TracialAlgebra.factor(4)
    pq = ConjugatePair.from_p(1.5)
    for trial in range(20):
        report = check_young_sv(*generator.pair(algebra, trial), pq)
        assert report.passed, report.details


def test_xy_form_fails_where_xy_star_form_holds(e11, e12):
    """x = e11, y = e12: |xy| has s-numbers (1, 0) against 1/2 on the right, and xy* = 0."""
    print("\n=== TESTING THE |xy| COUNTEREXAMPLE ===")
    report = check_young_sv_xy(e11, e12, P2)
    print(report.summary())
    assert not report.passed
    assert report.worst_margin == pytest.approx(-0.5)
    assert report.witness["t"] == 0.0
    assert report.witness["p"] == 2.0
    assert "x" in report.witness and "y" in report.witness

    assert check_young_sv(e11, e12, P2).passed


def test_xy_form_holds_for_commuting_diagonals(m2):
    x, y = m2.diagonal([3, 0.5]), m2.diagonal([1, 2])
    for p in (1.1, 2.0, 4.0):
        assert check_young_sv_xy(x, y, ConjugatePair.from_p(p)).passed


def test_young_trace_examples(m2, generator):
    one = m2.identity()
    report = check_young_trace(one, one, P2)
    assert report.passed
    assert report.details["lhs"] == pytest.approx(report.details["rhs"])

    report = check_young_trace(m2.diagonal([4, 1]), m2.diagonal([2, 1]), P2)
    assert report.details["lhs"] == pytest.approx(9.0)
    assert report.details["rhs"] == pytest.approx(11.0)
    assert report.worst_margin == pytest.approx(2.0)
    assert report.name == "young_trace[plain,plain]"

    x, y = generator.pair(TracialAlgebra.from_specs([(2, 0.5), (3, 1.5)]), 0)
    reports = young_trace_variants(x, y, ConjugatePair.from_p(3.0))
    assert len(reports) == 16
    assert {r.name for r in reports} == {f"young_trace[{dx.value},{dy.value}]" for dx in Dagger for dy in Dagger}
    for report in reports:
        assert report.passed, report.details
        assert report.details["conditions"]["rhs_invariant"]


def test_equality_trace_detects_equality_case(m2, generator):
    print("\n=== TESTING EQUALITY IN TRACIAL YOUNG ===")
    pq = ConjugatePair.from_p(3.0)
    report = check_equality_trace(m2.diagonal([4, 1]), m2.diagonal([16, 1]), pq)
    assert report.passed
    assert report.details["gap_equal"] and report.details["dist_equal"]

    a = generator.operator(TracialAlgebra.factor(3), 0, OperatorKind.POSITIVE)
    b = power_pos(a, pq.p / pq.q)
    report = check_equality_trace(a, b, pq)
    assert report.passed
    assert report.details["gap_equal"] and report.details["dist_equal"]

    # diag(4, 1) against diag(16.01, 1.01): the trace gap is second order in the shift
    report = check_equality_trace(m2.diagonal([4, 1]), m2.diagonal([16.01, 1.01]), pq)
    print(f"Perturbed gap {report.details['gap']:.3e}")
    assert report.passed
    assert report.details["gap"] > 0
    assert not report.details["gap_equal"] and not report.details["dist_equal"]


def test_equality_trace_rejects_non_positive(m2):
    with pytest.raises(NotPositiveError):
        check_equality_trace(m2.diagonal([1, -1]), m2.identity(), P2)


def test_equality_sv(m2, generator):
    one = m2.identity()
    report = check_equality_sv(one, one, P2)
    assert report.passed and report.details["sv_equal"]

    pq = ConjugatePair.from_p(1.5)
    algebra = TracialAlgebra.factor(3)
    x = generator.operator(algebra, 1)
    w = generator.operator(algebra, 1, OperatorKind.UNITARY, role=2)
    y = w @ power_pos(abs_op(x), pq.p / pq.q)
    report = check_equality_sv(x, y, pq)
    assert report.passed, report.details
    assert report.details["sv_equal"] and report.details["dist_equal"]

    other = generator.operator(algebra, 1, OperatorKind.GENERAL, role=1)
    report = check_equality_sv(x, other, pq)
    assert report.passed
    assert not report.details["sv_equal"]


def test_equality_chain(m2, generator):
    pq = ConjugatePair.from_p(3.0)
    assert check_equality_chain(m2.diagonal([4, 1]), m2.diagonal([16, 1]), pq).passed
    a = generator.operator(TracialAlgebra.from_specs([(2, 0.5), (3, 1.5)]), 2, OperatorKind.POSITIVE)
    report = check_equality_chain(a, power_pos(a, pq.p / pq.q), pq)
    assert report.passed, report.details


def test_compression_example(m2):
    print("\n=== TESTING COMPRESSION ESTIMATE ===")
    a, b = m2.diagonal([1, 0]), m2.identity()
    f, e = compression_projection(a, b, 0.5)
    assert operators_close(f, m2.diagonal([1, 0]))
    assert operators_close(e, m2.diagonal([1, 0]))
    report = check_compression(a, b, P2, 0.5)
    print(report.summary())
    assert report.passed
    assert report.details["rank"] == 1.0

    above = check_compression(a, b, P2, 2.0)
    assert above.passed
    assert above.details["rank"] == 0.0


def test_compression_preconditions(m2):
    with pytest.raises(DomainError):
        check_compression(m2.identity(), m2.identity(), ConjugatePair.from_p(3.0), 0.5)
    with pytest.raises(NotInvertibleError):
        check_compression(m2.identity(), m2.diagonal([1, 0]), P2, 0.5)


def test_compression_on_random_invertible_pairs(two_block, generator):
    for trial in range(5):
        a = generator.operator(two_block, trial, OperatorKind.POSITIVE)
        b = generator.operator(two_block, trial, OperatorKind.INVERTIBLE_POSITIVE, role=1)
        for p in (1.1, 1.5, 2.0):
            pq = ConjugatePair.from_p(p)
            for s in compression_levels(a, b):
                report = check_compression(a, b, pq, s)
                assert report.passed, report.details


def test_invertible_approximation(generator):
    a, b = generator.pair(TracialAlgebra.factor(3), 4, OperatorKind.POSITIVE)
    report = check_invertible_approximation(a, b, ConjugatePair.from_p(1.5))
    assert report.passed, report.details
    assert set(report.details["margins"]) == {"0.1", "0.01", "0.001"}


def test_reductions(two_block, generator):
    for trial in range(5):
        x, y = generator.pair(two_block, trial)
        assert check_reduction_to_positives(x, y).passed
        report = check_symmetry_reduction(x, y, ConjugatePair.from_p(generator.exponent(trial)))
        assert report.passed, report.details


def test_agm_examples(m2, generator):
    one = m2.identity()
    report = check_agm(one, one)
    assert report.passed
    assert report.details["tau_root"] == pytest.approx(2.0)
    assert report.details["geometric"] == pytest.approx(2.0)

    report = check_agm(m2.diagonal([4, 0]), m2.diagonal([0, 4]))
    assert report.passed
    assert report.details["tau_root"] == pytest.approx(0.0, abs=1e-12)
    assert report.details["geometric"] == pytest.approx(4.0)
    assert report.details["arithmetic"] == pytest.approx(4.0)

    algebra = TracialAlgebra.factor(5)
    for trial in range(5):
        assert check_agm(*generator.pair(algebra, trial, OperatorKind.POSITIVE)).passed


def test_tracial_young_positive(two_block, generator):
    a, b = generator.pair(two_block, 5, OperatorKind.POSITIVE)
    report = check_tracial_young_positive(a, b, ConjugatePair.from_p(2.5))
    assert report.passed, report.details
    assert report.details["conditions"]["unital"]
    assert report.details["conditions"]["equality_iff_powers_agree"]


def test_tracial_young_positive_equality_case(two_block):
    """b = a^2 with p = 3 gives b^q = a^p; scaling b by 1.01 breaks both sides."""
    pq = ConjugatePair.from_p(3.0)
    a = two_block.diagonal([4, 1, 2, 1, 0])
    report = check_tracial_young_positive(a, two_block.diagonal([16, 1, 4, 1, 0]), pq)
    assert report.passed, report.details
    assert report.details["equality"] and report.details["powers_agree"]
    assert report.details["young"] == pytest.approx(0.0, abs=1e-9)

    report = check_tracial_young_positive(a, two_block.diagonal([16, 1, 4, 1, 0]) * 1.01, pq)
    assert report.passed, report.details
    assert not report.details["equality"] and not report.details["powers_agree"]


def test_fenchel_conjugates():
    assert fenchel_conjugate(ConvexFunction.power(2.0), 3.0) == pytest.approx(4.5)
    assert fenchel_conjugate(ConvexFunction.power(3.0), 2.0) == pytest.approx(2.0 ** 1.5 / 1.5)
    assert fenchel_conjugate(ConvexFunction.linear(), 0.5) == 0.0
    with pytest.raises(DomainError):
        fenchel_conjugate(ConvexFunction.linear(), 2.0)
    # exp(t) - 1 has conjugate r log r - r + 1
    grid_value = fenchel_conjugate(ConvexFunction.exponential(), 2.0)
    assert grid_value == pytest.approx(2 * math.log(2) - 1, abs=1e-5)
    # the maximiser t = 20 log 20 lies far right of 2 max(1, r)
    slow = fenchel_conjugate(ConvexFunction.exponential(0.05), 1.0)
    assert slow == pytest.approx(20 * math.log(20) - 19, rel=1e-3)


def test_sampled_conjugate_uses_knots_beyond_the_spectrum():
    F = ConvexFunction.from_samples([0.0, 10.0, 20.0], [0.0, 0.0, 10.0])
    assert F.knots == (0.0, 10.0, 20.0)
    assert F.domain == (0.0, 1.0)
    assert fenchel_conjugate(F, 0.9) == pytest.approx(9.0)
    assert fenchel_conjugate(F, 1.0) == pytest.approx(10.0)

    line = TracialAlgebra.factor(1)
    report = check_fenchel_young(line.diagonal([1.0]), line.diagonal([0.9]), F)
    print(report.summary())
    assert report.passed
    assert report.details["tau_conjugate"] == pytest.approx(9.0)
    assert report.details["tau_F"] == pytest.approx(0.0)
    assert report.details["grid_upper"] >= 20.0


def test_grid_conjugate_requires_convexity(m2):
    assert ConvexFunction.exponential().is_convex_on(5.0)
    wavy = ConvexFunction("wavy", lambda t: t + np.sin(3 * t), (0.0, 1.0))
    assert not wavy.is_convex_on(5.0)
    with pytest.raises(DomainError):
        fenchel_conjugate(wavy, 0.5)
    with pytest.raises(DomainError):
        check_fenchel_young(m2.identity(), m2.diagonal([0.5, 0.2]), wavy)

    # F(0) = 1 is recorded and enters tau(F(a)) on the kernel of a
    lifted = ConvexFunction.from_samples([0.0, 1.0, 2.0], [1.0, 1.0, 2.0])
    assert lifted.at_zero == 1.0
    report = check_fenchel_young(m2.diagonal([1, 0]), m2.diagonal([0.5, 0.5]), lifted)
    assert report.passed
    assert report.details["F_at_zero"] == 1.0
    assert report.details["tau_F"] == pytest.approx(2.0)


def _brute_force_conjugate(F, r, upper=200.0, points=400001):
    t = np.linspace(0.0, upper, points)
    return float(np.max(r * t - F(t)))


@pytest.mark.parametrize(
    "F",
    [
        ConvexFunction.exponential(),
        ConvexFunction.exponential(0.05),
        ConvexFunction.from_samples([0.0, 10.0, 20.0], [0.0, 0.0, 10.0]),
        ConvexFunction.from_samples([0.0, 0.5, 1.0, 2.0], [0.0, 0.1, 0.5, 2.0]),
    ],
    ids=["exp", "slow-exp", "sampled-far-knots", "sampled"],
)
def test_fenchel_young_matches_eigenvalue_oracle(two_block, F):
    """Commuting diagonals: tau(F(a)) + tau(F*(b)) is sum_i w_i (F(l_i) + F*(m_i))."""
    print(f"\n=== TESTING FENCHEL-YOUNG AGAINST THE SCALAR ORACLE ({F.name}) ===")
    weights = np.array([0.5, 0.5, 1.5, 1.5, 1.5])
    rng = np.random.default_rng(7)
    for _ in range(3):
        lam = rng.uniform(0.0, 3.0, size=5)
        mu_b = rng.uniform(0.0, F.domain[1] if math.isfinite(F.domain[1]) else 1.0, size=5)
        report = check_fenchel_young(two_block.diagonal(lam), two_block.diagonal(mu_b), F)
        assert report.passed, report.details

        oracle_f = float(np.sum(weights * F(lam)))
        oracle_conjugate = sum(w * _brute_force_conjugate(F, m) for w, m in zip(weights, mu_b))
        oracle_error = 200.0 / 400000 * float(np.sum(weights * mu_b))
        assert report.details["tau_F"] == pytest.approx(oracle_f, rel=1e-9, abs=1e-12)
        assert report.details["lhs"] == pytest.approx(float(np.sum(weights * lam * mu_b)), rel=1e-9, abs=1e-12)
        assert abs(report.details["tau_conjugate"] - oracle_conjugate) <= (
            report.details["grid_error"] + oracle_error + 1e-9
        )


def test_fenchel_young(m2, two_block, generator):
    print("\n=== TESTING FENCHEL-YOUNG ===")
    one = m2.identity()
    report = check_fenchel_young(one, one, ConvexFunction.power(2.0))
    assert report.passed
    assert report.details["lhs"] == pytest.approx(2.0)
    assert report.details["tau_F"] + report.details["tau_conjugate"] == pytest.approx(2.0)

    a, b = generator.pair(two_block, 6, OperatorKind.POSITIVE)
    b = b * (1.0 / operator_norm(b))
    for F in (ConvexFunction.power(1.5), ConvexFunction.exponential(), ConvexFunction.linear(2.0)):
        report = check_fenchel_young(a, b, F)
        print(report.summary())
        assert report.passed, report.details

    sampled = ConvexFunction.from_samples([0.0, 0.5, 1.0, 2.0], [0.0, 0.1, 0.5, 2.0])
    report = check_fenchel_young(a, b, sampled)
    assert report.passed, report.details
    assert report.details["grid_points"] == 2048


def test_fenchel_young_rejects_spectrum_outside_conjugate_domain(m2):
    with pytest.raises(DomainError):
        check_fenchel_young(m2.identity(), m2.diagonal([3, 1]), ConvexFunction.linear(1.0))


def test_counterexample_search_is_reproducible():
    first = find_xy_counterexample(2, 5, seed=3)
    second = find_xy_counterexample(2, 5, seed=3)
    assert first.to_dict() == second.to_dict()
    assert first.details["kind"] == "search"
    with pytest.raises(DomainError):
        find_xy_counterexample(1, 5)


@pytest.mark.slow
def test_counterexample_search_finds_a_witness():
    print("\n=== SEARCHING FOR A |xy| COUNTEREXAMPLE ===")
    report = find_xy_counterexample(2, 10_000, seed=0)
    print(report.summary())
    assert report.passed
    witness = report.witness
    assert witness["xy_star_passes"]
    assert report.worst_margin < 0
