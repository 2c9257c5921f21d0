"""
Tests for weak majorization, the spectral pre-order, the unitary correction and log-majorization.
"""
import sys
from pathlib import Path

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

# Add the src directory to the Python path
project_root = Path(__file__).parent.parent
src_path = project_root / "src"
sys.path.insert(0, str(src_path))

from semifinite.algebra import TracialAlgebra, adjoint, operators_close
from semifinite.errors import NotAFactorError, NotPositiveError
from semifinite.functions import ConjugatePair
from semifinite.generators import OperatorKind
from semifinite.majorization import (
    check_agm_integrals,
    check_log_majorization,
    check_submajorization,
    check_young_majorization,
    check_young_preorder,
    doubly_stochastic_correction,
    majorization_margin,
    spectral_preorder,
    weak_majorize,
)
from semifinite.snumbers import StepFunction

step_functions = st.lists(
    st.tuples(st.floats(min_value=0.01, max_value=10.0), st.floats(min_value=0.05, max_value=3.0)),
    min_size=1,
    max_size=6,
).map(lambda pairs: StepFunction.from_masses([v for v, _ in pairs], [m for _, m in pairs]))


def test_weak_majorize_examples():
    print("\n=== TESTING WEAK MAJORIZATION ===")
    flat = StepFunction.indicator(2.0, 1.0)
    tall = StepFunction.indicator(1.0, 2.0)
    assert weak_majorize(flat, flat)
    assert weak_majorize(flat, tall)
    assert not weak_majorize(tall, flat)
    margin, s = majorization_margin(tall, flat)
    print(f"Worst margin {margin} at s={s}")
    assert margin == pytest.approx(-1.0)
    assert s == pytest.approx(1.0)


def test_weak_majorize_beyond_supports():
    """A longer support can lose majorization only after the shorter one ends."""
    assert not weak_majorize(StepFunction.indicator(3.0, 1.0), StepFunction.indicator(1.0, 2.0))


@settings(max_examples=50, deadline=None)
@given(f=step_functions, g=step_functions, h=step_functions)
def test_weak_majorize_is_a_preorder(f, g, h):
    assert weak_majorize(f, f)
    if majorization_margin(f, g)[0] >= 0 and majorization_margin(g, h)[0] >= 0:
        assert weak_majorize(f, h)


def test_submajorization(m2, generator):
    x = generator.operator(m2, 0)
    report = check_submajorization(x, m2.identity())
    assert report.passed
    assert report.worst_margin == pytest.approx(0.0, abs=1e-12)

    assert check_submajorization(m2.diagonal([3, 1]), m2.diagonal([2, 1])).passed

    algebra = TracialAlgebra.factor(4)
    for trial in range(5):
        assert check_submajorization(*generator.pair(algebra, trial)).passed


def test_spectral_preorder_examples(m2, two_block):
    a = m2.diagonal([2, 1])
    assert spectral_preorder(a, a)
    assert spectral_preorder(m2.diagonal([1, 0]), m2.diagonal([2, 1]))
    assert not spectral_preorder(m2.diagonal([2, 2]), m2.diagonal([3, 0]))
    with pytest.raises(NotAFactorError):
        spectral_preorder(two_block.identity(), two_block.identity())
    with pytest.raises(NotPositiveError):
        spectral_preorder(m2.diagonal([1, -1]), m2.identity())


def test_spectral_preorder_agrees_with_pointwise_domination(generator):
    algebra = TracialAlgebra.factor(3)
    for trial in range(10):
        a = generator.operator(algebra, trial, OperatorKind.POSITIVE)
        b = a + algebra.identity() * 0.05
        assert spectral_preorder(a, b)
        assert not spectral_preorder(b, a)


def test_young_preorder(m2, generator):
    one = m2.identity()
    pq = ConjugatePair.from_p(2.0)
    assert check_young_preorder(one, one, pq).passed
    assert check_young_preorder(m2.diagonal([4, 1]), m2.diagonal([2, 1]), pq).passed
    algebra = TracialAlgebra.factor(4)
    for trial in range(5):
        x, y = generator.pair(algebra, trial)
        assert check_young_preorder(x, y, ConjugatePair.from_p(generator.exponent(trial))).passed


def test_doubly_stochastic_correction(m2, generator):
    print("\n=== TESTING DOUBLY STOCHASTIC CORRECTION ===")
    one = m2.identity()
    u, report = doubly_stochastic_correction(one, one, ConjugatePair.from_p(2.0))
    assert report.passed
    assert operators_close(adjoint(u) @ u, one)
    assert report.details["min_eigenvalue"] == pytest.approx(0.0, abs=1e-12)

    algebra = TracialAlgebra.factor(4)
    for trial in range(10):
        x, y = generator.pair(algebra, trial)
        u, report = doubly_stochastic_correction(x, y, ConjugatePair.from_p(1.5))
        print(report.summary())
        assert report.passed, report.details
        assert report.details["conditions"]["unitary"]
        assert report.details["conditions"]["trace_preserved"]


def test_doubly_stochastic_correction_requires_factor(two_block):
    one = two_block.identity()
    with pytest.raises(NotAFactorError):
        doubly_stochastic_correction(one, one, ConjugatePair.from_p(2.0))


def test_log_majorization(m2, two_block, generator):
    a = m2.diagonal([3, 1])
    report = check_log_majorization(a, m2.identity())
    assert report.passed
    assert report.worst_margin == pytest.approx(0.0, abs=1e-12)
    assert check_log_majorization(a, m2.diagonal([2, 0.5])).passed

    for trial in range(5):
        assert check_log_majorization(*generator.pair(two_block, trial, OperatorKind.POSITIVE)).passed

    with pytest.raises(NotPositiveError):
        check_log_majorization(m2.diagonal([1, -1]), m2.identity())


def test_young_majorization_and_agm_integrals(two_block, generator):
    for trial in range(5):
        x, y = generator.pair(two_block, trial)
        report = check_young_majorization(x, y, ConjugatePair.from_p(3.0))
        assert report.passed, report.details
        assert report.details["conditions"]["implication"]
        a, b = generator.pair(two_block, trial, OperatorKind.POSITIVE)
        report = check_agm_integrals(a, b)
        assert report.passed, report.details
