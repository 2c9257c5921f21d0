"""
Tests for block algebras, operator arithmetic, predicates and operator documents.
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

from semifinite.algebra import (
    TracialAlgebra,
    add,
    adjoint,
    check_faithfulness,
    check_traciality,
    inverse,
    is_hermitian,
    is_positive,
    is_projection,
    load_operator,
    multiply,
    operator_from_dict,
    operator_norm,
    operator_to_dict,
    operators_close,
    power_int,
    save_operator,
    scale,
    trace,
    trace_commutation_check,
)
from semifinite.errors import AlgebraMismatchError, ConfigError, MalformedOperatorError, NotInvertibleError
from semifinite.generators import OperatorKind


def test_trace_examples(m2):
    """tau(1) = sum w_k n_k and the weighted trace of a diagonal."""
    print("\n=== TESTING WEIGHTED TRACE ===")
    assert trace(m2.identity()).real == pytest.approx(2.0)
    assert trace(m2.diagonal([3, 1])).real == pytest.approx(4.0)
    half = TracialAlgebra.factor(2, weight=0.5)
    assert trace(half.diagonal([3, 1])).real == pytest.approx(2.0)
    assert m2.total_trace == 2.0


def test_two_block_total_trace(two_block):
    assert two_block.total_trace == pytest.approx(0.5 * 2 + 1.5 * 3)
    assert two_block.dims == (2, 3)
    assert not two_block.is_factor
    assert two_block.normalized().total_trace == pytest.approx(1.0)


def test_adjoint_and_multiply(m2, e12):
    one = m2.identity()
    assert operators_close(adjoint(one), one)
    assert operators_close(multiply(e12, one), e12)
    assert np.array_equal(adjoint(e12).blocks[0], np.array([[0, 0], [1, 0]], dtype=complex))


def test_predicates(m2, e12):
    one = m2.identity()
    assert is_hermitian(one) and is_positive(one) and is_projection(one)
    signed = m2.diagonal([1, -1])
    assert is_hermitian(signed)
    assert not is_positive(signed)
    assert not is_hermitian(e12)


def test_trace_commutation(m2, e12, generator):
    print("\n=== TESTING TRACE COMMUTATION ===")
    hermitian = generator.operator(m2, 0, OperatorKind.HERMITIAN)
    report = trace_commutation_check(hermitian, k=2)
    assert report.passed
    assert report.details["difference"] == pytest.approx(0.0, abs=1e-12)

    report = trace_commutation_check(e12, k=1)
    assert report.passed
    assert report.details["left"] == pytest.approx(1.0)
    assert report.details["right"] == pytest.approx(1.0)

    x = generator.operator(TracialAlgebra.factor(4), 1)
    report = trace_commutation_check(x, k=3)
    print(report.summary())
    assert report.passed

    with pytest.raises(ConfigError):
        trace_commutation_check(x, k=0)


def test_traciality_and_faithfulness(two_block, generator):
    x, y = generator.pair(two_block, 3)
    assert check_traciality(x, y).passed
    assert check_faithfulness(x).passed

    zero = check_faithfulness(two_block.zero())
    assert zero.passed
    assert zero.details["conditions"]["zero_iff_zero"]
    assert zero.details["trace"] == 0.0


def test_faithfulness_of_small_operators_in_light_blocks():
    """tau(x*x) and ||x||^2 differ by the block weight; tiny nonzero x is still faithful."""
    light = TracialAlgebra.factor(2, weight=0.01)
    report = check_faithfulness(light.diagonal([7e-6, 0]))
    print(report.summary())
    assert report.passed
    assert report.details["conditions"]["zero_iff_zero"]
    assert report.details["trace"] == pytest.approx(4.9e-13)

    big = TracialAlgebra.factor(8)
    report = check_faithfulness(big.identity() * 3e-7)
    assert report.passed
    assert report.details["trace"] == pytest.approx(8 * 9e-14)


def test_malformed_operators(m2, two_block):
    with pytest.raises(MalformedOperatorError):
        m2.operator([np.eye(3)])
    with pytest.raises(MalformedOperatorError):
        m2.operator([np.eye(2), np.eye(2)])
    with pytest.raises(MalformedOperatorError):
        m2.operator([[[np.nan, 0], [0, 1]]])
    with pytest.raises(MalformedOperatorError):
        m2.diagonal([1, 2, 3])
    with pytest.raises(AlgebraMismatchError):
        m2.identity() @ two_block.identity()


def test_invalid_algebras():
    with pytest.raises(ConfigError):
        TracialAlgebra.from_specs([(0, 1.0)])
    with pytest.raises(ConfigError):
        TracialAlgebra.from_specs([(2, 0.0)])
    with pytest.raises(ConfigError):
        TracialAlgebra.from_specs([(2, math.inf)])
    with pytest.raises(ConfigError):
        TracialAlgebra.from_specs([])
    with pytest.raises(ConfigError):
        TracialAlgebra.factor(1000)


def test_operators_are_immutable(m2):
    x = m2.diagonal([3, 1])
    with pytest.raises(ValueError):
        x.blocks[0][0, 0] = 5


def test_operator_file_is_bit_exact(two_block, generator, tmp_path):
    """Saving and loading reproduces every entry exactly."""
    print("\n=== TESTING OPERATOR DOCUMENTS ===")
    x = generator.operator(two_block, 11)
    path = save_operator(x, tmp_path / "x.json")
    print(f"Saved operator to {path}")
    loaded = load_operator(path)
    assert loaded.algebra == x.algebra
    for original, restored in zip(x.blocks, loaded.blocks):
        assert np.array_equal(original, restored)


def test_operator_document_accepts_nested_rows(m2):
    document = {
        "blocks": [{"dim": 2, "weight": 1.0}],
        "matrices": [[[[0, 0], [1, 0]], [[0, 0], [0, 0]]]],
    }
    x = operator_from_dict(document)
    assert x.blocks[0][0, 1] == 1
    assert operator_to_dict(x)["matrices"][0][1] == [1.0, 0.0]


def test_malformed_documents(tmp_path):
    with pytest.raises(MalformedOperatorError):
        operator_from_dict({"blocks": [{"dim": 2, "weight": 1.0}]})
    with pytest.raises(MalformedOperatorError):
        operator_from_dict({"blocks": [{"dim": 2, "weight": 1.0}], "matrices": [[[1, 0], [0, 0]]]})
    corrupted = tmp_path / "broken.json"
    corrupted.write_text('{"blocks": [')
    with pytest.raises(MalformedOperatorError):
        load_operator(corrupted)


def test_add_scale_and_powers(m2, e12):
    a = m2.diagonal([3, 1])
    assert operators_close(add(a, scale(2.0, a)), m2.diagonal([9, 3]))
    assert operators_close(power_int(a, 3), m2.diagonal([27, 1]))
    assert operators_close(power_int(a, 0), m2.identity())
    assert operators_close(power_int(e12, 2), m2.zero())
    with pytest.raises(ConfigError):
        power_int(a, 1.5)


def test_inverse(m2):
    assert operators_close(inverse(m2.diagonal([4, 2])), m2.diagonal([0.25, 0.5]))
    with pytest.raises(NotInvertibleError):
        inverse(m2.diagonal([1, 0]))


def test_operator_norm_is_submultiplicative(two_block, generator):
    for trial in range(5):
        x, y = generator.pair(two_block, trial)
        assert operator_norm(x @ y) <= operator_norm(x) * operator_norm(y) * (1 + 1e-12)
    assert operator_norm(two_block.diagonal([1, -4, 2, 0, 3])) == pytest.approx(4.0)
