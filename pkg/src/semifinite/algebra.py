"""
Finite-dimensional semifinite von Neumann algebras with a weighted trace.

An algebra is a direct sum of full matrix blocks M_{n_1} + ... + M_{n_k}
with trace tau(x) = sum_k w_k Tr(x_k). Operators are immutable tuples of
dense complex blocks.
"""
import json
import math
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, Sequence, Tuple

import numpy as np
import scipy.linalg

from utils.logging_utils import get_logger
from .config import default_limits, resolve_tolerance
from .errors import AlgebraMismatchError, ConfigError, MalformedOperatorError, NotInvertibleError
from .report import VerificationReport

logger = get_logger("semifinite_algebra")


@dataclass(frozen=True)
class Block:
    """One matrix summand M_dim with trace weight `weight`."""

    dim: int
    weight: float


@dataclass(frozen=True)
class TracialAlgebra:
    """
    M = sum_k M_{n_k}(C) with the faithful trace tau(x) = sum_k w_k Tr(x_k).

    Structural equality: two algebras are the same when their block lists
    match exactly.
    """

    blocks: Tuple[Block, ...]

    def __post_init__(self):
        limits = default_limits()
        normalized = []
        for block in self.blocks:
            dim, weight = (block.dim, block.weight) if isinstance(block, Block) else tuple(block)
            if int(dim) != dim or dim < 1:
                raise ConfigError(f"Block dimension must be a positive integer, got {dim!r}")
            if dim > limits.max_block_dim:
                raise ConfigError(f"Block dimension {dim} exceeds the limit {limits.max_block_dim}")
            if not math.isfinite(weight) or weight <= 0:
                raise ConfigError(f"Block weight must be finite and positive, got {weight!r}")
            normalized.append(Block(int(dim), float(weight)))
        if not normalized:
            raise ConfigError("An algebra needs at least one block")
        if len(normalized) > limits.max_blocks:
            raise ConfigError(f"{len(normalized)} blocks exceed the limit {limits.max_blocks}")
        object.__setattr__(self, "blocks", tuple(normalized))

    @classmethod
    def from_specs(cls, specs: Iterable[Sequence[float]]):
        """Build from (dim, weight) pairs."""
        return cls(tuple(Block(int(dim), float(weight)) for dim, weight in specs))

    @classmethod
    def factor(cls, dim, weight=1.0):
        """The type I_n factor M_dim with trace weight * Tr."""
        return cls((Block(dim, weight),))

    @property
    def dims(self):
        return tuple(b.dim for b in self.blocks)

    @property
    def weights(self):
        return tuple(b.weight for b in self.blocks)

    @property
    def total_dim(self):
        return sum(self.dims)

    @property
    def total_trace(self):
        """tau(1) = sum_k w_k n_k."""
        return math.fsum(b.weight * b.dim for b in self.blocks)

    @property
    def is_factor(self):
        return len(self.blocks) == 1

    def normalized(self):
        """Same block structure with weights rescaled so that tau(1) = 1 (a tracial state)."""
        total = self.total_trace
        return TracialAlgebra(tuple(Block(b.dim, b.weight / total) for b in self.blocks))

    def identity(self):
        return Operator(self, tuple(np.eye(b.dim, dtype=np.complex128) for b in self.blocks))

    def zero(self):
        return Operator(self, tuple(np.zeros((b.dim, b.dim), dtype=np.complex128) for b in self.blocks))

    def diagonal(self, values):
        """
        Diagonal operator from the concatenated diagonal over all blocks.

        Args:
            values: Sequence of length total_dim

        Returns:
            Operator
        """
        values = np.asarray(values, dtype=np.complex128).ravel()
        if values.size != self.total_dim:
            raise MalformedOperatorError(f"Expected {self.total_dim} diagonal entries, got {values.size}")
        offsets = np.cumsum((0,) + self.dims)
        return Operator(self, tuple(np.diag(values[offsets[k]:offsets[k + 1]]) for k in range(len(self.blocks))))

    def operator(self, matrices):
        return Operator(self, tuple(matrices))

    def to_dict(self):
        return [{"dim": b.dim, "weight": b.weight} for b in self.blocks]


@dataclass(frozen=True, eq=False)
class Operator:
    """
    Block-diagonal element of a TracialAlgebra.

    Blocks are copied to read-only complex128 arrays on construction. Use
    operators_close for (tolerance-based) equality.
    """

    algebra: TracialAlgebra
    blocks: Tuple[np.ndarray, ...]

    def __post_init__(self):
        if len(self.blocks) != len(self.algebra.blocks):
            raise MalformedOperatorError(
                f"Operator has {len(self.blocks)} blocks, algebra has {len(self.algebra.blocks)}"
            )
        arrays = []
        for k, (spec, matrix) in enumerate(zip(self.algebra.blocks, self.blocks)):
            array = np.array(matrix, dtype=np.complex128)
            if array.shape != (spec.dim, spec.dim):
                raise MalformedOperatorError(
                    f"Block {k} has shape {array.shape}, expected {(spec.dim, spec.dim)}"
                )
            if not np.all(np.isfinite(array)):
                raise MalformedOperatorError(f"Block {k} contains NaN or Inf entries")
            array.setflags(write=False)
            arrays.append(array)
        object.__setattr__(self, "blocks", tuple(arrays))

    def map_blocks(self, fn):
        """Apply fn to every block and wrap the result in the same algebra."""
        return Operator(self.algebra, tuple(fn(m) for m in self.blocks))

    def adjoint(self):
        return adjoint(self)

    def __add__(self, other):
        return add(self, other)

    def __sub__(self, other):
        return add(self, scale(-1.0, other))

    def __neg__(self):
        return scale(-1.0, self)

    def __matmul__(self, other):
        return multiply(self, other)

    def __mul__(self, c):
        return scale(c, self)

    __rmul__ = __mul__

    def __repr__(self):
        return f"Operator(dims={self.algebra.dims}, weights={self.algebra.weights})"


def _require_same_algebra(x, y):
    if x.algebra != y.algebra:
        raise AlgebraMismatchError(
            f"Operands live in different algebras: {x.algebra.to_dict()} vs {y.algebra.to_dict()}"
        )


def trace(x):
    """
    tau(x) = sum_k w_k Tr(x_k).

    Returns:
        complex scalar (real part is exact for Hermitian x up to rounding)
    """
    return complex(sum(b.weight * np.trace(m) for b, m in zip(x.algebra.blocks, x.blocks)))


def adjoint(x):
    return x.map_blocks(lambda m: m.conj().T)


def multiply(x, y):
    _require_same_algebra(x, y)
    return Operator(x.algebra, tuple(a @ b for a, b in zip(x.blocks, y.blocks)))


def add(x, y):
    _require_same_algebra(x, y)
    return Operator(x.algebra, tuple(a + b for a, b in zip(x.blocks, y.blocks)))


def scale(c, x):
    return x.map_blocks(lambda m: c * m)


def power_int(x, k):
    """x^k for a nonnegative integer k, blockwise."""
    if int(k) != k or k < 0:
        raise ConfigError(f"Integer power must be a nonnegative integer, got {k!r}")
    return x.map_blocks(lambda m: np.linalg.matrix_power(m, int(k)))


def operator_norm(x):
    """
    ||x|| as the square root of the largest eigenvalue of x*x over all blocks.
    """
    top = 0.0
    for m in x.blocks:
        gram = m.conj().T @ m
        eigenvalues = scipy.linalg.eigvalsh((gram + gram.conj().T) / 2)
        top = max(top, float(eigenvalues[-1]))
    return math.sqrt(max(top, 0.0))


def inverse(x):
    """Blockwise inverse."""
    try:
        return x.map_blocks(scipy.linalg.inv)
    except (np.linalg.LinAlgError, ValueError) as e:
        raise NotInvertibleError(f"Operator is not invertible: {e}") from e


def operators_close(x, y, tol=None):
    """||x - y|| <= abs_tol + rel_tol * max(||x||, ||y||)."""
    tol = resolve_tolerance(tol)
    _require_same_algebra(x, y)
    return operator_norm(x - y) <= tol.threshold(max(operator_norm(x), operator_norm(y)))


def _hermitian_part_min_eigenvalue(x):
    return min(float(scipy.linalg.eigvalsh((m + m.conj().T) / 2)[0]) for m in x.blocks)


def is_hermitian(x, tol=None):
    tol = resolve_tolerance(tol)
    return operator_norm(x - adjoint(x)) <= tol.threshold(operator_norm(x))


def is_positive(x, tol=None):
    """Hermitian with min eigenvalue >= -(abs_tol + rel_tol * ||x||)."""
    tol = resolve_tolerance(tol)
    if not is_hermitian(x, tol):
        return False
    return _hermitian_part_min_eigenvalue(x) >= -tol.threshold(operator_norm(x))


def is_projection(x, tol=None):
    """Hermitian and idempotent within tolerance."""
    tol = resolve_tolerance(tol)
    if not is_hermitian(x, tol):
        return False
    return operator_norm(x @ x - x) <= tol.threshold(max(operator_norm(x), 1.0))


def trace_commutation_check(x, k=1, tol=None):
    """
    Compare tau((x*x)^k) with tau((xx*)^k).

    Args:
        x: Operator
        k: Positive integer power
        tol: ToleranceConfig

    Returns:
        VerificationReport with margin -|difference|
    """
    if int(k) != k or k < 1:
        raise ConfigError(f"k must be a positive integer, got {k!r}")
    xs = adjoint(x)
    left = trace(power_int(xs @ x, k))
    right = trace(power_int(x @ xs, k))
    difference = abs(left - right)
    return VerificationReport.evaluate(
        "trace_commutation",
        -difference,
        max(abs(left), abs(right)),
        tol,
        k=int(k),
        left=left.real,
        right=right.real,
        difference=difference,
    )


def check_traciality(x, y, tol=None):
    """tau(xy) = tau(yx) with slack rel_tol * ||x|| ||y|| tau(1)."""
    _require_same_algebra(x, y)
    difference = abs(trace(x @ y) - trace(y @ x))
    scale_ = operator_norm(x) * operator_norm(y) * x.algebra.total_trace
    return VerificationReport.evaluate("traciality", -difference, scale_, tol, difference=difference)


def check_faithfulness(x, tol=None):
    """
    tau(x*x) >= 0, and tau(x*x) = 0 only when x = 0.

    The zero test is the sandwich min_k w_k ||x||^2 <= tau(x*x) <= tau(1) ||x||^2,
    which makes tau(x*x) vanish exactly when x does, whatever the block weights.
    """
    tol = resolve_tolerance(tol)
    algebra = x.algebra
    value = trace(adjoint(x) @ x)
    norm = operator_norm(x)
    lower = min(algebra.weights) * norm ** 2
    upper = algebra.total_trace * norm ** 2
    threshold = tol.threshold(upper)
    return VerificationReport.evaluate(
        "faithfulness",
        value.real,
        value.real,
        tol,
        conditions={
            "real": abs(value.imag) <= tol.threshold(value.real),
            "zero_iff_zero": lower - threshold <= value.real <= upper + threshold,
        },
        trace=value.real,
        norm=norm,
        lower_bound=lower,
        upper_bound=upper,
    )


# Serialization -------------------------------------------------------------

def operator_to_dict(x):
    """
    {"blocks": [{"dim", "weight"}], "matrices": [[[re, im], ...], ...]}

    Each matrix is the row-major list of its entries. Floats are written with
    Python's shortest round-trip repr, so a save/load cycle is bit-exact.
    """
    return {
        "blocks": x.algebra.to_dict(),
        "matrices": [[[float(v.real), float(v.imag)] for v in m.ravel()] for m in x.blocks],
    }


def operator_from_dict(data):
    """Inverse of operator_to_dict; also accepts nested row lists per block."""
    try:
        algebra = TracialAlgebra.from_specs((b["dim"], b["weight"]) for b in data["blocks"])
        raw_matrices = data["matrices"]
    except (KeyError, TypeError) as e:
        raise MalformedOperatorError(f"Operator document is missing fields: {e}") from e
    if len(raw_matrices) != len(algebra.blocks):
        raise MalformedOperatorError(
            f"Document has {len(raw_matrices)} matrices for {len(algebra.blocks)} blocks"
        )
    matrices = []
    for spec, raw in zip(algebra.blocks, raw_matrices):
        try:
            pairs = np.asarray(raw, dtype=np.float64).reshape(-1, 2)
        except (ValueError, TypeError) as e:
            raise MalformedOperatorError(f"Matrix entries must be [re, im] pairs: {e}") from e
        if pairs.shape[0] != spec.dim * spec.dim:
            raise MalformedOperatorError(
                f"Block of dim {spec.dim} needs {spec.dim * spec.dim} entries, got {pairs.shape[0]}"
            )
        matrices.append((pairs[:, 0] + 1j * pairs[:, 1]).reshape(spec.dim, spec.dim))
    return Operator(algebra, tuple(matrices))


def save_operator(x, path):
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(json.dumps(operator_to_dict(x), indent=2))
    logger.info(f"Wrote operator {x!r} to {path}")
    return path


def load_operator(path):
    path = Path(path)
    try:
        data = json.loads(path.read_text())
    except json.JSONDecodeError as e:
        raise MalformedOperatorError(f"{path} is not valid JSON: {e}") from e
    return operator_from_dict(data)
