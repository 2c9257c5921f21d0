"""
Hermitian eigendecomposition and the functional calculus built on it.

Covers spectral projections p^h((s, inf)), continuous functional calculus
psi(h), the modulus |z|, polar decomposition, range projections and
Murray-von Neumann equivalence in a direct sum of finite factors.
"""
from dataclasses import dataclass
from typing import Tuple

import numpy as np
import scipy.linalg

from utils.logging_utils import get_logger
from .algebra import (
    Operator,
    TracialAlgebra,
    _require_same_algebra,
    adjoint,
    is_hermitian,
    is_projection,
    operator_norm,
)
from .config import resolve_tolerance
from .errors import DomainError, NotHermitianError, NotInvertibleError, NotPositiveError, NotProjectionError
from .functions import ConjugatePair, ScalarFunction
from .report import VerificationReport

logger = get_logger("semifinite_spectral")


@dataclass(frozen=True, eq=False)
class SpectralDecomposition:
    """
    Eigenpairs of a Hermitian operator.

    eigenvalues, block_index and column_index are aligned global arrays in
    descending eigenvalue order; ties are broken by (block_index,
    column_index). eigenvectors[k] holds the orthonormal eigenvectors of
    block k as columns, ordered by that block's descending eigenvalues.
    """

    algebra: TracialAlgebra
    eigenvalues: np.ndarray
    block_index: np.ndarray
    column_index: np.ndarray
    block_values: Tuple[np.ndarray, ...]
    eigenvectors: Tuple[np.ndarray, ...]

    @property
    def masses(self):
        """Trace weight carried by each eigenpair."""
        weights = np.asarray(self.algebra.weights)
        return weights[self.block_index]

    @property
    def spectral_radius(self):
        return float(np.max(np.abs(self.eigenvalues))) if self.eigenvalues.size else 0.0

    def vector(self, i):
        """(block, eigenvector) of the i-th eigenpair in global order."""
        k = int(self.block_index[i])
        return k, self.eigenvectors[k][:, int(self.column_index[i])]

    def apply(self, fn):
        """Sum of fn(lambda_i) v_i v_i* as an Operator; fn is vectorized."""
        blocks = []
        for values, vectors in zip(self.block_values, self.eigenvectors):
            mapped = np.asarray(fn(values), dtype=np.float64)
            blocks.append((vectors * mapped) @ vectors.conj().T)
        return Operator(self.algebra, tuple(blocks))

    def reconstruct(self):
        return self.apply(lambda values: values)

    def gram_error(self):
        """max_k || V_k* V_k - 1 ||."""
        return max(
            float(np.linalg.norm(v.conj().T @ v - np.eye(v.shape[1]), 2)) for v in self.eigenvectors
        )


@dataclass(frozen=True, eq=False)
class PolarDecomposition:
    """z = w |z| with w a partial isometry supported on ran |z|."""

    partial_isometry: Operator
    modulus: Operator


def eig_hermitian(h, tol=None):
    """
    Eigendecomposition of a Hermitian operator, blockwise via LAPACK.

    Args:
        h: Hermitian Operator
        tol: ToleranceConfig

    Returns:
        SpectralDecomposition in descending order

    Raises:
        NotHermitianError: if h is not Hermitian within tolerance
    """
    tol = resolve_tolerance(tol)
    if not is_hermitian(h, tol):
        raise NotHermitianError("eig_hermitian requires a Hermitian operator")
    block_values, eigenvectors = [], []
    values_all, blocks_all, columns_all = [], [], []
    for k, m in enumerate(h.blocks):
        values, vectors = scipy.linalg.eigh((m + m.conj().T) / 2)
        values, vectors = values[::-1].copy(), vectors[:, ::-1].copy()
        block_values.append(values)
        eigenvectors.append(vectors)
        values_all.append(values)
        blocks_all.append(np.full(values.size, k))
        columns_all.append(np.arange(values.size))
    values_all = np.concatenate(values_all)
    blocks_all = np.concatenate(blocks_all)
    columns_all = np.concatenate(columns_all)
    order = np.lexsort((columns_all, blocks_all, -values_all))
    return SpectralDecomposition(
        algebra=h.algebra,
        eigenvalues=values_all[order],
        block_index=blocks_all[order],
        column_index=columns_all[order],
        block_values=tuple(block_values),
        eigenvectors=tuple(eigenvectors),
    )


def _positive_decomposition(a, tol, zero_floor=False):
    """
    Decompose a positive operator, clamping eigenvalues in [-tol, 0) to 0.

    With zero_floor, eigenvalues at most rank_tol * ||a|| are also set to 0.
    """
    decomposition = eig_hermitian(a, tol)
    radius = decomposition.spectral_radius
    floor = tol.threshold(radius)
    if decomposition.eigenvalues.size and decomposition.eigenvalues[-1] < -floor:
        raise NotPositiveError(
            f"Operator has eigenvalue {decomposition.eigenvalues[-1]:.3e} below -{floor:.3e}"
        )
    cut = tol.rank_tol * radius if zero_floor else 0.0

    def clamp(values):
        values = np.clip(values, 0.0, None)
        values[values <= cut] = 0.0
        return values

    return SpectralDecomposition(
        algebra=decomposition.algebra,
        eigenvalues=clamp(decomposition.eigenvalues.copy()),
        block_index=decomposition.block_index,
        column_index=decomposition.column_index,
        block_values=tuple(clamp(v.copy()) for v in decomposition.block_values),
        eigenvectors=decomposition.eigenvectors,
    )


def functional_calculus(h, psi: ScalarFunction, tol=None):
    """
    psi(h) = sum psi(lambda_i) v_i v_i* for positive h.

    Raises:
        NotPositiveError: if h has an eigenvalue below -tol
        DomainError: if psi is not increasing with psi(0) = 0
    """
    tol = resolve_tolerance(tol)
    decomposition = _positive_decomposition(h, tol)
    psi.check_calculus_ready(decomposition.spectral_radius, tol=tol)
    return decomposition.apply(psi)


def apply_function(h, fn, tol=None):
    """
    fn(h) for positive h with an arbitrary vectorized fn on [0, inf).

    Unlike functional_calculus, fn(0) need not vanish: zero eigenvalues are
    mapped to fn(0) and weighted like any other eigenvalue.
    """
    tol = resolve_tolerance(tol)
    return _positive_decomposition(h, tol).apply(fn)


def power_pos(a, r, tol=None):
    """
    a^r for positive a and r > 0, with 0^r = 0.

    For r < 1 eigenvalues at most rank_tol * ||a|| are treated as 0 so
    rounding noise on the kernel is not amplified.
    """
    tol = resolve_tolerance(tol)
    if not r > 0:
        raise DomainError(f"Power must be positive, got {r!r}")
    decomposition = _positive_decomposition(a, tol, zero_floor=r < 1)
    return decomposition.apply(ScalarFunction.power(r))


def inverse_pos(b, tol=None):
    """b^{-1} for positive invertible b (min eigenvalue > inv_tol)."""
    tol = resolve_tolerance(tol)
    decomposition = _positive_decomposition(b, tol)
    smallest = float(decomposition.eigenvalues[-1])
    if smallest <= tol.inv_tol:
        raise NotInvertibleError(f"Minimum eigenvalue {smallest:.3e} does not exceed {tol.inv_tol:.1e}")
    return decomposition.apply(lambda values: 1.0 / values)


def min_eigenvalue(h, tol=None):
    """Smallest eigenvalue of a Hermitian operator over all blocks."""
    return float(eig_hermitian(h, tol).eigenvalues[-1])


def _svd_blocks(z):
    return [scipy.linalg.svd(m) for m in z.blocks]


def abs_power(x, r, tol=None):
    """
    |x|^r = (x*x)^{r/2}, computed from the singular value decomposition.

    Singular values at most rank_tol * ||x|| are treated as 0.
    """
    tol = resolve_tolerance(tol)
    if not r > 0:
        raise DomainError(f"Power must be positive, got {r!r}")
    factors = _svd_blocks(x)
    top = max((float(s[0]) for _, s, _ in factors if s.size), default=0.0)
    cut = tol.rank_tol * top
    blocks = []
    for _, s, vh in factors:
        s = np.where(s > cut, s, 0.0)
        blocks.append((vh.conj().T * np.power(s, r)) @ vh)
    return Operator(x.algebra, tuple(blocks))


def abs_op(z, tol=None):
    """|z| = (z*z)^{1/2}."""
    return abs_power(z, 1.0, tol)


def polar(z, tol=None):
    """
    Polar decomposition z = w|z|.

    w = z |z|^+ with the pseudo-inverse taken on singular values above
    rank_tol * ||z||, so w is zero on ker |z| and w*w = R[|z|].
    """
    tol = resolve_tolerance(tol)
    factors = _svd_blocks(z)
    top = max((float(s[0]) for _, s, _ in factors if s.size), default=0.0)
    cut = tol.rank_tol * top
    isometry_blocks, modulus_blocks = [], []
    for u, s, vh in factors:
        keep = s > cut
        isometry_blocks.append(u[:, keep] @ vh[keep, :])
        modulus_blocks.append((vh.conj().T * np.where(keep, s, 0.0)) @ vh)
    return PolarDecomposition(
        partial_isometry=Operator(z.algebra, tuple(isometry_blocks)),
        modulus=Operator(z.algebra, tuple(modulus_blocks)),
    )


def _projection_above(decomposition, cut):
    return decomposition.apply(lambda values: (values > cut).astype(np.float64))


def spectral_projection(h, s, tol=None):
    """
    p^h((s, inf)): projection onto eigenvectors with eigenvalue > s + eig_tie_tol * ||h||.
    """
    tol = resolve_tolerance(tol)
    decomposition = eig_hermitian(h, tol)
    return _projection_above(decomposition, s + tol.eig_tie_tol * decomposition.spectral_radius)


def range_projection(x, tol=None):
    """
    R[x]: projection onto the left singular vectors with singular value > rank_tol * ||x||.
    """
    tol = resolve_tolerance(tol)
    factors = _svd_blocks(x)
    top = max((float(s[0]) for _, s, _ in factors if s.size), default=0.0)
    cut = tol.rank_tol * top
    blocks = []
    for u, s, _ in factors:
        keep = s > cut
        blocks.append(u[:, keep] @ u[:, keep].conj().T)
    return Operator(x.algebra, tuple(blocks))


def block_ranks(e, tol=None):
    """Per-block rank of a projection: number of eigenvalues above 1/2."""
    tol = resolve_tolerance(tol)
    if not is_projection(e, tol):
        raise NotProjectionError("block_ranks requires a projection")
    return tuple(int(np.sum(scipy.linalg.eigvalsh((m + m.conj().T) / 2) > 0.5)) for m in e.blocks)


def mvn_equivalent(e, f, tol=None):
    """
    Murray-von Neumann equivalence in a direct sum of finite factors:
    e ~ f iff rank(e_k) = rank(f_k) in every block.
    """
    tol = resolve_tolerance(tol)
    _require_same_algebra(e, f)
    return block_ranks(e, tol) == block_ranks(f, tol)


def young_combination(x, y, pq: ConjugatePair, tol=None):
    """p^{-1}|x|^p + q^{-1}|y|^q."""
    return (1.0 / pq.p) * abs_power(x, pq.p, tol) + (1.0 / pq.q) * abs_power(y, pq.q, tol)


def check_polar_identity(x, y, tol=None):
    """
    |xy*| = w | |x||y| | w* where y = w|y| is the polar decomposition of y.
    """
    tol = resolve_tolerance(tol)
    w = polar(y, tol).partial_isometry
    lhs = abs_op(x @ adjoint(y), tol)
    rhs = w @ abs_op(abs_op(x, tol) @ abs_op(y, tol), tol) @ adjoint(w)
    distance = operator_norm(lhs - rhs)
    return VerificationReport.evaluate(
        "polar_identity", -distance, max(operator_norm(lhs), operator_norm(rhs)), tol, distance=distance
    )


def check_equivalence_construction(b, e, tol=None):
    """
    For invertible positive b and a projection e, with v from the polar
    decomposition of b^{-1}e: v*v = R[e b^{-1}] and vv* = R[b^{-1}e], so e ~ R[b^{-1}e].
    """
    tol = resolve_tolerance(tol)
    if not is_projection(e, tol):
        raise NotProjectionError("check_equivalence_construction requires a projection e")
    b_inv = inverse_pos(b, tol)
    z = b_inv @ e
    v = polar(z, tol).partial_isometry
    initial = range_projection(e @ b_inv, tol)
    final = range_projection(z, tol)
    initial_error = operator_norm(adjoint(v) @ v - initial)
    final_error = operator_norm(v @ adjoint(v) - final)
    return VerificationReport.evaluate(
        "equivalence_construction",
        -max(initial_error, final_error),
        1.0,
        tol,
        conditions={
            "initial_is_e": operator_norm(initial - e) <= tol.threshold(1.0),
            "e_equivalent_to_range": mvn_equivalent(e, final, tol),
        },
        initial_error=initial_error,
        final_error=final_error,
    )
