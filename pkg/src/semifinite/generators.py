"""
Seeded random operators for campaigns and tests.

Every draw comes from its own counter-based generator keyed by
(seed, trial, stream), so results do not depend on evaluation order or on
how trials are spread over worker threads.
"""
from enum import Enum

import numpy as np
import scipy.linalg

from utils.logging_utils import get_logger
from .algebra import Operator, TracialAlgebra, operator_norm
from .errors import ConfigError
from .spectral import eig_hermitian, spectral_projection


class OperatorKind(str, Enum):
    GENERAL = "general"
    HERMITIAN = "hermitian"
    POSITIVE = "positive"
    PROJECTION = "projection"
    UNITARY = "unitary"
    INVERTIBLE_POSITIVE = "invertible_positive"


INVERTIBLE_SHIFT = 0.1

# Streams per trial: role * STREAMS_PER_ROLE + kind index, so x and y of the
# same kind never share a generator.
STREAMS_PER_ROLE = 16
EXPONENT_STREAM = 1000


def trial_rng(seed, trial, stream=0):
    """Philox generator keyed by (seed, trial, stream)."""
    return np.random.Generator(np.random.Philox(np.random.SeedSequence([int(seed), int(trial), int(stream)])))


def crandn(rng, shape):
    """Standard complex Gaussian samples."""
    return (rng.standard_normal(shape) + 1j * rng.standard_normal(shape)) / np.sqrt(2)


def haar_unitary(rng, dim):
    """Haar-distributed unitary from the QR factorization of a complex Gaussian matrix."""
    q, r = scipy.linalg.qr(crandn(rng, (dim, dim)))
    d = np.diag(r)
    return q * (d / np.abs(d))


def gen_operator(rng, algebra: TracialAlgebra, kind):
    """
    Draw one operator of the requested kind.

    Args:
        rng: numpy Generator
        algebra: Target algebra
        kind: OperatorKind or its string value

    Returns:
        Operator
    """
    try:
        kind = OperatorKind(kind)
    except ValueError as e:
        raise ConfigError(f"Unknown operator kind {kind!r}") from e
    if kind is OperatorKind.UNITARY:
        return Operator(algebra, tuple(haar_unitary(rng, b.dim) for b in algebra.blocks))
    z = Operator(algebra, tuple(crandn(rng, (b.dim, b.dim)) for b in algebra.blocks))
    if kind is OperatorKind.GENERAL:
        return z
    if kind is OperatorKind.HERMITIAN:
        return (z + z.adjoint()) * 0.5
    if kind is OperatorKind.PROJECTION:
        h = (z + z.adjoint()) * 0.5
        return spectral_projection(h, float(np.median(eig_hermitian(h).eigenvalues)))
    positive = z.adjoint() @ z
    positive = positive * (1.0 / operator_norm(positive))
    positive = (positive + positive.adjoint()) * 0.5
    if kind is OperatorKind.POSITIVE:
        return positive
    return positive + algebra.identity() * INVERTIBLE_SHIFT


class RandomOperatorGenerator:
    """
    Reproducible operator source for one campaign seed.

    The same (seed, trial, kind, role) always yields a bit-identical operator.
    """

    def __init__(self, seed: int):
        """
        Args:
            seed: 64-bit unsigned campaign seed
        """
        if seed < 0:
            raise ConfigError(f"Seed must be nonnegative, got {seed}")
        self.seed = seed
        self.logger = get_logger("semifinite_generator")

    def rng(self, trial, stream=0):
        return trial_rng(self.seed, trial, stream)

    def operator(self, algebra, trial, kind=OperatorKind.GENERAL, role=0):
        """
        Args:
            algebra: Target algebra
            trial: Trial index
            kind: OperatorKind
            role: Distinguishes independent operators of the same trial (0 for x, 1 for y, ...)

        Returns:
            Operator
        """
        kind = OperatorKind(kind)
        stream = role * STREAMS_PER_ROLE + list(OperatorKind).index(kind)
        return gen_operator(self.rng(trial, stream), algebra, kind)

    def pair(self, algebra, trial, kind=OperatorKind.GENERAL):
        """Independent (x, y) for one trial."""
        return self.operator(algebra, trial, kind, 0), self.operator(algebra, trial, kind, 1)

    def exponent(self, trial, low=1.1, high=4.0):
        """p uniform in [low, high)."""
        return float(self.rng(trial, EXPONENT_STREAM).uniform(low, high))

    def partial_isometry(self, algebra, trial, role=2):
        """Unitary times a random coordinate projection."""
        rng = self.rng(trial, role * STREAMS_PER_ROLE + len(OperatorKind))
        blocks = []
        for b in algebra.blocks:
            u = haar_unitary(rng, b.dim)
            mask = rng.random(b.dim) < 0.5
            mask[0] = True
            blocks.append(u * mask)
        return Operator(algebra, tuple(blocks))
