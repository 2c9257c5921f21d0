"""
Numerical configuration for the semifinite toolkit.

This module provides the tolerance and size settings shared by every
operation. Values come from constructor arguments, then from environment
variables (a local .env file is honoured), then from the defaults below.
"""
import os
from dataclasses import dataclass, fields, replace
from functools import lru_cache

from dotenv import load_dotenv

from utils.logging_utils import get_logger
from .errors import ConfigError

load_dotenv()

logger = get_logger("semifinite_config")


def _env_float(name, default):
    raw = os.environ.get(name)
    if raw is None or raw == "":
        return default
    try:
        return float(raw)
    except ValueError as e:
        raise ConfigError(f"{name} must be a real number, got {raw!r}") from e


def _env_int(name, default):
    raw = os.environ.get(name)
    if raw is None or raw == "":
        return default
    try:
        return int(raw)
    except ValueError as e:
        raise ConfigError(f"{name} must be an integer, got {raw!r}") from e


@dataclass(frozen=True)
class ToleranceConfig:
    """
    Tolerances used by predicates, spectral cuts and every inequality check.

    A comparison "lhs <= rhs" is accepted when rhs - lhs >= -threshold(scale),
    where scale is the magnitude recorded by the check.
    """

    abs_tol: float = 1e-12
    rel_tol: float = 1e-9
    # relative cut below which singular values / eigenvalues count as zero
    rank_tol: float = 1e-10
    # eigenvalues within eig_tie_tol*||h|| of a spectral cut s are not above s
    eig_tie_tol: float = 1e-10
    # minimum eigenvalue for a positive operator to count as invertible
    inv_tol: float = 1e-10
    # relative clustering width for equal step values
    merge_tol: float = 1e-12
    # equality detection: trace gap and operator distance
    eq_trace_rel: float = 1e-8
    eq_op_rel: float = 1e-6

    def __post_init__(self):
        for field in fields(self):
            value = getattr(self, field.name)
            if not isinstance(value, (int, float)) or value != value or value < 0:
                raise ConfigError(f"{field.name} must be a nonnegative real, got {value!r}")

    def threshold(self, scale=0.0):
        """Allowed slack for a comparison whose magnitude is `scale`."""
        return self.abs_tol + self.rel_tol * abs(float(scale))

    def close(self, a, b, scale=None):
        """Tolerance-based scalar equality."""
        if scale is None:
            scale = max(abs(a), abs(b))
        return abs(a - b) <= self.threshold(scale)

    def trace_equality_tol(self, rhs):
        return self.eq_trace_rel * (1.0 + abs(rhs))

    def operator_equality_tol(self, norm):
        return self.eq_op_rel * (1.0 + abs(norm))

    def with_overrides(self, **overrides):
        """Return a copy with the non-None overrides applied."""
        return replace(self, **{k: v for k, v in overrides.items() if v is not None})

    def to_dict(self):
        return {field.name: getattr(self, field.name) for field in fields(self)}

    @classmethod
    def from_dict(cls, data):
        known = {field.name for field in fields(cls)}
        unknown = set(data) - known
        if unknown:
            raise ConfigError(f"Unknown tolerance keys: {sorted(unknown)}")
        return cls(**data)

    @classmethod
    def from_env(cls):
        """
        Build a tolerance configuration from SNL_TOL_ABS and SNL_TOL_REL.

        Returns:
            ToleranceConfig with environment overrides applied
        """
        config = cls(
            abs_tol=_env_float("SNL_TOL_ABS", cls.abs_tol),
            rel_tol=_env_float("SNL_TOL_REL", cls.rel_tol),
        )
        logger.debug(f"Using tolerances abs_tol={config.abs_tol} rel_tol={config.rel_tol}")
        return config


@dataclass(frozen=True)
class AlgebraLimits:
    """Desk-scale caps on the block structure of a TracialAlgebra."""

    max_block_dim: int = 16
    max_blocks: int = 8

    def __post_init__(self):
        if self.max_block_dim < 1 or self.max_blocks < 1:
            raise ConfigError("Algebra limits must be positive")

    @classmethod
    def from_env(cls):
        return cls(
            max_block_dim=_env_int("SNL_MAX_BLOCK_DIM", cls.max_block_dim),
            max_blocks=_env_int("SNL_MAX_BLOCKS", cls.max_blocks),
        )


@lru_cache(maxsize=1)
def default_tolerance():
    """Process-wide tolerance configuration, read once from the environment."""
    return ToleranceConfig.from_env()


@lru_cache(maxsize=1)
def default_limits():
    """Process-wide algebra limits, read once from the environment."""
    return AlgebraLimits.from_env()


def resolve_tolerance(tol=None):
    """Return `tol` or the process default."""
    return tol if tol is not None else default_tolerance()


def seed_from_env(default=None):
    """SNL_SEED if set, else `default`."""
    seed = _env_int("SNL_SEED", default)
    if seed is not None and seed < 0:
        raise ConfigError(f"SNL_SEED must be a nonnegative integer, got {seed}")
    return seed


def workers_from_env(default=1):
    """Thread pool width for campaigns (SNL_WORKERS)."""
    workers = _env_int("SNL_WORKERS", default)
    if workers < 1:
        raise ConfigError(f"SNL_WORKERS must be at least 1, got {workers}")
    return workers
