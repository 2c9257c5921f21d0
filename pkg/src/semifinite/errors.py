"""
Exception hierarchy for the semifinite package.

Every error is also a ValueError so callers written against numpy/scipy
conventions keep working.
"""


class SemifiniteError(ValueError):
    """Base class for precondition failures raised by the package."""


class ConfigError(SemifiniteError):
    """Invalid tolerance, limit or campaign configuration."""


class MalformedOperatorError(SemifiniteError):
    """Operator blocks do not match their algebra or contain non-finite entries."""


class AlgebraMismatchError(SemifiniteError):
    """Operands belong to different tracial algebras."""


class NotHermitianError(SemifiniteError):
    pass


class NotPositiveError(SemifiniteError):
    pass


class NotProjectionError(SemifiniteError):
    pass


class NotInvertibleError(SemifiniteError):
    pass


class NotAFactorError(SemifiniteError):
    """Operation is only defined on a single matrix block (a type I_n factor)."""


class DomainError(SemifiniteError):
    """Scalar argument outside the domain of the operation."""
