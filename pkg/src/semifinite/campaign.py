"""
Randomized campaigns over every check, and verification of stored operator files.

A campaign draws fresh operators per trial from the counter-based
generator, runs the configured checks for every exponent p, and aggregates
runs, failures and the worst margin per check. Trials may run on a thread
pool; aggregation follows trial order so the result does not depend on
scheduling.
"""
import json
import math
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path
from typing import Callable, Dict, List, Optional, Tuple

import numpy as np

from utils.logging_utils import get_logger
from .algebra import TracialAlgebra, _require_same_algebra, load_operator
from .config import ToleranceConfig, resolve_tolerance, seed_from_env, workers_from_env
from .errors import ConfigError
from .export import write_result
from .functions import ConjugatePair, ConvexFunction
from .generators import OperatorKind, RandomOperatorGenerator
from .inequalities import compression_levels
from .report import VerificationReport
from .spectral import abs_op, eig_hermitian, power_pos
from .suite import VerificationSuite, is_theorem

logger = get_logger("semifinite_campaign")

DEFAULT_P_VALUES = (1.1, 1.5, 2.0, 3.0, 10.0)
DEFAULT_BLOCK_SPECS = ((2, 1.0), (3, 1.0), (4, 1.0), (5, 1.0), (6, 1.0), ((2, 0.5), (3, 1.5)))
POWER_EXPONENTS = (0.5, 2.0, 3.0)
EQUALITY_PERTURBATION = 1e-2
VARIATIONAL_MAX_DIM = 6


@dataclass
class TrialContext:
    """Operators for one trial are drawn lazily through this context."""

    suite: VerificationSuite
    generator: RandomOperatorGenerator
    algebra: TracialAlgebra
    trial: int
    pq: Optional[ConjugatePair] = None

    def operator(self, kind=OperatorKind.GENERAL, role=0):
        return self.generator.operator(self.algebra, self.trial, kind, role)

    def pair(self, kind=OperatorKind.GENERAL):
        return self.operator(kind, 0), self.operator(kind, 1)


def _with_conditions(report, **conditions):
    """Copy of report with extra boolean conditions folded into passed."""
    details = dict(report.details)
    merged = dict(details.get("conditions", {}))
    merged.update({k: bool(v) for k, v in conditions.items()})
    details["conditions"] = merged
    return VerificationReport(
        report.name, report.passed and all(merged.values()), report.worst_margin, report.witness, details
    )


def _expect_equality(report, expected):
    flags = [k for k in ("gap_equal", "sv_equal", "dist_equal") if k in report.details]
    return _with_conditions(report, **{f"{k}_expected": report.details[k] == expected for k in flags})


# Registry ---------------------------------------------------------------------

def _young_sv(ctx):
    return [ctx.suite.young_sv(*ctx.pair(), ctx.pq)]


def _young_sv_xy(ctx):
    return [ctx.suite.young_sv_xy(*ctx.pair(), ctx.pq)]


def _young_trace(ctx):
    reports = ctx.suite.young_trace_variants(*ctx.pair(), ctx.pq)
    variants = np.array([r.details["rhs_variant"] for r in reports])
    spread = float(np.max(variants) - np.min(variants))
    tol = ctx.suite.tol
    return [_with_conditions(r, rhs_spread=spread <= tol.threshold(r.details["rhs"])) for r in reports]


def _equality_trace(ctx):
    a = ctx.operator(OperatorKind.POSITIVE)
    b = power_pos(a, ctx.pq.p / ctx.pq.q, ctx.suite.tol)
    perturbed = b + ctx.algebra.identity() * EQUALITY_PERTURBATION
    return [
        _expect_equality(ctx.suite.equality_trace(a, b, ctx.pq), True),
        _expect_equality(ctx.suite.equality_trace(a, perturbed, ctx.pq), False),
    ]


def _equality_sv(ctx):
    x = ctx.operator()
    w = ctx.operator(OperatorKind.UNITARY, 2)
    y = w @ power_pos(abs_op(x, ctx.suite.tol), ctx.pq.p / ctx.pq.q, ctx.suite.tol)
    other = ctx.operator(OperatorKind.GENERAL, 1)
    return [
        _expect_equality(ctx.suite.equality_sv(x, y, ctx.pq), True),
        _expect_equality(ctx.suite.equality_sv(x, other, ctx.pq), False),
    ]


def _equality_chain(ctx):
    a = ctx.operator(OperatorKind.POSITIVE)
    return [ctx.suite.equality_chain(a, power_pos(a, ctx.pq.p / ctx.pq.q, ctx.suite.tol), ctx.pq)]


def _projection_snumbers(ctx):
    return [ctx.suite.projection_snumbers(ctx.operator(OperatorKind.PROJECTION))]


def _functional_calculus(ctx):
    h = ctx.operator(OperatorKind.POSITIVE)
    return [ctx.suite.functional_calculus(h, r) for r in POWER_EXPONENTS]


def _trace_identity(ctx):
    return [ctx.suite.trace_identity(ctx.operator())]


def _symmetry(ctx):
    return [ctx.suite.symmetry(*ctx.pair())]


def _contraction(ctx):
    w1, z = ctx.pair()
    return [ctx.suite.contraction(w1, z, ctx.operator(OperatorKind.GENERAL, 2))]


def _traciality(ctx):
    return [ctx.suite.traciality(*ctx.pair())]


def _faithfulness(ctx):
    return [ctx.suite.faithfulness(ctx.operator()), ctx.suite.faithfulness(ctx.algebra.zero())]


def _mu_distance_bound(ctx):
    return [ctx.suite.mu_distance_bound(*ctx.pair())]


def _polar_identity(ctx):
    return [ctx.suite.polar_identity(*ctx.pair())]


def _equivalence_construction(ctx):
    b = ctx.operator(OperatorKind.INVERTIBLE_POSITIVE)
    e = ctx.operator(OperatorKind.PROJECTION, 1)
    return [ctx.suite.equivalence_construction(b, e)]


def _variational(ctx):
    h = ctx.operator(OperatorKind.POSITIVE)
    basis = eig_hermitian(h, ctx.suite.tol).eigenvectors
    return [ctx.suite.variational(h, basis)]


def _compression(ctx):
    a = ctx.operator(OperatorKind.POSITIVE)
    b = ctx.operator(OperatorKind.INVERTIBLE_POSITIVE, 1)
    return [ctx.suite.compression(a, b, ctx.pq, s) for s in compression_levels(a, b, ctx.suite.tol)]


def _invertible_approximation(ctx):
    return [ctx.suite.invertible_approximation(*ctx.pair(OperatorKind.POSITIVE), ctx.pq)]


def _reduction_to_positives(ctx):
    return [ctx.suite.reduction_to_positives(*ctx.pair())]


def _symmetry_reduction(ctx):
    return [ctx.suite.symmetry_reduction(*ctx.pair(), ctx.pq)]


def _agm(ctx):
    return [ctx.suite.agm(*ctx.pair(OperatorKind.POSITIVE))]


def _agm_integrals(ctx):
    return [ctx.suite.agm_integrals(*ctx.pair(OperatorKind.POSITIVE))]


def _tracial_young_positive(ctx):
    return [ctx.suite.tracial_young_positive(*ctx.pair(OperatorKind.POSITIVE), ctx.pq)]


def _submajorization(ctx):
    return [ctx.suite.submajorization(*ctx.pair())]


def _young_preorder(ctx):
    return [ctx.suite.young_preorder(*ctx.pair(), ctx.pq)]


def _doubly_stochastic_correction(ctx):
    return [ctx.suite.doubly_stochastic_correction(*ctx.pair(), ctx.pq)[1]]


def _log_majorization(ctx):
    return [ctx.suite.log_majorization(*ctx.pair(OperatorKind.POSITIVE))]


def _young_majorization(ctx):
    return [ctx.suite.young_majorization(*ctx.pair(), ctx.pq)]


def _fenchel_young(ctx):
    a, b = ctx.pair(OperatorKind.POSITIVE)
    fenchel = ctx.suite.fenchel_young(a, b, ConvexFunction.power(ctx.pq.p))
    young = ctx.suite.young_trace(a, b, ctx.pq)
    agreement = abs(fenchel.worst_margin - young.worst_margin)
    return [_with_conditions(fenchel, matches_young_trace=agreement <= ctx.suite.tol.threshold(young.details["rhs"]))]


@dataclass(frozen=True)
class CheckSpec:
    """One registered campaign check."""

    name: str
    run: Callable[[TrialContext], List[VerificationReport]]
    uses_p: bool = True
    theorem: bool = True
    factor_only: bool = False
    max_p: float = math.inf
    max_total_dim: Optional[int] = None

    def applies_to(self, algebra):
        if self.factor_only and not algebra.is_factor:
            return False
        return self.max_total_dim is None or algebra.total_dim <= self.max_total_dim


CHECKS: Dict[str, CheckSpec] = {
    spec.name: spec
    for spec in (
        CheckSpec("young_sv", _young_sv),
        CheckSpec("young_sv_xy", _young_sv_xy, theorem=False),
        CheckSpec("young_trace", _young_trace),
        CheckSpec("equality_trace", _equality_trace),
        CheckSpec("equality_sv", _equality_sv),
        CheckSpec("equality_chain", _equality_chain),
        CheckSpec("projection_snumbers", _projection_snumbers, uses_p=False),
        CheckSpec("functional_calculus", _functional_calculus, uses_p=False),
        CheckSpec("trace_identity", _trace_identity, uses_p=False),
        CheckSpec("symmetry", _symmetry, uses_p=False),
        CheckSpec("contraction", _contraction, uses_p=False),
        CheckSpec("traciality", _traciality, uses_p=False),
        CheckSpec("faithfulness", _faithfulness, uses_p=False),
        CheckSpec("mu_distance_bound", _mu_distance_bound, uses_p=False),
        CheckSpec("polar_identity", _polar_identity, uses_p=False),
        CheckSpec("equivalence_construction", _equivalence_construction, uses_p=False),
        CheckSpec("variational", _variational, uses_p=False, max_total_dim=VARIATIONAL_MAX_DIM),
        CheckSpec("compression", _compression, max_p=2.0),
        CheckSpec("invertible_approximation", _invertible_approximation, max_p=2.0),
        CheckSpec("reduction_to_positives", _reduction_to_positives, uses_p=False),
        CheckSpec("symmetry_reduction", _symmetry_reduction),
        CheckSpec("agm", _agm, uses_p=False),
        CheckSpec("agm_integrals", _agm_integrals, uses_p=False),
        CheckSpec("tracial_young_positive", _tracial_young_positive),
        CheckSpec("submajorization", _submajorization, uses_p=False),
        CheckSpec("young_preorder", _young_preorder, factor_only=True),
        CheckSpec("doubly_stochastic_correction", _doubly_stochastic_correction, factor_only=True),
        CheckSpec("log_majorization", _log_majorization, uses_p=False),
        CheckSpec("young_majorization", _young_majorization),
        CheckSpec("fenchel_young", _fenchel_young),
    )
}

# Runs once per campaign rather than per trial.
SEARCH_CHECK = "find_xy_counterexample"

KNOWN_CHECKS = tuple(CHECKS) + (SEARCH_CHECK,)

DEFAULT_CHECKS = (
    "young_sv",
    "young_trace",
    "equality_trace",
    "equality_sv",
    "projection_snumbers",
    "functional_calculus",
    "trace_identity",
    "compression",
    "agm",
    "submajorization",
    "young_preorder",
    "doubly_stochastic_correction",
    "log_majorization",
    "fenchel_young",
    "variational",
)


# Configuration ----------------------------------------------------------------

def _algebra_from_spec(spec):
    """[dim, weight] is a single factor; a list of such pairs is a direct sum."""
    try:
        if len(spec) == 2 and all(isinstance(v, (int, float)) for v in spec):
            return TracialAlgebra.from_specs([spec])
        return TracialAlgebra.from_specs(spec)
    except TypeError as e:
        raise ConfigError(f"Malformed block spec {spec!r}: {e}") from e


@dataclass
class CampaignConfig:
    """
    Campaign settings.

    block_specs lists algebras: an entry [dim, weight] is the factor M_dim with
    that weight, an entry [[dim, weight], ...] is a direct sum. Trial i uses
    entry i mod len(block_specs).
    """

    seed: int = 0
    trials: int = 500
    block_specs: Tuple = DEFAULT_BLOCK_SPECS
    p_values: Tuple[float, ...] = DEFAULT_P_VALUES
    tolerance: ToleranceConfig = field(default_factory=ToleranceConfig)
    checks: Tuple[str, ...] = DEFAULT_CHECKS
    output_path: Optional[str] = None
    output_format: str = "json"
    workers: int = 1
    search_dim: int = 2
    search_seeds: int = 10000

    def __post_init__(self):
        self.validate()

    def validate(self):
        """
        Raises:
            ConfigError: on any invalid field
        """
        if not isinstance(self.seed, int) or self.seed < 0 or self.seed >= 2 ** 64:
            raise ConfigError(f"seed must be a 64-bit unsigned integer, got {self.seed!r}")
        if not isinstance(self.trials, int) or self.trials < 1:
            raise ConfigError(f"trials must be a positive integer, got {self.trials!r}")
        if not self.p_values or any(not p > 1 for p in self.p_values):
            raise ConfigError(f"Every p must exceed 1, got {list(self.p_values)}")
        unknown = [c for c in self.checks if c not in KNOWN_CHECKS]
        if unknown or not self.checks:
            raise ConfigError(f"Unknown checks {unknown}; known checks are {list(KNOWN_CHECKS)}")
        if not self.block_specs:
            raise ConfigError("block_specs must name at least one algebra")
        if self.output_format not in ("json", "csv"):
            raise ConfigError(f"Unknown output format {self.output_format!r}")
        if self.workers < 1 or self.search_dim < 2 or self.search_seeds < 1:
            raise ConfigError("workers and search_seeds must be positive and search_dim at least 2")
        self.algebras()

    def algebras(self):
        return [_algebra_from_spec(spec) for spec in self.block_specs]

    def to_dict(self):
        return {
            "seed": self.seed,
            "trials": self.trials,
            "block_specs": json.loads(json.dumps(self.block_specs)),
            "p_values": list(self.p_values),
            "tolerance": self.tolerance.to_dict(),
            "checks": list(self.checks),
            "output_path": self.output_path,
            "output_format": self.output_format,
            "workers": self.workers,
            "search_dim": self.search_dim,
            "search_seeds": self.search_seeds,
        }

    @classmethod
    def from_dict(cls, data):
        data = dict(data)
        known = {f for f in cls.__dataclass_fields__}
        unknown = set(data) - known
        if unknown:
            raise ConfigError(f"Unknown campaign keys: {sorted(unknown)}")
        if "tolerance" in data:
            data["tolerance"] = ToleranceConfig.from_dict(data["tolerance"])
        for key in ("block_specs", "p_values", "checks"):
            if key in data:
                data[key] = tuple(data[key])
        return cls(**data)

    @classmethod
    def from_file(cls, path):
        path = Path(path)
        try:
            data = json.loads(path.read_text())
        except json.JSONDecodeError as e:
            raise ConfigError(f"{path} is not valid JSON: {e}") from e
        return cls.from_dict(data)

    @classmethod
    def load(cls, path=None, **overrides):
        """
        Layered configuration: file < SNL_SEED / SNL_WORKERS < explicit overrides.

        Overrides that are None are ignored.
        """
        data = cls.from_file(path).to_dict() if path else cls().to_dict()
        data["seed"] = seed_from_env(data["seed"])
        data["workers"] = workers_from_env(data["workers"])
        data.update({k: v for k, v in overrides.items() if v is not None})
        return cls.from_dict(data)


# Results --------------------------------------------------------------------

@dataclass
class CheckAggregate:
    name: str
    theorem: bool
    runs: int = 0
    failures: int = 0
    worst_margin: float = math.inf
    worst_witness: Optional[dict] = None
    first_failure: Optional[dict] = None

    def add(self, report, trial, algebra, p):
        self.runs += 1
        located = {"trial": trial, "p": p, "algebra": algebra.to_dict(), "report": report.to_dict()}
        if not report.passed:
            self.failures += 1
            if self.first_failure is None:
                self.first_failure = located
        if report.worst_margin < self.worst_margin:
            self.worst_margin = report.worst_margin
            self.worst_witness = located

    def to_dict(self):
        return {
            "name": self.name,
            "theorem": self.theorem,
            "runs": self.runs,
            "failures": self.failures,
            "worst_margin": self.worst_margin if self.runs else None,
            "worst_witness": self.worst_witness,
            "first_failure": self.first_failure,
        }


@dataclass
class CampaignResult:
    config: CampaignConfig
    aggregates: Dict[str, CheckAggregate]
    search: Optional[VerificationReport] = None
    wall_time: float = 0.0

    @property
    def passed(self):
        """True iff no theorem check failed."""
        return all(a.failures == 0 for a in self.aggregates.values() if a.theorem)

    @property
    def exit_code(self):
        return 0 if self.passed else 1

    def to_dict(self, include_timing=True):
        result = {
            "config": self.config.to_dict(),
            "passed": self.passed,
            "checks": {name: aggregate.to_dict() for name, aggregate in self.aggregates.items()},
            "search": self.search.to_dict() if self.search is not None else None,
        }
        if include_timing:
            result["wall_time"] = self.wall_time
        return result


# Execution --------------------------------------------------------------------

def _run_trial(config, suite, generator, algebras, trial):
    """All (check, p) reports of one trial, in registry order."""
    algebra = algebras[trial % len(algebras)]
    outcomes = []
    for name in config.checks:
        if name == SEARCH_CHECK:
            continue
        spec = CHECKS[name]
        if not spec.applies_to(algebra):
            continue
        exponents = [p for p in config.p_values if p <= spec.max_p] if spec.uses_p else [None]
        for p in exponents:
            ctx = TrialContext(suite, generator, algebra, trial, ConjugatePair.from_p(p) if p else None)
            for report in spec.run(ctx):
                outcomes.append((name, p, report))
    return trial, algebra, outcomes


def run_campaign(config: CampaignConfig, suite=None):
    """
    Execute every configured check on freshly generated operators.

    Args:
        config: Validated CampaignConfig
        suite: Optional VerificationSuite (built from config.tolerance when None)

    Returns:
        CampaignResult; written to config.output_path when set
    """
    suite = suite or VerificationSuite(config.tolerance)
    generator = RandomOperatorGenerator(config.seed)
    algebras = config.algebras()
    logger.info(
        f"Starting campaign: seed={config.seed} trials={config.trials} checks={len(config.checks)} "
        f"workers={config.workers}"
    )
    start_time = time.time()
    aggregates = {
        name: CheckAggregate(name, CHECKS[name].theorem) for name in config.checks if name != SEARCH_CHECK
    }
    with ThreadPoolExecutor(max_workers=config.workers) as pool:
        results = pool.map(
            lambda trial: _run_trial(config, suite, generator, algebras, trial), range(config.trials)
        )
        for trial, algebra, outcomes in results:
            for name, p, report in outcomes:
                aggregates[name].add(report, trial, algebra, p)
    search = None
    if SEARCH_CHECK in config.checks:
        search = suite.find_xy_counterexample(config.search_dim, config.search_seeds, config.seed)
    elapsed = time.time() - start_time
    for aggregate in aggregates.values():
        logger.info(
            f"{aggregate.name}: {aggregate.runs} runs, {aggregate.failures} failures, "
            f"worst margin {aggregate.worst_margin:.3e}"
        )
    result = CampaignResult(config, aggregates, search, elapsed)
    logger.info(f"Campaign finished ({'PASS' if result.passed else 'FAIL'}) in {elapsed:.2f}s")
    if config.output_path:
        write_result(result, config.output_path, config.output_format)
    return result


def verify_file(x_path, y_path, p, tol=None):
    """
    Run the full check battery on operators stored in JSON files.

    Returns:
        VerificationReport named "verify_file": passed iff every theorem check
        passed; details["reports"] holds each individual report.

    Raises:
        MalformedOperatorError: for unreadable operator files
        AlgebraMismatchError: if x and y live in different algebras
    """
    tol = resolve_tolerance(tol)
    x, y = load_operator(x_path), load_operator(y_path)
    _require_same_algebra(x, y)
    reports = VerificationSuite(tol).battery(x, y, ConjugatePair.from_p(p))
    theorems = [r for r in reports if is_theorem(r)]
    return VerificationReport(
        name="verify_file",
        passed=all(r.passed for r in theorems),
        worst_margin=min(r.worst_margin for r in theorems),
        witness=None,
        details={
            "x": str(x_path),
            "y": str(y_path),
            "p": float(p),
            "failures": [r.name for r in theorems if not r.passed],
            "reports": [r.to_dict() for r in reports],
        },
    )
