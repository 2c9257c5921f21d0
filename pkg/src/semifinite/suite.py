"""
VerificationSuite facade.

One tolerance configuration, every check as a method. Checks are
delegated to the specialized modules; the suite adds timing and logging
and assembles the battery run on a single (x, y, p).
"""
import time

from utils.logging_utils import get_logger, log_check_finished, log_check_started
from . import algebra, inequalities, majorization, snumbers, spectral
from .config import resolve_tolerance
from .errors import NotInvertibleError
from .functions import ConjugatePair, ConvexFunction

# Checks whose failure is expected for some inputs: they are reported but
# never count against a run.
NOT_THEOREMS = frozenset({"young_sv_xy", "xy_counterexample_search"})


def is_theorem(report):
    return report.name not in NOT_THEOREMS


class VerificationSuite:
    """
    Facade over the algebra, s-number, majorization and inequality checks.

    This class provides a unified interface to every check, all evaluated
    with the same ToleranceConfig.
    """

    def __init__(self, tol=None):
        """
        Initialize the verification suite.

        Args:
            tol: ToleranceConfig (default from env vars SNL_TOL_ABS / SNL_TOL_REL)
        """
        self.logger = get_logger("semifinite_suite")
        self.tol = resolve_tolerance(tol)
        self.logger.info(
            f"Initialized VerificationSuite with abs_tol={self.tol.abs_tol:g} rel_tol={self.tol.rel_tol:g}"
        )

    def _run(self, check, name, *args, **kwargs):
        log_check_started(self.logger, name)
        start_time = time.time()
        result = check(*args, tol=self.tol, **kwargs)
        report = result[1] if isinstance(result, tuple) else result
        log_check_finished(self.logger, report, time.time() - start_time)
        return result

    # Algebra and s-number identities

    def traciality(self, x, y):
        return self._run(algebra.check_traciality, "traciality", x, y)

    def faithfulness(self, x):
        return self._run(algebra.check_faithfulness, "faithfulness", x)

    def trace_commutation(self, x, k=1):
        return self._run(algebra.trace_commutation_check, "trace_commutation", x, k)

    def trace_identity(self, z):
        return self._run(snumbers.check_trace_identity, "trace_identity", z)

    def symmetry(self, x, y):
        return self._run(snumbers.check_symmetry, "symmetry", x, y)

    def contraction(self, w1, z, w2):
        return self._run(snumbers.check_contraction, "contraction", w1, z, w2)

    def projection_snumbers(self, f):
        return self._run(snumbers.check_projection_snumbers, "projection_snumbers", f)

    def functional_calculus(self, h, r):
        return self._run(snumbers.check_functional_calculus, "functional_calculus", h, r)

    def variational(self, h, basis=None, expect_exact=True):
        return self._run(snumbers.check_variational, "variational", h, basis, expect_exact)

    def mu_distance_bound(self, z1, z2):
        return self._run(snumbers.mu_distance_bound, "mu_distance_bound", z1, z2)

    def polar_identity(self, x, y):
        return self._run(spectral.check_polar_identity, "polar_identity", x, y)

    def equivalence_construction(self, b, e):
        return self._run(spectral.check_equivalence_construction, "equivalence_construction", b, e)

    # Young-type inequalities

    def young_sv(self, x, y, pq: ConjugatePair):
        return self._run(inequalities.check_young_sv, "young_sv", x, y, pq)

    def young_sv_xy(self, x, y, pq: ConjugatePair):
        return self._run(inequalities.check_young_sv_xy, "young_sv_xy", x, y, pq)

    def young_trace(self, x, y, pq: ConjugatePair, dagger_x="plain", dagger_y="plain"):
        return self._run(inequalities.check_young_trace, "young_trace", x, y, pq, dagger_x, dagger_y)

    def young_trace_variants(self, x, y, pq: ConjugatePair):
        return [
            self.young_trace(x, y, pq, dx, dy) for dx in inequalities.Dagger for dy in inequalities.Dagger
        ]

    def equality_trace(self, a, b, pq: ConjugatePair):
        return self._run(inequalities.check_equality_trace, "equality_trace", a, b, pq)

    def equality_sv(self, x, y, pq: ConjugatePair):
        return self._run(inequalities.check_equality_sv, "equality_sv", x, y, pq)

    def equality_chain(self, a, b, pq: ConjugatePair):
        return self._run(inequalities.check_equality_chain, "equality_chain", a, b, pq)

    def compression(self, a, b, pq: ConjugatePair, s):
        return self._run(inequalities.check_compression, "compression", a, b, pq, s)

    def invertible_approximation(self, a, b, pq: ConjugatePair, epsilons=inequalities.DEFAULT_EPSILONS):
        return self._run(inequalities.check_invertible_approximation, "invertible_approximation", a, b, pq, epsilons)

    def reduction_to_positives(self, x, y):
        return self._run(inequalities.check_reduction_to_positives, "reduction_to_positives", x, y)

    def symmetry_reduction(self, x, y, pq: ConjugatePair):
        return self._run(inequalities.check_symmetry_reduction, "symmetry_reduction", x, y, pq)

    def agm(self, a, b):
        return self._run(inequalities.check_agm, "agm", a, b)

    def tracial_young_positive(self, a, b, pq: ConjugatePair):
        return self._run(inequalities.check_tracial_young_positive, "tracial_young_positive", a, b, pq)

    def fenchel_young(self, a, b, F: ConvexFunction):
        return self._run(inequalities.check_fenchel_young, "fenchel_young", a, b, F)

    def find_xy_counterexample(self, dim, seeds, seed=0):
        return self._run(inequalities.find_xy_counterexample, "xy_counterexample_search", dim, seeds, seed)

    # Majorization

    def submajorization(self, x, y):
        return self._run(majorization.check_submajorization, "submajorization", x, y)

    def young_preorder(self, x, y, pq: ConjugatePair):
        return self._run(majorization.check_young_preorder, "young_preorder", x, y, pq)

    def doubly_stochastic_correction(self, x, y, pq: ConjugatePair):
        return self._run(majorization.doubly_stochastic_correction, "doubly_stochastic_correction", x, y, pq)

    def log_majorization(self, a, b):
        return self._run(majorization.check_log_majorization, "log_majorization", a, b)

    def young_majorization(self, x, y, pq: ConjugatePair):
        return self._run(majorization.check_young_majorization, "young_majorization", x, y, pq)

    def agm_integrals(self, a, b):
        return self._run(majorization.check_agm_integrals, "agm_integrals", a, b)

    # Battery

    def battery(self, x, y, pq: ConjugatePair):
        """
        Every check that applies to a single pair.

        General checks run on (x, y); checks for positive operators run on
        (|x|, |y|). Factor-only checks are skipped in multi-block algebras and
        the compression estimate is skipped unless p <= 2 and |y| is invertible.

        Returns:
            List of VerificationReport in a fixed order
        """
        self.logger.info(f"Running check battery on {x!r} with p={pq.p:g}")
        start_time = time.time()
        reports = [
            self.young_sv(x, y, pq),
            self.young_sv_xy(x, y, pq),
            *self.young_trace_variants(x, y, pq),
            self.equality_sv(x, y, pq),
            self.symmetry(x, y),
            self.reduction_to_positives(x, y),
            self.symmetry_reduction(x, y, pq),
            self.young_majorization(x, y, pq),
            self.submajorization(x, y),
            self.polar_identity(x, y),
            self.trace_identity(x),
            self.trace_identity(y),
            self.traciality(x, y),
        ]
        if x.algebra.is_factor:
            reports.append(self.young_preorder(x, y, pq))
            reports.append(self.doubly_stochastic_correction(x, y, pq)[1])
        a, b = spectral.abs_op(x, self.tol), spectral.abs_op(y, self.tol)
        reports += [
            self.equality_trace(a, b, pq),
            self.agm(a, b),
            self.agm_integrals(a, b),
            self.log_majorization(a, b),
            self.tracial_young_positive(a, b, pq),
            self.fenchel_young(a, b, ConvexFunction.power(pq.p)),
        ]
        if pq.p <= 2:
            try:
                reports += [
                    self.compression(a, b, pq, s) for s in inequalities.compression_levels(a, b, self.tol)
                ]
            except NotInvertibleError as e:
                self.logger.info(f"Skipping compression estimate: {e}")
        elapsed = time.time() - start_time
        failures = sum(1 for r in reports if is_theorem(r) and not r.passed)
        self.logger.info(f"Battery finished with {len(reports)} reports, {failures} failures in {elapsed:.2f}s")
        return reports
