"""
semifinite package: s-numbers and Young-type inequalities in finite direct sums of matrix algebras.

This package provides:
- TracialAlgebra / Operator: block algebras with a weighted trace
- StepFunction and mu: generalized singular values
- VerificationSuite: facade over every inequality and identity check
- run_campaign / verify_file: randomized and file-based verification
"""

# Import main classes for easier access
from .algebra import Operator, TracialAlgebra, load_operator, save_operator
from .campaign import CampaignConfig, CampaignResult, run_campaign, verify_file
from .config import ToleranceConfig
from .functions import ConjugatePair, ConvexFunction, ScalarFunction
from .report import VerificationReport
from .snumbers import StepFunction, mu
from .suite import VerificationSuite
