"""Exact q-series engine for theta-function identities and ternary-form counts."""

from .fps import Series, PrecisionError
from .kernels import available_backends, set_backend
from .seq import SeqSpec, gf, oracle_count, phi, psi, form_constant
from .qdsl import QdslSyntaxError, parse, evaluate, to_text
from .relations import (
    CorrectionRule, GfIdentity, IdentityRecord, LinearRule, ResourceError, RuleError,
    SuiteSettings, VerificationReport, check_correction_rule, check_gf_identity,
    check_identity, check_linear_rule, generate_classical_rules, run_suite,
)
from .corpus import CorpusError, default_paths, load_corpus

__version__ = "0.1.0"

__all__ = [
    "Series", "PrecisionError", "available_backends", "set_backend",
    "SeqSpec", "gf", "oracle_count", "phi", "psi", "form_constant",
    "QdslSyntaxError", "parse", "evaluate", "to_text",
    "CorrectionRule", "GfIdentity", "IdentityRecord", "LinearRule", "ResourceError", "RuleError",
    "SuiteSettings", "VerificationReport", "check_correction_rule", "check_gf_identity",
    "check_identity", "check_linear_rule", "generate_classical_rules", "run_suite",
    "CorpusError", "default_paths", "load_corpus",
]
