"""Numerical workbench for canonically conjugate operator pairs on bounded intervals."""
from .errors import ConfigurationError, DomainError, EvaluationError, UsageError
from .funcspace import (
    GridFunction,
    Interval,
    QuadratureGrid,
    SmoothFunction,
    build_quadrature,
    inner_product,
    norm,
    sample,
)
from .models import MODEL_IDS, get_model, membership_defect, sample_dc, sample_domain_minus_dc
from .operators import MembershipDefect, commutator_audit
from .verify import CHECK_IDS, CheckResult, ConvergenceSeries, InvarianceScanResult, run_convergence

__all__ = [
    "CHECK_IDS", "MODEL_IDS", "CheckResult", "ConfigurationError", "ConvergenceSeries", "DomainError",
    "EvaluationError", "GridFunction", "Interval", "InvarianceScanResult", "MembershipDefect",
    "QuadratureGrid", "SmoothFunction", "UsageError", "build_quadrature", "commutator_audit",
    "get_model", "inner_product", "membership_defect", "norm", "run_convergence", "sample",
    "sample_dc", "sample_domain_minus_dc",
]

__version__ = "0.1.0"
