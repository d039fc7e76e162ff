"""Commuting (a, b) coefficient families, their kernels and singularity structure."""
from .classify import CLASSES, RiemannScheme, SingularityReport, SingularPoint, classify
from .families import (
    FAMILIES, CoefficientFamily, FamilyMismatch, InvalidParams, alpha_denominator, alpha_of, beta_of,
    factor_difference,
)
from .kernels import (
    BOUNDED_ONLY, FINITE_RANK, HALF_LINE, HILBERT_SCHMIDT, MULTIPLICATIVE, PERIODIC, REGISTRY, CaseSpec,
    Decay, KernelCase, PoleProximity, UnsupportedCase, build_case, case_ids, check_poles, ode_residual,
)
