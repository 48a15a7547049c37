"""Numerical tools for Pick interpolation on distinguished varieties in the bidisk."""

from .bipoly import BivariatePolynomial, MatrixPolynomial
from .kernels import AdmissiblePair, KernelHandle, neil_pair_ab, neil_standard_pairs, validate_pair
from .pick import KernelFamily, PickProblem, builtin_neil_family, family_feasibility
from .realization import TransferFunction, UnitaryColligation, build_colligation
from .variety import SamplePlan, VarietyPoint, VarietySpec, neil_spec, sample_points

__version__ = "0.1.0"

__all__ = [
    "AdmissiblePair",
    "BivariatePolynomial",
    "KernelFamily",
    "KernelHandle",
    "MatrixPolynomial",
    "PickProblem",
    "SamplePlan",
    "TransferFunction",
    "UnitaryColligation",
    "VarietyPoint",
    "VarietySpec",
    "build_colligation",
    "builtin_neil_family",
    "family_feasibility",
    "neil_pair_ab",
    "neil_spec",
    "neil_standard_pairs",
    "sample_points",
    "validate_pair",
]
