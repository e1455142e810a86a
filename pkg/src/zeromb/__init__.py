"""Variational stability and instability criteria for zero-resistivity magnetic Rayleigh-Benard convection."""
__version__ = "0.1.0"

from .band import get_backend
from .criteria import (Classification, CriterionReport, classify, galdi_resistive_threshold,
                       instability_criterion, stability_threshold_Q, upsilon1, upsilon2)
from .growth import GrowthResult, NoConvergence, PreconditionFailed, fixed_point_lambda, lambda_star_bounds
from .params import BC, Params, Wavenumber, build_lattice, validate_params
from .variational import Search, alpha, critical_R0, lambda0, xi

__all__ = [
    "BC", "Classification", "CriterionReport", "GrowthResult", "NoConvergence", "Params",
    "PreconditionFailed", "Search", "Wavenumber", "alpha", "build_lattice", "classify",
    "critical_R0", "fixed_point_lambda", "galdi_resistive_threshold", "get_backend",
    "instability_criterion", "lambda0", "lambda_star_bounds", "stability_threshold_Q",
    "upsilon1", "upsilon2", "validate_params", "xi",
]
