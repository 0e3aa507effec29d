"""Exact tables, bivariate asymptotics and random-walk checks for unicellular maps."""

from .errors import (ClosureViolation, ConvergenceError, DomainError, ExactDivisionError,
                     MapwalkError, NotValidatedError, SandwichViolation)
from .exact import (ExactTriangle, build_triangulation_table, build_unicellular_table,
                    series_oracle)
from .fit import FitResult, RayAsymptoticFit, fit_ray
from .omega import OmegaModel, log_omega, q_ratio
from .parametric import ParametricPoint, lambda_of_theta, parametric_point
from .walk import WalkRunStats, WalkSpec, hz_large_v_spec, hz_small_v_spec, simulate_walk

__version__ = "0.1.0"

__all__ = [
    "ClosureViolation", "ConvergenceError", "DomainError", "ExactDivisionError",
    "MapwalkError", "NotValidatedError", "SandwichViolation",
    "ExactTriangle", "build_triangulation_table", "build_unicellular_table", "series_oracle",
    "FitResult", "RayAsymptoticFit", "fit_ray",
    "OmegaModel", "log_omega", "q_ratio",
    "ParametricPoint", "lambda_of_theta", "parametric_point",
    "WalkRunStats", "WalkSpec", "hz_large_v_spec", "hz_small_v_spec", "simulate_walk",
]
