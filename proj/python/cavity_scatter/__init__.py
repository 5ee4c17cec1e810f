"""Adaptive PML finite element solver for electromagnetic cavity scattering."""

from ._core import (
    AdaptOptions,
    AdaptResult,
    ConvergenceRecord,
    Error,
    GeometryError,
    Method,
    NotFoundError,
    NumericalError,
    Polarization,
    Scenario,
    ValidationError,
    adapt_solve,
    backscatter_rcs,
    compare,
    flat_ground,
    hankel1,
    parse_range,
    preset,
    preset_names,
    propagation_bound,
)

__all__ = [
    "AdaptOptions",
    "AdaptResult",
    "ConvergenceRecord",
    "Error",
    "GeometryError",
    "Method",
    "NotFoundError",
    "NumericalError",
    "Polarization",
    "Scenario",
    "ValidationError",
    "adapt_solve",
    "backscatter_rcs",
    "compare",
    "flat_ground",
    "hankel1",
    "parse_range",
    "preset",
    "preset_names",
    "propagation_bound",
]
