"""Arithmetic-average overnight forwards under Gaussian short-rate models."""

from .curve import FlatCurve, PillarCurve, geometric_forward, on_forward, on_forwards
from .factors import FactorCurve, factor_curve_exact, factor_exact, factor_linear, factor_piecewise, in_advance_forward
from .forwards import ForwardQuote, arithmetic_forward, price, takada_det_forward, takada_oa
from .g2pp import G2ppParams, GaussianLaw2D, Measure, RISK_NEUTRAL, factor_law, forward_measure
from .montecarlo import McConfig, McEstimate, mc_arithmetic_forward, mc_factor, simulate_paths
from .timegrid import AccrualGrid, DayCountBasis, build_grid, year_fraction

__version__ = "0.1.0"

__all__ = [
    "AccrualGrid",
    "DayCountBasis",
    "FactorCurve",
    "FlatCurve",
    "ForwardQuote",
    "G2ppParams",
    "GaussianLaw2D",
    "McConfig",
    "McEstimate",
    "Measure",
    "PillarCurve",
    "RISK_NEUTRAL",
    "arithmetic_forward",
    "build_grid",
    "factor_curve_exact",
    "factor_exact",
    "factor_law",
    "factor_linear",
    "factor_piecewise",
    "forward_measure",
    "geometric_forward",
    "in_advance_forward",
    "mc_arithmetic_forward",
    "mc_factor",
    "on_forward",
    "on_forwards",
    "price",
    "simulate_paths",
    "takada_det_forward",
    "takada_oa",
    "year_fraction",
]
