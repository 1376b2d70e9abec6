"""Numerical laboratory for decay rates of inverse-generator semigroups and Crank-Nicolson iterations."""

from .spectrum import SpectrumSpec, SpectrumError
from .curves import NormCurve, dyadic_grid, integer_dyadic_grid, parse_grid
from .spectral_calculus import KernelKind, kernel_norm, norm_curve, optimality_witness
from .crank_nicolson import StepsizeSchedule, cn_norm_curve
from .decay_analysis import DecayModel, fit_power, check_order, liminf_check

__version__ = "0.1.0"

__all__ = [
    "SpectrumSpec", "SpectrumError", "NormCurve", "dyadic_grid", "integer_dyadic_grid", "parse_grid",
    "KernelKind", "kernel_norm", "norm_curve", "optimality_witness", "StepsizeSchedule", "cn_norm_curve",
    "DecayModel", "fit_power", "check_order", "liminf_check",
]
