"""Pseudorandom generators from level-k Fourier bounds via polarizing random walks.

Exact Boolean Fourier analysis, seeded t-wise and small-bias primitives,
fractional PRGs, random-walk amplification, and brute-force verification of
every inequality the constructions rely on.
"""
from .boolean import (FourierExpansion, Restriction, TruthTable, eval_multilinear, negate_inputs,
                      restrict, restriction_closure, wht_forward, wht_inverse)
from .config import Constants, ParseError, ResourceError
from .families import FunctionFamily
from .fractional import FractionalPRG, build_fracprg_l1, build_fracprg_mk, fooling_error
from .kernels import BACKEND
from .primitives import SeededGenerator, bias_audit, kwise_generator, smallbias_generator
from .report import ExperimentReport
from .spectral import LevelMetrics, class_metrics, l1_level_mass, level_abs_sum, unsigned_level_sum
from .walk import ComposedPRG, build_prg_f2, build_prg_levelk, build_prg_uptok, prg_fooling_error, seed_ledger

__version__ = "0.1.0"

__all__ = [
    "BACKEND", "ComposedPRG", "Constants", "ExperimentReport", "FourierExpansion", "FractionalPRG",
    "FunctionFamily", "LevelMetrics", "ParseError", "ResourceError", "Restriction", "SeededGenerator",
    "TruthTable", "bias_audit", "build_fracprg_l1", "build_fracprg_mk", "build_prg_f2",
    "build_prg_levelk", "build_prg_uptok", "class_metrics", "eval_multilinear", "fooling_error",
    "kwise_generator", "l1_level_mass", "level_abs_sum", "negate_inputs", "prg_fooling_error",
    "restrict", "restriction_closure", "smallbias_generator", "unsigned_level_sum", "wht_forward",
    "wht_inverse",
]
