"""Algebraic multigrid: classical (Ruge-Stueben) and smoothed aggregation."""

from .aggregation import aggregate_sa, estimate_lambda_max, prolong_sa, tentative_prolongator
from .classical import C_POINT, F_POINT, cf_split, interp_direct
from .hierarchy import AmgConfig, AmgHierarchy, Level, build_hierarchy, vcycle
from .strength import StrengthGraph, strength_rs, strength_sa

__all__ = [
    "StrengthGraph", "strength_rs", "strength_sa",
    "cf_split", "interp_direct", "C_POINT", "F_POINT",
    "aggregate_sa", "prolong_sa", "tentative_prolongator", "estimate_lambda_max",
    "AmgConfig", "AmgHierarchy", "Level", "build_hierarchy", "vcycle",
]
