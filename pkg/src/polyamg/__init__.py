"""Lowest-order virtual elements on polygonal meshes, solved by AMG-preconditioned CG."""

from .krylov import SolveReport, StoppingRule, lanczos_kappa, pcg, timed_solve
from .mesh import PolygonalMesh, gen_hexagonal, gen_koch, gen_voronoi, measure
from .solvers import ConjugateGradient, DirectSolver, RugeStubenAMG, SmoothedAggregationAMG
from .vem import CoefficientField, DiscreteSystem, build_system, error_norms

__version__ = "0.1.0"

__all__ = [
    "PolygonalMesh", "gen_hexagonal", "gen_voronoi", "gen_koch", "measure",
    "CoefficientField", "DiscreteSystem", "build_system", "error_norms",
    "StoppingRule", "SolveReport", "pcg", "lanczos_kappa", "timed_solve",
    "RugeStubenAMG", "SmoothedAggregationAMG", "ConjugateGradient", "DirectSolver",
]
