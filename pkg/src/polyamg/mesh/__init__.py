"""Polygonal meshes of the unit square: generation, metrics, partitioning, I/O."""

from .agglomerate import agglomerate
from .core import PolygonalMesh
from .generators import gen_hexagonal, gen_koch, gen_voronoi, koch_snowflake, voronoi_from_seeds
from .io import load_mesh, save_mesh
from .partition import Partition, partition
from .quality import MeshQuality, measure

__all__ = [
    "PolygonalMesh", "MeshQuality", "Partition",
    "gen_hexagonal", "gen_voronoi", "gen_koch", "koch_snowflake", "voronoi_from_seeds",
    "measure", "partition", "agglomerate", "save_mesh", "load_mesh",
]
