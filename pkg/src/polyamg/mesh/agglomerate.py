"""Coarse polygonal meshes obtained by merging the cells of each partition part."""

import numpy as np

from ..exceptions import AgglomerationError
from .core import PolygonalMesh


def agglomerate(mesh, partition):
    """Merge the cells of every part into one polygon.

    The coarse cell of part ``k`` is the outer boundary loop of the union of
    its cells.  Fine vertices lying on that loop are all kept, so coarse
    cells may have collinear vertices and very short edges.  Fine vertices
    interior to an agglomerate are dropped and the rest renumbered in their
    original order.

    Raises
    ------
    AgglomerationError
        If a part's union is disconnected, has a hole, or pinches at a vertex.
    """
    labels = np.asarray(partition.part_of_cell, dtype=np.int64)
    n_parts = int(partition.n_parts)
    if labels.shape != (mesh.n_cells,):
        raise ValueError("partition does not match mesh")

    a = mesh.cell_idx
    b = mesh.cell_idx[mesh._next_pos]
    owner_part = labels[mesh.cell_of_corner]
    # directed edge (a, b) is interior to a part iff (b, a) exists in the same part
    nv = mesh.n_vertices
    fwd = owner_part * nv * nv + a * nv + b
    rev = owner_part * nv * nv + b * nv + a
    on_boundary = ~np.isin(fwd, rev)

    corners = np.flatnonzero(on_boundary)
    order = np.argsort(owner_part[corners], kind="stable")
    corners = corners[order]
    bounds = np.searchsorted(owner_part[corners], np.arange(n_parts + 1))

    loops = []
    for k in range(n_parts):
        pos = corners[bounds[k]:bounds[k + 1]]
        if pos.size == 0:
            raise AgglomerationError("part is empty or has no boundary", k)
        succ = {}
        for p in pos.tolist():
            u = int(a[p])
            if u in succ:
                raise AgglomerationError(f"boundary pinches at vertex {u}", k)
            succ[u] = int(b[p])
        start = int(a[pos[0]])
        loop = [start]
        v = succ[start]
        while v != start:
            loop.append(v)
            if len(loop) > len(succ):
                raise AgglomerationError("boundary does not close", k)
            v = succ.get(v, start)
        if len(loop) != len(succ):
            raise AgglomerationError("union is disconnected or has a hole", k)
        loops.append(np.asarray(loop, dtype=np.int64))

    flat = np.concatenate(loops)
    used, inverse = np.unique(flat, return_inverse=True)
    sizes = np.array([len(lp) for lp in loops])
    cell_ptr = np.concatenate([[0], np.cumsum(sizes)])
    return PolygonalMesh(mesh.vertices[used], cell_ptr, inverse.ravel())
