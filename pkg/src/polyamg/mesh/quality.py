"""Shape-regularity metrics of a tessellation."""

from dataclasses import dataclass

import numpy as np

from .core import _pairwise_extreme


@dataclass(frozen=True)
class MeshQuality:
    """Mesh size and shape metrics.

    Attributes
    ----------
    n_elt, n_v : int
        Number of cells and vertices.
    h : float
        Largest cell diameter.
    h_min : float
        Smallest distance between two vertices of the same cell.
    gamma0 : float
        Largest ratio of cell diameter to (approximate) inscribed radius.
    gamma1 : float
        Largest ratio of cell diameter to the cell's own ``h_min``.
    """

    n_elt: int
    n_v: int
    h: float
    h_min: float
    gamma0: float
    gamma1: float

    def as_dict(self):
        return dict(n_elt=self.n_elt, n_v=self.n_v, h=self.h, h_min=self.h_min,
                    gamma0=self.gamma0, gamma1=self.gamma1)


def cell_min_distances(mesh):
    """Per-cell minimum vertex-pair distance ``h_min,K``."""
    out = np.empty(mesh.n_cells)
    for ids, loops in mesh.size_groups.values():
        out[ids] = _pairwise_extreme(mesh.vertices, loops, np.min)
    return out


def inscribed_radii(mesh):
    """Approximate radius of the largest ball inside each cell.

    The radius is the best distance-to-boundary over a few candidate centers:
    the centroid and the centroids of the fan triangles built on it.  Only
    candidates lying inside the cell are considered.
    """
    out = np.zeros(mesh.n_cells)
    centroids = mesh.centroids
    for ids, loops in mesh.size_groups.values():
        m, n = loops.shape
        chunk = max(1, 400_000 // (n * (n + 1)))
        for s in range(0, m, chunk):
            cid = ids[s:s + chunk]
            p = mesh.vertices[loops[s:s + chunk]]
            q = np.roll(p, -1, axis=1)
            c = centroids[cid][:, None, :]
            cand = np.concatenate([c, (c + p + q) / 3.0], axis=1)  # (M, n+1, 2)
            dist = _segment_distance(cand, p, q).min(axis=2)
            inside = _point_in_polygon(cand, p, q)
            dist = np.where(inside, dist, 0.0)
            out[cid] = dist.max(axis=1)
    return out


def _segment_distance(x, p, q):
    """Distances from points ``x`` (M, K, 2) to segments ``p->q`` (M, N, 2)."""
    d = (q - p)[:, None, :, :]
    w = x[:, :, None, :] - p[:, None, :, :]
    len2 = np.einsum("mknj,mknj->mkn", d, d)
    t = np.clip(np.einsum("mknj,mknj->mkn", w, d) / np.where(len2 > 0, len2, 1.0), 0.0, 1.0)
    diff = w - t[..., None] * d
    return np.sqrt(np.einsum("mknj,mknj->mkn", diff, diff))


def _point_in_polygon(x, p, q):
    """Even-odd crossing test of points ``x`` (M, K, 2) against loops (M, N, 2)."""
    px, py = p[:, None, :, 0], p[:, None, :, 1]
    qx, qy = q[:, None, :, 0], q[:, None, :, 1]
    xx, yy = x[:, :, None, 0], x[:, :, None, 1]
    straddle = (py > yy) != (qy > yy)
    with np.errstate(divide="ignore", invalid="ignore"):
        xcross = px + (yy - py) * (qx - px) / (qy - py)
    hits = straddle & (xx < xcross)
    return (hits.sum(axis=2) % 2) == 1


def measure(mesh):
    """Compute :class:`MeshQuality` for ``mesh``."""
    h_k = mesh.diameters
    hmin_k = cell_min_distances(mesh)
    rho_k = inscribed_radii(mesh)
    with np.errstate(divide="ignore"):
        gamma0 = float(np.max(h_k / rho_k))
    return MeshQuality(
        n_elt=mesh.n_cells,
        n_v=mesh.n_vertices,
        h=float(h_k.max()),
        h_min=float(hmin_k.min()),
        gamma0=gamma0,
        gamma1=float(np.max(h_k / hmin_k)),
    )
