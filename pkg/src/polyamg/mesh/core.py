"""Polygonal tessellations of the unit square."""

from dataclasses import dataclass
from functools import cached_property

import numpy as np

from ..exceptions import MeshValidationError

BOUNDARY_TOL = 1e-12
AREA_TOL = 1e-10


@dataclass(frozen=True, eq=False)
class PolygonalMesh:
    """Conforming polygonal mesh stored in flat (CSR-like) cell arrays.

    Parameters
    ----------
    vertices : ndarray of shape (n_vertices, 2)
        Vertex coordinates in the unit square.
    cell_ptr : ndarray of shape (n_cells + 1,)
        Offsets of each cell's vertex loop in ``cell_idx``.
    cell_idx : ndarray
        Concatenated counter-clockwise vertex loops.

    Notes
    -----
    Instances are immutable; derived quantities (areas, adjacency, boundary
    flags) are computed lazily and cached.
    """

    vertices: np.ndarray
    cell_ptr: np.ndarray
    cell_idx: np.ndarray

    def __post_init__(self):
        vertices = np.ascontiguousarray(self.vertices, dtype=np.float64).reshape(-1, 2)
        cell_ptr = np.ascontiguousarray(self.cell_ptr, dtype=np.int64)
        cell_idx = np.ascontiguousarray(self.cell_idx, dtype=np.int64)
        for arr in (vertices, cell_ptr, cell_idx):
            arr.setflags(write=False)
        object.__setattr__(self, "vertices", vertices)
        object.__setattr__(self, "cell_ptr", cell_ptr)
        object.__setattr__(self, "cell_idx", cell_idx)

    @classmethod
    def from_cells(cls, vertices, cells):
        """Build a mesh from a vertex array and a sequence of index loops."""
        cells = [np.asarray(c, dtype=np.int64) for c in cells]
        sizes = np.array([len(c) for c in cells], dtype=np.int64)
        cell_ptr = np.concatenate([[0], np.cumsum(sizes)])
        cell_idx = np.concatenate(cells) if cells else np.zeros(0, dtype=np.int64)
        return cls(vertices, cell_ptr, cell_idx)

    def __eq__(self, other):
        if not isinstance(other, PolygonalMesh):
            return NotImplemented
        return (
            np.array_equal(self.vertices, other.vertices)
            and np.array_equal(self.cell_ptr, other.cell_ptr)
            and np.array_equal(self.cell_idx, other.cell_idx)
        )

    __hash__ = None

    def __repr__(self):
        return f"PolygonalMesh(n_vertices={self.n_vertices}, n_cells={self.n_cells})"

    @property
    def n_vertices(self):
        return self.vertices.shape[0]

    @property
    def n_cells(self):
        return self.cell_ptr.shape[0] - 1

    @cached_property
    def cell_sizes(self):
        return np.diff(self.cell_ptr)

    @property
    def cells(self):
        """List of per-cell vertex index arrays."""
        return np.split(self.cell_idx, self.cell_ptr[1:-1])

    def cell(self, k):
        return self.cell_idx[self.cell_ptr[k]:self.cell_ptr[k + 1]]

    @cached_property
    def cell_of_corner(self):
        """Owning cell of every entry of ``cell_idx``."""
        return np.repeat(np.arange(self.n_cells), self.cell_sizes)

    @cached_property
    def _next_pos(self):
        pos = np.arange(self.cell_idx.shape[0]) + 1
        pos[self.cell_ptr[1:] - 1] = self.cell_ptr[:-1]
        return pos

    @cached_property
    def _prev_pos(self):
        pos = np.arange(self.cell_idx.shape[0]) - 1
        pos[self.cell_ptr[:-1]] = self.cell_ptr[1:] - 1
        return pos

    @cached_property
    def size_groups(self):
        """Map from loop length to ``(cell ids, (M, N) vertex-index array)``."""
        groups = {}
        sizes = self.cell_sizes
        for n in np.unique(sizes):
            ids = np.flatnonzero(sizes == n)
            idx = self.cell_ptr[ids][:, None] + np.arange(n)[None, :]
            groups[int(n)] = (ids, self.cell_idx[idx])
        return groups

    @cached_property
    def signed_areas(self):
        xy = self.vertices[self.cell_idx]
        nxt = self.vertices[self.cell_idx[self._next_pos]]
        cross = xy[:, 0] * nxt[:, 1] - nxt[:, 0] * xy[:, 1]
        return 0.5 * np.add.reduceat(cross, self.cell_ptr[:-1]) if self.n_cells else np.zeros(0)

    @property
    def areas(self):
        return self.signed_areas

    @cached_property
    def centroids(self):
        xy = self.vertices[self.cell_idx]
        nxt = self.vertices[self.cell_idx[self._next_pos]]
        cross = xy[:, 0] * nxt[:, 1] - nxt[:, 0] * xy[:, 1]
        cx = np.add.reduceat((xy[:, 0] + nxt[:, 0]) * cross, self.cell_ptr[:-1])
        cy = np.add.reduceat((xy[:, 1] + nxt[:, 1]) * cross, self.cell_ptr[:-1])
        six_a = 6.0 * self.signed_areas
        return np.column_stack([cx / six_a, cy / six_a])

    @cached_property
    def diameters(self):
        """Cell diameters ``h_K`` (maximum vertex-pair distance)."""
        out = np.empty(self.n_cells)
        for ids, loops in self.size_groups.values():
            out[ids] = _pairwise_extreme(self.vertices, loops, np.max)
        return out

    @cached_property
    def boundary_vertex(self):
        x, y = self.vertices[:, 0], self.vertices[:, 1]
        tol = BOUNDARY_TOL
        return (x <= tol) | (x >= 1.0 - tol) | (y <= tol) | (y >= 1.0 - tol)

    @cached_property
    def _edge_table(self):
        a = self.cell_idx
        b = self.cell_idx[self._next_pos]
        lo, hi = np.minimum(a, b), np.maximum(a, b)
        key = lo * self.n_vertices + hi
        uniq, inverse, counts = np.unique(key, return_inverse=True, return_counts=True)
        return uniq, inverse, counts

    @cached_property
    def edges(self):
        """Unique undirected edges as an ``(n_edges, 2)`` array (low, high)."""
        uniq = self._edge_table[0]
        return np.column_stack([uniq // self.n_vertices, uniq % self.n_vertices])

    @cached_property
    def cell_adjacency(self):
        """Edge-sharing cell pairs ``(c1, c2)`` with ``c1 < c2``, one row per shared edge."""
        _, inverse, counts = self._edge_table
        order = np.argsort(inverse, kind="stable")
        inv_sorted = inverse[order]
        starts = np.searchsorted(inv_sorted, np.flatnonzero(counts == 2))
        owners = self.cell_of_corner[order]
        c1, c2 = owners[starts], owners[starts + 1]
        pairs = np.column_stack([np.minimum(c1, c2), np.maximum(c1, c2)])
        return pairs[pairs[:, 0] != pairs[:, 1]]

    @cached_property
    def cell_graph(self):
        """Symmetric cell adjacency as ``(indptr, indices)`` arrays."""
        pairs = np.unique(self.cell_adjacency, axis=0) if len(self.cell_adjacency) else \
            np.zeros((0, 2), dtype=np.int64)
        rows = np.concatenate([pairs[:, 0], pairs[:, 1]])
        cols = np.concatenate([pairs[:, 1], pairs[:, 0]])
        order = np.lexsort((cols, rows))
        rows, cols = rows[order], cols[order]
        indptr = np.zeros(self.n_cells + 1, dtype=np.int64)
        np.add.at(indptr, rows + 1, 1)
        return np.cumsum(indptr), cols

    def validate(self, check_simple=True):
        """Check the tessellation invariants, raising :class:`MeshValidationError`.

        Parameters
        ----------
        check_simple : bool, default=True
            Also test every loop for self-intersections (quadratic in loop
            length, so it can be skipped for very large meshes).
        """
        if self.n_cells == 0:
            raise MeshValidationError("mesh has no cells")
        if np.any(self.cell_sizes < 3):
            k = int(np.flatnonzero(self.cell_sizes < 3)[0])
            raise MeshValidationError(f"cell {k} has fewer than 3 vertices")
        if self.cell_idx.min() < 0 or self.cell_idx.max() >= self.n_vertices:
            raise MeshValidationError("vertex index out of range")
        if not np.all(np.isfinite(self.vertices)):
            raise MeshValidationError("non-finite vertex coordinates")
        used = np.zeros(self.n_vertices, dtype=bool)
        used[self.cell_idx] = True
        if not used.all():
            raise MeshValidationError(f"vertex {int(np.flatnonzero(~used)[0])} is not used by any cell")

        for ids, loops in self.size_groups.values():
            srt = np.sort(loops, axis=1)
            dup = np.any(srt[:, 1:] == srt[:, :-1], axis=1)
            if dup.any():
                raise MeshValidationError(f"cell {int(ids[dup][0])} repeats a vertex")

        bad = np.flatnonzero(self.signed_areas <= 0.0)
        if bad.size:
            raise MeshValidationError(f"cell {int(bad[0])} is not counter-clockwise")
        total = float(self.signed_areas.sum())
        if abs(total - 1.0) > AREA_TOL:
            raise MeshValidationError(f"cell areas sum to {total!r}, expected 1")

        self._check_conformity()
        if check_simple:
            for ids, loops in self.size_groups.values():
                hit = _self_intersecting(self.vertices, loops)
                if hit.any():
                    raise MeshValidationError(f"cell {int(ids[hit][0])} is not a simple polygon")
        return self

    def _check_conformity(self):
        uniq, inverse, counts = self._edge_table
        if np.any(counts > 2):
            raise MeshValidationError("an edge is shared by more than two cells")
        a = self.cell_idx
        b = self.cell_idx[self._next_pos]
        # interior edges must be traversed once in each direction
        forward = (a < b).astype(np.int64)
        fwd_count = np.bincount(inverse, weights=forward, minlength=uniq.size)
        interior = counts == 2
        if np.any(fwd_count[interior] != 1):
            raise MeshValidationError("adjacent cells have inconsistent orientation")
        single = np.flatnonzero(counts == 1)
        lo = uniq[single] // self.n_vertices
        hi = uniq[single] % self.n_vertices
        p, q = self.vertices[lo], self.vertices[hi]
        tol = BOUNDARY_TOL
        on_side = (
            ((p[:, 0] <= tol) & (q[:, 0] <= tol))
            | ((p[:, 0] >= 1 - tol) & (q[:, 0] >= 1 - tol))
            | ((p[:, 1] <= tol) & (q[:, 1] <= tol))
            | ((p[:, 1] >= 1 - tol) & (q[:, 1] >= 1 - tol))
        )
        if not on_side.all():
            e = int(np.flatnonzero(~on_side)[0])
            raise MeshValidationError(
                f"edge ({int(lo[e])}, {int(hi[e])}) belongs to one cell but is not on the boundary"
            )


def _pairwise_extreme(vertices, loops, reducer):
    """Reduce all vertex-pair distances of equal-length loops (chunked)."""
    m, n = loops.shape
    out = np.empty(m)
    chunk = max(1, 2_000_000 // (n * n))
    iu = np.triu_indices(n, 1)
    for s in range(0, m, chunk):
        xy = vertices[loops[s:s + chunk]]
        diff = xy[:, :, None, :] - xy[:, None, :, :]
        dist = np.sqrt(np.einsum("mijk,mijk->mij", diff, diff))
        out[s:s + chunk] = reducer(dist[:, iu[0], iu[1]], axis=1)
    return out


def _self_intersecting(vertices, loops):
    """Flag loops with crossing or touching non-adjacent edges."""
    m, n = loops.shape
    out = np.zeros(m, dtype=bool)
    chunk = max(1, 1_000_000 // (n * n))
    i, j = np.triu_indices(n, 1)
    nonadj = (j - i > 1) & ~((i == 0) & (j == n - 1))
    i, j = i[nonadj], j[nonadj]
    for s in range(0, m, chunk):
        p = vertices[loops[s:s + chunk]]
        q = np.roll(p, -1, axis=1)
        # consecutive edges folding back onto each other
        e = q - p
        e_prev = np.roll(e, 1, axis=1)
        cr = e_prev[..., 0] * e[..., 1] - e_prev[..., 1] * e[..., 0]
        dt = np.einsum("mik,mik->mi", e_prev, e)
        fold = np.any((cr == 0.0) & (dt < 0.0), axis=1)
        if i.size:
            a1, a2, b1, b2 = p[:, i], q[:, i], p[:, j], q[:, j]
            span = np.ptp(p, axis=1).max(axis=1)[:, None]
            zero = 1e-13 * span * span
            d1 = _snap(_orient(b1, b2, a1), zero)
            d2 = _snap(_orient(b1, b2, a2), zero)
            d3 = _snap(_orient(a1, a2, b1), zero)
            d4 = _snap(_orient(a1, a2, b2), zero)
            proper = (d1 * d2 <= 0) & (d3 * d4 <= 0)
            collinear = (d1 == 0) & (d2 == 0)
            lo_a, hi_a = np.minimum(a1, a2), np.maximum(a1, a2)
            lo_b, hi_b = np.minimum(b1, b2), np.maximum(b1, b2)
            boxes = np.all((lo_a <= hi_b) & (lo_b <= hi_a), axis=-1)
            hit = np.where(collinear, boxes, proper)
            out[s:s + chunk] = fold | hit.any(axis=1)
        else:
            out[s:s + chunk] = fold
    return out


def _snap(d, zero):
    return np.where(np.abs(d) <= zero, 0.0, d)


def _orient(a, b, c):
    return (b[..., 0] - a[..., 0]) * (c[..., 1] - a[..., 1]) - (b[..., 1] - a[..., 1]) * (c[..., 0] - a[..., 0])
