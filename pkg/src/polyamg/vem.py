"""Lowest-order virtual elements for ``-div(rho grad u) = f`` on polygonal meshes.

Degrees of freedom are vertex values, so the global system has one unknown
per mesh vertex.  Local matrices use the scaled monomials ``1``,
``(x - x_K)/h_K`` and ``(y - y_K)/h_K``; the projector ``Pi`` onto linears
fixes its constant part by the vertex average, and the stabilization is the
identity on the dofs scaled by ``rho_K``.
"""

from dataclasses import dataclass

import numpy as np
import scipy.sparse as sp

from .exceptions import DegenerateElementError, DimensionMismatchError, InvalidParameterError
from .sparse import CooBuilder, as_csr

DEGENERATE_TOL = 1e-14  # smallest admissible |K| / h_K^2


@dataclass(frozen=True)
class LocalElementMatrices:
    """Per-cell matrices of the projector and the stiffness.

    Attributes
    ----------
    D : ndarray, shape (N, 3)
        Monomial values at the vertices.
    B : ndarray, shape (3, N)
        Right-hand side of the projector equations.
    G : ndarray, shape (3, 3)
        ``B @ D``.
    Pi_star : ndarray, shape (3, N)
        Monomial coefficients of the projection of each basis function.
    Pi_dof : ndarray, shape (N, N)
        The projection expressed in dofs, ``D @ Pi_star``.
    K_loc : ndarray or None
        Local stiffness; None when only the projector was requested.
    """

    D: np.ndarray
    B: np.ndarray
    G: np.ndarray
    Pi_star: np.ndarray
    Pi_dof: np.ndarray
    K_loc: np.ndarray | None = None


@dataclass(frozen=True)
class CoefficientField:
    """Piecewise-constant diffusion coefficient, one positive value per cell."""

    rho_of_cell: np.ndarray

    def __post_init__(self):
        rho = np.asarray(self.rho_of_cell, dtype=np.float64)
        if rho.ndim != 1 or not np.all(np.isfinite(rho)) or np.any(rho <= 0):
            raise InvalidParameterError("coefficients must be a 1-D array of positive finite values")
        rho.setflags(write=False)
        object.__setattr__(self, "rho_of_cell", rho)

    @classmethod
    def constant(cls, n_cells, value=1.0):
        return cls(np.full(n_cells, float(value)))


@dataclass(frozen=True)
class DiscreteSystem:
    """Linear system ``A u = b`` with boundary rows replaced by identity rows."""

    A: sp.csr_matrix
    b: np.ndarray
    boundary_dofs: np.ndarray
    mesh: object = None

    @property
    def n_dofs(self):
        return self.A.shape[0]


# ---- geometry and batched local matrices ----------------------------------

def _geometry(P):
    """Areas, centroids and diameters of CCW polygons ``P`` of shape (M, N, 2)."""
    Q = np.roll(P, -1, axis=1)
    cross = P[..., 0] * Q[..., 1] - Q[..., 0] * P[..., 1]
    area = 0.5 * cross.sum(axis=1)
    with np.errstate(divide="ignore", invalid="ignore"):
        cen = ((P + Q) * cross[..., None]).sum(axis=1) / (6.0 * area[:, None])
    d = P[:, :, None, :] - P[:, None, :, :]
    diam = np.sqrt((d**2).sum(axis=-1)).max(axis=(1, 2))
    return area, cen, diam


def _projectors(P):
    """D, B, G, Pi_star, Pi_dof for a batch of polygons with ``N`` vertices each.

    Returns the matrices plus the boolean mask of degenerate cells.
    """
    M, N, _ = P.shape
    area, cen, h = _geometry(P)
    bad = ~(np.abs(area) > DEGENERATE_TOL * h**2) | ~np.isfinite(cen).all(axis=1)
    h = np.where(bad, 1.0, h)
    cen = np.where(bad[:, None], 0.0, cen)

    D = np.empty((M, N, 3))
    D[..., 0] = 1.0
    D[..., 1:] = (P - cen[:, None, :]) / h[:, None, None]

    nxt = np.roll(P, -1, axis=1)
    prv = np.roll(P, 1, axis=1)
    B = np.empty((M, 3, N))
    B[:, 0, :] = 1.0 / N
    B[:, 1, :] = (nxt[..., 1] - prv[..., 1]) / (2.0 * h[:, None])
    B[:, 2, :] = (prv[..., 0] - nxt[..., 0]) / (2.0 * h[:, None])

    G = B @ D
    G[bad] = np.eye(3)
    Pi_star = np.linalg.solve(G, B)
    Pi_dof = D @ Pi_star
    return D, B, G, Pi_star, Pi_dof, bad


def _stiffness(G, Pi_star, Pi_dof, rho):
    Gt = G.copy()
    Gt[:, 0, :] = 0.0
    N = Pi_dof.shape[1]
    R = np.eye(N) - Pi_dof
    K = np.swapaxes(Pi_star, 1, 2) @ Gt @ Pi_star + np.swapaxes(R, 1, 2) @ R
    return K * np.asarray(rho, dtype=np.float64).reshape(-1, 1, 1)


def _as_polygon(cell):
    P = np.asarray(cell, dtype=np.float64)
    if P.ndim != 2 or P.shape[1] != 2 or P.shape[0] < 3:
        raise InvalidParameterError("a cell is an (N, 2) array of CCW vertices with N >= 3")
    return P[None]


def local_projector(cell, rho_K=1.0):
    """Projector matrices of one polygon.

    Parameters
    ----------
    cell : array_like, shape (N, 2)
        Counter-clockwise vertex coordinates.
    rho_K : float
        Cell coefficient; accepted for symmetry with :func:`local_stiffness`
        but the projector does not depend on it.

    Raises
    ------
    DegenerateElementError
        If the cell has (numerically) zero area.
    """
    if not rho_K > 0:
        raise InvalidParameterError("rho_K must be positive")
    D, B, G, Pi_star, Pi_dof, bad = _projectors(_as_polygon(cell))
    if bad[0]:
        raise DegenerateElementError("zero area or collinear vertices")
    return LocalElementMatrices(D[0], B[0], G[0], Pi_star[0], Pi_dof[0])


def local_stiffness(cell, rho_K=1.0):
    """Projector matrices and the stabilized local stiffness of one polygon."""
    loc = local_projector(cell, rho_K)
    K = _stiffness(loc.G[None], loc.Pi_star[None], loc.Pi_dof[None], [rho_K])[0]
    return LocalElementMatrices(loc.D, loc.B, loc.G, loc.Pi_star, loc.Pi_dof, K)


def _rho_array(mesh, rho):
    if isinstance(rho, CoefficientField):
        r = rho.rho_of_cell
    elif np.ndim(rho) == 0:
        r = CoefficientField.constant(mesh.n_cells, rho).rho_of_cell
    else:
        r = CoefficientField(rho).rho_of_cell
    if r.shape != (mesh.n_cells,):
        raise DimensionMismatchError(f"need {mesh.n_cells} coefficients, got {r.shape[0]}")
    return r


def element_stiffness(mesh, rho=1.0):
    """Local stiffness matrices grouped by cell size.

    Returns
    -------
    dict
        ``{N: (cell_ids, loops, K)}`` with ``K`` of shape ``(M, N, N)``.
    """
    rho = _rho_array(mesh, rho)
    out = {}
    for n, (ids, loops) in sorted(mesh.size_groups.items()):
        _, _, G, Pi_star, Pi_dof, bad = _projectors(mesh.vertices[loops])
        if bad.any():
            raise DegenerateElementError("zero area or collinear vertices", int(ids[np.argmax(bad)]))
        out[n] = (ids, loops, _stiffness(G, Pi_star, Pi_dof, rho[ids]))
    return out


# ---- global operators -----------------------------------------------------

def assemble(mesh, rho=1.0):
    """Global stiffness matrix (no boundary treatment).

    Parameters
    ----------
    mesh : PolygonalMesh
    rho : float, array_like or CoefficientField
        Diffusion coefficient, constant or per cell.

    Returns
    -------
    scipy.sparse.csr_matrix
        Symmetric positive semi-definite matrix of size ``n_vertices`` whose
        rows sum to zero.
    """
    nv = mesh.n_vertices
    builder = CooBuilder((nv, nv))
    for n, (_, loops, K) in element_stiffness(mesh, rho).items():
        rows = np.broadcast_to(loops[:, :, None], K.shape)
        cols = np.broadcast_to(loops[:, None, :], K.shape)
        builder.add(rows, cols, K)
    return builder.finalize()


def assemble_rhs(mesh, f):
    """Load vector ``f_j = sum_K f_K |K| / N_K`` over the cells around vertex ``j``.

    Parameters
    ----------
    f : callable or array_like
        Either ``f(x, y)`` evaluated at cell centroids, or one value per cell.
    """
    if callable(f):
        c = mesh.centroids
        fk = np.broadcast_to(np.asarray(f(c[:, 0], c[:, 1]), dtype=np.float64), (mesh.n_cells,))
    else:
        fk = np.asarray(f, dtype=np.float64)
        if fk.shape != (mesh.n_cells,):
            raise DimensionMismatchError(f"need {mesh.n_cells} cell values, got {fk.shape}")
    share = fk * mesh.areas / mesh.cell_sizes
    return np.bincount(mesh.cell_idx, weights=share[mesh.cell_of_corner], minlength=mesh.n_vertices)


def apply_dirichlet(A, b, boundary_dofs, g=None, mesh=None):
    """Impose ``u = g`` on ``boundary_dofs`` by symmetric elimination.

    The system keeps its size: boundary rows and columns are zeroed, their
    diagonal set to one and their right-hand side to ``g``; interior entries
    of ``b`` are corrected by ``-A[:, boundary] @ g``.

    Parameters
    ----------
    g : None, float or array_like
        Boundary values, either one per boundary dof or one per dof (only the
        boundary entries are read).  None means homogeneous data.
    """
    A = as_csr(A)
    n = A.shape[0]
    b = np.asarray(b, dtype=np.float64)
    if A.shape[1] != n or b.shape != (n,):
        raise DimensionMismatchError("apply_dirichlet needs square A and matching b")
    bd = np.unique(np.asarray(boundary_dofs, dtype=np.int64))
    if bd.size and (bd[0] < 0 or bd[-1] >= n):
        raise IndexError("boundary dof out of range")
    if g is None:
        gb = np.zeros(bd.size)
    elif np.ndim(g) == 0:
        gb = np.full(bd.size, float(g))
    else:
        g = np.asarray(g, dtype=np.float64)
        gb = g[bd] if g.shape == (n,) else g
        if gb.shape != bd.shape:
            raise DimensionMismatchError("boundary values do not match boundary dofs")

    full = np.zeros(n)
    full[bd] = gb
    rhs = b - A @ full
    rhs[bd] = gb
    keep = np.ones(n)
    keep[bd] = 0.0
    Dk = sp.diags(keep)
    A_bc = as_csr(Dk @ A @ Dk + sp.diags(1.0 - keep))
    return DiscreteSystem(A_bc, rhs, bd, mesh)


def boundary_dofs(mesh):
    """Indices of the vertices on the boundary of the unit square."""
    return np.flatnonzero(mesh.boundary_vertex)


def build_system(mesh, rho=1.0, f=0.0, g=None):
    """Assemble, load and constrain in one call."""
    A = assemble(mesh, rho)
    b = assemble_rhs(mesh, f if callable(f) or np.ndim(f) else np.full(mesh.n_cells, float(f)))
    return apply_dirichlet(A, b, boundary_dofs(mesh), g, mesh)


def projection_coefficients(mesh, u_h):
    """Cellwise projection of ``u_h`` as (value at centroid, gradient).

    Returns
    -------
    values : ndarray, shape (n_cells,)
    gradients : ndarray, shape (n_cells, 2)
    """
    u_h = np.asarray(u_h, dtype=np.float64)
    if u_h.shape != (mesh.n_vertices,):
        raise DimensionMismatchError(f"need {mesh.n_vertices} dof values, got {u_h.shape}")
    grads = np.empty((mesh.n_cells, 2))
    means = np.empty(mesh.n_cells)
    for _, (ids, loops) in mesh.size_groups.items():
        P = mesh.vertices[loops]
        _, cen, h = _geometry(P)
        _, _, _, Pi_star, _, bad = _projectors(P)
        if bad.any():
            raise DegenerateElementError("zero area or collinear vertices", int(ids[np.argmax(bad)]))
        c = np.einsum("mak,mk->ma", Pi_star, u_h[loops])
        grads[ids] = c[:, 1:] / h[:, None]
        means[ids] = c[:, 0]
    return means, grads


def error_norms(mesh, u_h, u_exact, grad_u_exact):
    """L2 and H1-seminorm errors of the cellwise projection of ``u_h``.

    On each cell the projection of ``u_h`` is a linear function; it is
    compared with the exact solution on the fan of triangles joining the
    centroid to the edges, using the edge-midpoint rule on each triangle.

    Parameters
    ----------
    u_exact : callable
        ``u(x, y)``, vectorized.
    grad_u_exact : callable
        ``(ux, uy) = grad_u(x, y)``, vectorized.

    Returns
    -------
    l2_error, h1_seminorm_error : float
    """
    c0, grads = projection_coefficients(mesh, u_h)
    cen = mesh.centroids
    l2 = 0.0
    h1 = 0.0
    for _, (ids, loops) in mesh.size_groups.items():
        P = mesh.vertices[loops]
        Q = np.roll(P, -1, axis=1)
        C = np.broadcast_to(cen[ids][:, None, :], P.shape)
        area_t = 0.5 * ((P[..., 0] - C[..., 0]) * (Q[..., 1] - C[..., 1])
                        - (Q[..., 0] - C[..., 0]) * (P[..., 1] - C[..., 1]))
        for X in ((C + P) / 2, (P + Q) / 2, (Q + C) / 2):
            x, y = X[..., 0], X[..., 1]
            gx, gy = grads[ids, 0][:, None], grads[ids, 1][:, None]
            ph = c0[ids][:, None] + gx * (x - C[..., 0]) + gy * (y - C[..., 1])
            ux, uy = grad_u_exact(x, y)
            l2 += np.sum(area_t / 3 * (u_exact(x, y) - ph) ** 2)
            h1 += np.sum(area_t / 3 * ((ux - gx) ** 2 + (uy - gy) ** 2))
    return float(np.sqrt(max(l2, 0.0))), float(np.sqrt(max(h1, 0.0)))
