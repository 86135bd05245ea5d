"""Independent reference computations shared by the test modules."""

import numpy as np

GAUSS_X, GAUSS_W = np.polynomial.legendre.leggauss(3)


def centroid_and_diameter(P):
    Q = np.roll(P, -1, axis=0)
    cr = P[:, 0] * Q[:, 1] - Q[:, 0] * P[:, 1]
    area = cr.sum() / 2
    cen = ((P + Q) * cr[:, None]).sum(axis=0) / (6 * area)
    diam = max(np.linalg.norm(p - q) for p in P for q in P)
    return cen, diam


def quadrature_projector(P):
    """Pi_dof from edge integrals of the hat functions, by Gauss quadrature."""
    N = len(P)
    cen, h = centroid_and_diameter(P)
    D = np.column_stack([np.ones(N), (P - cen) / h])
    B = np.zeros((3, N))
    B[0] = 1.0 / N
    for e in range(N):
        a, b = P[e], P[(e + 1) % N]
        t = b - a
        n = np.array([t[1], -t[0]])  # outward normal times edge length for CCW loops
        for xg, wg in zip(GAUSS_X, GAUSS_W):
            s = (xg + 1) / 2
            w = wg / 2
            # hat of vertex e is 1 - s on this edge, hat of e+1 is s
            B[1:, e] += w * (1 - s) * n / h
            B[1:, (e + 1) % N] += w * s * n / h
    G = B @ D
    return D @ np.linalg.solve(G, B)
