"""Smoothed aggregation: root-based aggregates and the smoothed prolongator."""

import numba
import numpy as np
import scipy.sparse as sp

from ..exceptions import SingularDiagonalError
from .strength import strength_sa

POWER_ITERATIONS = 10


@numba.njit(cache=True)
def _aggregate(s_ptr, s_idx, weight, keep_isolated):
    n = s_ptr.shape[0] - 1
    agg = np.full(n, -1, dtype=np.int64)
    n_agg = 0
    # pass 1: roots whose whole strong neighborhood is still free
    for i in range(n):
        if agg[i] >= 0 or s_ptr[i + 1] == s_ptr[i]:
            continue
        free = True
        for k in range(s_ptr[i], s_ptr[i + 1]):
            if agg[s_idx[k]] >= 0:
                free = False
                break
        if not free:
            continue
        agg[i] = n_agg
        for k in range(s_ptr[i], s_ptr[i + 1]):
            agg[s_idx[k]] = n_agg
        n_agg += 1
    # pass 2: attach leftovers to the strongest neighboring pass-1 aggregate
    first = agg.copy()
    for i in range(n):
        if agg[i] >= 0:
            continue
        best, best_w = -1, -1.0
        for k in range(s_ptr[i], s_ptr[i + 1]):
            j = s_idx[k]
            if first[j] >= 0 and weight[k] > best_w:
                best, best_w = first[j], weight[k]
        if best >= 0:
            agg[i] = best
    # pass 3: whatever is left forms new aggregates with its free neighbors
    for i in range(n):
        if agg[i] >= 0:
            continue
        if s_ptr[i + 1] == s_ptr[i] and not keep_isolated:
            continue
        agg[i] = n_agg
        for k in range(s_ptr[i], s_ptr[i + 1]):
            if agg[s_idx[k]] < 0:
                agg[s_idx[k]] = n_agg
        n_agg += 1
    return agg, n_agg


def aggregate_sa(A, theta=0.08, keep_isolated=True):
    """Root-based aggregation on the graph ``|a_ij| > theta * sqrt(|a_ii a_jj|)``.

    Parameters
    ----------
    A : scipy.sparse.csr_matrix
    theta : float
    keep_isolated : bool
        Nodes without strong neighbors become singleton aggregates when True;
        otherwise they are left out (label ``-1``) and get no coarse dof.

    Returns
    -------
    labels : ndarray of int
        Aggregate of each node, or ``-1``.
    n_aggregates : int
    """
    S = strength_sa(A, theta)
    weight = np.abs(S.values)
    agg, n_agg = _aggregate(S.indptr, S.indices, weight, bool(keep_isolated))
    return agg, int(n_agg)


def tentative_prolongator(labels, n_aggregates):
    """Piecewise-constant indicator of the aggregates; unassigned rows are empty."""
    labels = np.asarray(labels)
    rows = np.flatnonzero(labels >= 0)
    return sp.csr_matrix((np.ones(rows.size), (rows, labels[rows])),
                         shape=(labels.size, n_aggregates))


def _inverse_diagonal(A):
    d = A.diagonal()
    zero = np.flatnonzero(d == 0)
    if zero.size:
        raise SingularDiagonalError(int(zero[0]))
    return 1.0 / d


def estimate_lambda_max(A, iterations=POWER_ITERATIONS, rng_seed=0):
    """Estimate the largest eigenvalue of ``D^-1 A`` by power iteration.

    The estimate is the Rayleigh quotient ``x^T A x / x^T D x`` of the last
    iterate, which for SPD ``A`` never exceeds the true value.
    """
    dinv = _inverse_diagonal(A)
    x = np.random.default_rng(rng_seed).random(A.shape[0]) + 0.5
    for _ in range(iterations):
        x = dinv * (A @ x)
        nrm = np.linalg.norm(x)
        if nrm == 0.0:
            return 0.0
        x /= nrm
    ax = A @ x
    dx = x / dinv
    return float(x @ ax) / float(x @ dx)


def prolong_sa(A, labels, n_aggregates, omega=None):
    """Smoothed prolongator ``P = (I - omega D^-1 A) P0``.

    Parameters
    ----------
    omega : float, optional
        Damping; defaults to ``4 / (3 * lambda)`` with ``lambda`` from
        :func:`estimate_lambda_max`.
    """
    P0 = tentative_prolongator(labels, n_aggregates)
    dinv = _inverse_diagonal(A)
    if omega is None:
        lam = estimate_lambda_max(A)
        omega = 4.0 / (3.0 * lam) if lam > 0 else 0.0
    if omega == 0.0:
        return P0
    P = P0 - sp.diags(omega * dinv) @ (A @ P0)
    return sp.csr_matrix(P)
