"""Ruge-Stueben coarsening: C/F splitting and direct interpolation."""

import heapq

import numba
import numpy as np
import scipy.sparse as sp

from ..exceptions import InvalidParameterError
from .strength import strength_rs

F_POINT = 0
C_POINT = 1


@numba.njit(cache=True)
def _first_pass(s_ptr, s_idx, t_ptr, t_idx):
    n = s_ptr.shape[0] - 1
    U = -1
    state = np.full(n, U, dtype=np.int64)
    lam = np.empty(n, dtype=np.int64)
    heap = [(0, 0)]
    heap.pop()
    for i in range(n):
        lam[i] = t_ptr[i + 1] - t_ptr[i]
        if lam[i] == 0 and s_ptr[i + 1] == s_ptr[i]:
            state[i] = F_POINT  # isolated
        else:
            heap.append((-lam[i], i))
    heapq.heapify(heap)
    while heap:
        neg, i = heapq.heappop(heap)
        if state[i] != U or -neg != lam[i]:
            continue
        if lam[i] == 0:
            break
        state[i] = C_POINT
        for k in range(t_ptr[i], t_ptr[i + 1]):
            j = t_idx[k]
            if state[j] != U:
                continue
            state[j] = F_POINT
            for q in range(s_ptr[j], s_ptr[j + 1]):
                m = s_idx[q]
                if state[m] == U:
                    lam[m] += 1
                    heapq.heappush(heap, (-lam[m], m))
        for k in range(s_ptr[i], s_ptr[i + 1]):
            j = s_idx[k]
            if state[j] == U:
                lam[j] -= 1
                heapq.heappush(heap, (-lam[j], j))
    for i in range(n):
        if state[i] == U:
            state[i] = F_POINT
    # enforcement: every F point that is not isolated needs a strong C neighbor
    for i in range(n):
        if state[i] != F_POINT:
            continue
        if s_ptr[i + 1] == s_ptr[i]:
            if t_ptr[i + 1] > t_ptr[i]:
                state[i] = C_POINT
            continue
        has_c = False
        for k in range(s_ptr[i], s_ptr[i + 1]):
            if state[s_idx[k]] == C_POINT:
                has_c = True
                break
        if not has_c:
            state[i] = C_POINT
    return state


def cf_split(S):
    """Classical first-pass C/F splitting with a final enforcement sweep.

    Points are taken in order of decreasing measure ``lambda_i = |{j : i in S_j}|``
    (lowest index first among equals); each new C point turns the points it
    strongly influences into F points.  Afterwards every F point without a
    strong C neighbor is promoted to C.  Isolated points (no strong couplings
    in either direction) stay F and receive no interpolation.

    Returns
    -------
    ndarray of int
        ``1`` for C points, ``0`` for F points.
    """
    T = S.transpose()
    return _first_pass(S.indptr, S.indices, T.indptr, T.indices)


@numba.njit(cache=True)
def _direct_weights(indptr, indices, data, s_ptr, s_idx, is_c, cidx):
    n = indptr.shape[0] - 1
    strong = np.zeros(n, dtype=np.bool_)
    counts = np.zeros(n, dtype=np.int64)
    for i in range(n):
        if is_c[i]:
            counts[i] = 1
        else:
            for k in range(s_ptr[i], s_ptr[i + 1]):
                if is_c[s_idx[k]]:
                    counts[i] += 1
    ptr = np.zeros(n + 1, dtype=np.int64)
    for i in range(n):
        ptr[i + 1] = ptr[i] + counts[i]
    cols = np.empty(ptr[n], dtype=np.int64)
    vals = np.empty(ptr[n])
    for i in range(n):
        p = ptr[i]
        if is_c[i]:
            cols[p] = cidx[i]
            vals[p] = 1.0
            continue
        if counts[i] == 0:
            continue
        for k in range(s_ptr[i], s_ptr[i + 1]):
            strong[s_idx[k]] = True
        diag = 0.0
        neg_all = 0.0
        neg_c = 0.0
        for k in range(indptr[i], indptr[i + 1]):
            j = indices[k]
            a = data[k]
            if j == i:
                diag += a
            elif a > 0.0:
                diag += a  # lump positive couplings
            else:
                neg_all += a
                if strong[j] and is_c[j]:
                    neg_c += a
        scale = -neg_all / (neg_c * diag)
        for k in range(indptr[i], indptr[i + 1]):
            j = indices[k]
            if j != i and strong[j] and is_c[j]:
                cols[p] = cidx[j]
                vals[p] = scale * data[k]
                p += 1
        for k in range(s_ptr[i], s_ptr[i + 1]):
            strong[s_idx[k]] = False
    return ptr, cols, vals


def interp_direct(A, S, splitting):
    """Direct interpolation from strong C neighbors.

    For an F point ``i`` with strong C neighbors ``C_i``,
    ``w_ij = -(a_ij / a_ii) * (sum of negative a_ik) / (sum over C_i of a_ik)``
    where positive off-diagonal entries are added to ``a_ii``.  C points
    are injected; isolated F points get empty rows.

    Returns
    -------
    scipy.sparse.csr_matrix
        Prolongation of shape ``(n, n_coarse)``.

    Raises
    ------
    InvalidParameterError
        If an F point has strong couplings but none of them to a C point.
    """
    is_c = np.asarray(splitting) == C_POINT
    cidx = np.cumsum(is_c) - 1
    rows = np.repeat(np.arange(S.n), np.diff(S.indptr))
    n_strong_c = np.bincount(rows, weights=is_c[S.indices], minlength=S.n)
    orphan = np.flatnonzero(~is_c & (np.diff(S.indptr) > 0) & (n_strong_c == 0))
    if orphan.size:
        raise InvalidParameterError(f"F point {orphan[0]} has no strong C neighbor")
    ptr, cols, vals = _direct_weights(A.indptr, A.indices, A.data, S.indptr, S.indices, is_c, cidx)
    return sp.csr_matrix((vals, cols, ptr), shape=(A.shape[0], int(is_c.sum())))


def ruge_stueben_prolongator(A, theta=0.25):
    """Strength, splitting and interpolation in one call."""
    S = strength_rs(A, theta)
    return interp_direct(A, S, cf_split(S))

