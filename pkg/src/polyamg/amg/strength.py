"""Strength-of-connection graphs."""

from dataclasses import dataclass

import numba
import numpy as np
import scipy.sparse as sp

from ..exceptions import InvalidParameterError


@dataclass(frozen=True)
class StrengthGraph:
    """Strong couplings ``S_i`` of every row, stored as a CSR pattern.

    Attributes
    ----------
    indptr, indices : ndarray
        Row ``i`` is strongly connected to ``indices[indptr[i]:indptr[i+1]]``.
    theta : float
        Threshold used to build the graph.
    values : ndarray, optional
        The matrix entries ``a_ij`` of the strong couplings.
    """

    indptr: np.ndarray
    indices: np.ndarray
    theta: float
    values: np.ndarray = None

    @property
    def n(self):
        return self.indptr.shape[0] - 1

    def row(self, i):
        return self.indices[self.indptr[i]:self.indptr[i + 1]]

    def to_csr(self):
        data = np.ones(self.indices.shape[0])
        return sp.csr_matrix((data, self.indices, self.indptr), shape=(self.n, self.n))

    def transpose(self):
        """Graph of ``S^T``: row ``j`` lists the ``i`` with ``j`` in ``S_i``."""
        T = self.to_csr().T.tocsr()
        T.sort_indices()
        return StrengthGraph(T.indptr.astype(np.int64), T.indices.astype(np.int64), self.theta)


def _check_theta(theta):
    if not 0.0 < theta < 1.0:
        raise InvalidParameterError(f"strength threshold must lie in (0, 1), got {theta}")


@numba.njit(cache=True)
def _rs_count(indptr, indices, data, theta, mark):
    n = indptr.shape[0] - 1
    total = 0
    for i in range(n):
        big = 0.0
        for k in range(indptr[i], indptr[i + 1]):
            if indices[k] != i and -data[k] > big:
                big = -data[k]
        if big <= 0.0:
            continue
        cut = theta * big
        for k in range(indptr[i], indptr[i + 1]):
            if indices[k] != i and -data[k] >= cut:
                mark[k] = True
                total += 1
    return total


def strength_rs(A, theta=0.25):
    """Classical strength: ``j`` in ``S_i`` iff ``-a_ij >= theta * max_{k != i} (-a_ik)``.

    Rows without negative off-diagonal entries get an empty set.
    """
    _check_theta(theta)
    mark = np.zeros(A.nnz, dtype=np.bool_)
    _rs_count(A.indptr, A.indices, A.data, float(theta), mark)
    return _from_mark(A, mark, theta)


@numba.njit(cache=True)
def _sa_mark(indptr, indices, data, theta, mark):
    n = indptr.shape[0] - 1
    diag = np.zeros(n)
    for i in range(n):
        for k in range(indptr[i], indptr[i + 1]):
            if indices[k] == i:
                diag[i] = data[k]
    t2 = theta * theta
    for i in range(n):
        for k in range(indptr[i], indptr[i + 1]):
            j = indices[k]
            if j != i and data[k] * data[k] > t2 * abs(diag[i] * diag[j]):
                mark[k] = True


def strength_sa(A, theta=0.08):
    """Aggregation strength: ``j`` in ``S_i`` iff ``|a_ij| > theta * sqrt(|a_ii a_jj|)``."""
    _check_theta(theta)
    mark = np.zeros(A.nnz, dtype=np.bool_)
    _sa_mark(A.indptr, A.indices, A.data, float(theta), mark)
    return _from_mark(A, mark, theta)


def _from_mark(A, mark, theta):
    counts = np.add.reduceat(mark.astype(np.int64), A.indptr[:-1]) if A.nnz else np.zeros(A.shape[0], np.int64)
    counts[np.diff(A.indptr) == 0] = 0
    indptr = np.concatenate([[0], np.cumsum(counts)]).astype(np.int64)
    return StrengthGraph(indptr, A.indices[mark].astype(np.int64), float(theta), A.data[mark])
