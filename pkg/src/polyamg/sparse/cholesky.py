"""Cholesky factorizations: dense (coarse grids) and envelope after RCM (direct solver)."""

from dataclasses import dataclass

import numba
import numpy as np
from scipy.linalg import lapack
from scipy.sparse.csgraph import reverse_cuthill_mckee

from ..exceptions import (
    DimensionMismatchError,
    FactorTooLargeError,
    InvalidParameterError,
    NotSPDError,
)
from .csr import as_csr, is_symmetric

ENVELOPE_BUDGET = 200_000_000  # stored factor entries (1.6 GB)


@dataclass(frozen=True)
class DenseFactor:
    """Lower Cholesky factor ``L`` with ``L @ L.T == A``."""

    L: np.ndarray

    def solve(self, b):
        x, info = lapack.dpotrs(self.L, np.asarray(b, dtype=np.float64), lower=1)
        if info != 0:
            raise ValueError(f"dpotrs failed with info={info}")
        return x


def dense_cholesky(A):
    """Factor a small dense SPD matrix.

    Raises
    ------
    NotSPDError
        With the 0-based row of the first non-positive pivot.
    """
    A = np.array(A.toarray() if hasattr(A, "toarray") else A, dtype=np.float64)
    if A.ndim != 2 or A.shape[0] != A.shape[1]:
        raise DimensionMismatchError(f"expected a square matrix, got shape {A.shape}")
    if A.shape[0] == 0:
        return DenseFactor(A)
    L, info = lapack.dpotrf(A, lower=1, clean=1)
    if info > 0:
        raise NotSPDError(int(info) - 1)
    if info < 0:
        raise ValueError(f"dpotrf failed with info={info}")
    return DenseFactor(L)


@numba.njit(cache=True)
def _envelope_factor(first, ptr, env):
    """In-place row-oriented envelope Cholesky; returns the failing row or -1."""
    n = first.shape[0]
    for i in range(n):
        fi = first[i]
        pi = ptr[i]
        for j in range(fi, i):
            fj = first[j]
            pj = ptr[j]
            k0 = max(fi, fj)
            s = env[pi + j - fi]
            a = pi + k0 - fi
            c = pj + k0 - fj
            for t in range(j - k0):
                s -= env[a + t] * env[c + t]
            env[pi + j - fi] = s / env[pj + j - fj]
        d = env[pi + i - fi]
        for t in range(pi, pi + i - fi):
            d -= env[t] * env[t]
        if not d > 0.0:
            return i
        env[pi + i - fi] = np.sqrt(d)
    return -1


@numba.njit(cache=True)
def _envelope_solve(first, ptr, env, b):
    n = first.shape[0]
    y = b.copy()
    for i in range(n):
        fi = first[i]
        pi = ptr[i]
        s = y[i]
        for k in range(fi, i):
            s -= env[pi + k - fi] * y[k]
        y[i] = s / env[pi + i - fi]
    for i in range(n - 1, -1, -1):
        fi = first[i]
        pi = ptr[i]
        y[i] /= env[pi + i - fi]
        xi = y[i]
        for k in range(fi, i):
            y[k] -= env[pi + k - fi] * xi
    return y


@numba.njit(cache=True)
def _scatter_lower(indptr, indices, data, first, ptr, env):
    n = first.shape[0]
    for i in range(n):
        for k in range(indptr[i], indptr[i + 1]):
            j = indices[k]
            if j <= i:
                env[ptr[i] + j - first[i]] = data[k]


@dataclass(frozen=True)
class CholeskyFactor:
    """Envelope Cholesky factor of ``A[perm][:, perm]``.

    Attributes
    ----------
    perm : ndarray
        Reverse Cuthill-McKee ordering.
    first : ndarray
        First stored column of each factor row.
    ptr : ndarray
        Offsets of the rows inside ``env``.
    env : ndarray
        Factor entries, row by row, from ``first[i]`` to the diagonal.
    A : sparse matrix or None
        The factored matrix, kept for iterative refinement.
    refine : int
        Refinement steps per solve; long envelopes lose a few digits otherwise.
    """

    perm: np.ndarray
    first: np.ndarray
    ptr: np.ndarray
    env: np.ndarray
    A: object = None
    refine: int = 0

    @property
    def n(self):
        return self.perm.shape[0]

    @property
    def nnz(self):
        return self.env.shape[0]

    def solve(self, b):
        """Solve ``A x = b``."""
        b = np.asarray(b, dtype=np.float64)
        if b.shape != (self.n,):
            raise DimensionMismatchError(f"right-hand side must have shape ({self.n},)")
        x = self._apply(b)
        if self.A is not None:
            for _ in range(self.refine):
                x += self._apply(b - self.A @ x)
        return x

    def _apply(self, b):
        x = np.empty_like(b)
        x[self.perm] = _envelope_solve(self.first, self.ptr, self.env, b[self.perm])
        return x


def sparse_cholesky(A, budget=ENVELOPE_BUDGET, check_symmetric=True, refine=1):
    """Factor a sparse SPD matrix after reverse Cuthill-McKee reordering.

    Parameters
    ----------
    A : sparse matrix
        Symmetric positive definite.
    budget : int
        Largest admissible number of stored factor entries.
    check_symmetric : bool
        Verify symmetry first (relative tolerance 1e-13).
    refine : int
        Steps of iterative refinement applied by ``solve``.

    Raises
    ------
    NotSPDError
        With the row (in the original numbering) of the first non-positive pivot.
    FactorTooLargeError
        If the envelope exceeds ``budget``.
    """
    if refine < 0:
        raise InvalidParameterError(f"refine must be >= 0, got {refine}")
    A = as_csr(A)
    n = A.shape[0]
    if A.shape[1] != n:
        raise DimensionMismatchError(f"expected a square matrix, got shape {A.shape}")
    if check_symmetric and not is_symmetric(A):
        raise InvalidParameterError("sparse_cholesky needs a symmetric matrix")
    perm = np.asarray(reverse_cuthill_mckee(A, symmetric_mode=True), dtype=np.int64)
    B = as_csr(A[perm][:, perm])
    rows = np.arange(n)
    first = rows.copy()
    nonempty = np.diff(B.indptr) > 0
    first[nonempty] = np.minimum(rows[nonempty], B.indices[B.indptr[:-1][nonempty]])
    widths = rows - first + 1
    ptr = np.concatenate([[0], np.cumsum(widths)]).astype(np.int64)
    if ptr[-1] > budget:
        raise FactorTooLargeError(int(ptr[-1]), int(budget))
    env = np.zeros(ptr[-1])
    _scatter_lower(B.indptr, B.indices, B.data, first, ptr, env)
    bad = _envelope_factor(first, ptr, env)
    if bad >= 0:
        raise NotSPDError(int(perm[bad]))
    return CholeskyFactor(perm, first, ptr, env, A, int(refine))
