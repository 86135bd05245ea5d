"""Gauss-Seidel relaxation."""

import numba
import numpy as np

from ..exceptions import DimensionMismatchError, InvalidParameterError, SingularDiagonalError


@numba.njit(cache=True)
def _gs(indptr, indices, data, x, b, forward):
    n = x.shape[0]
    for t in range(n):
        i = t if forward else n - 1 - t
        s = b[i]
        d = 0.0
        for k in range(indptr[i], indptr[i + 1]):
            j = indices[k]
            if j == i:
                d = data[k]
            else:
                s -= data[k] * x[j]
        if d == 0.0:
            return i
        x[i] = s / d
    return -1


def gauss_seidel_sweep(A, x, b, direction="forward"):
    """One in-place lexicographic Gauss-Seidel sweep on ``A x = b``.

    Parameters
    ----------
    A : scipy.sparse.csr_matrix
        Square matrix in canonical CSR form.
    x : ndarray of float64
        Current iterate, overwritten.
    b : ndarray
        Right-hand side.
    direction : {"forward", "backward"}
        Row order.  A forward sweep followed by a backward one is the
        symmetric Gauss-Seidel step.

    Raises
    ------
    SingularDiagonalError
        If a diagonal entry is zero (``x`` is then partially updated).
    """
    if direction not in ("forward", "backward"):
        raise InvalidParameterError(f"direction must be 'forward' or 'backward', got {direction!r}")
    n = A.shape[0]
    if A.shape[1] != n or x.shape != (n,) or np.shape(b) != (n,):
        raise DimensionMismatchError("gauss_seidel_sweep needs square A and matching x, b")
    if x.dtype != np.float64 or not x.flags.writeable:
        raise TypeError("x must be a writeable float64 array")
    row = _gs(A.indptr, A.indices, A.data, x, np.asarray(b, dtype=np.float64),
              direction == "forward")
    if row >= 0:
        raise SingularDiagonalError(int(row))
