"""CSR storage helpers, products and triplet assembly.

Matrices are :class:`scipy.sparse.csr_matrix` objects kept in canonical form:
float64 values, sorted unique column indices per row, and no stored entries
with magnitude below :data:`DROP_TOL`.
"""

import numpy as np
import scipy.sparse as sp

from ..exceptions import DimensionMismatchError

DROP_TOL = 1e-300


def as_csr(A):
    """Return ``A`` as a canonical float64 CSR matrix.

    Dense arrays and any scipy sparse format are accepted.  The input is
    never modified.
    """
    if sp.issparse(A):
        M = sp.csr_matrix(A, dtype=np.float64, copy=True)
    else:
        M = sp.csr_matrix(np.asarray(A, dtype=np.float64))
    M.sum_duplicates()
    M.sort_indices()
    tiny = np.abs(M.data) < DROP_TOL
    if tiny.any():
        M.data[tiny] = 0.0
        M.eliminate_zeros()
    M.indptr = M.indptr.astype(np.int64, copy=False)
    M.indices = M.indices.astype(np.int64, copy=False)
    return M


class CooBuilder:
    """Accumulates ``(i, j, v)`` triplets; duplicates are summed on :meth:`finalize`.

    Parameters
    ----------
    shape : tuple of int
        Matrix dimensions.

    Examples
    --------
    >>> b = CooBuilder((2, 2))
    >>> b.add([0, 0, 1], [0, 0, 1], [1.0, 2.0, 5.0])
    >>> b.finalize().toarray()
    array([[3., 0.],
           [0., 5.]])
    """

    def __init__(self, shape):
        self.shape = (int(shape[0]), int(shape[1]))
        self._rows, self._cols, self._vals = [], [], []

    def add(self, rows, cols, vals):
        rows = np.asarray(rows, dtype=np.int64).ravel()
        cols = np.asarray(cols, dtype=np.int64).ravel()
        vals = np.asarray(vals, dtype=np.float64).ravel()
        if not rows.size == cols.size == vals.size:
            raise DimensionMismatchError("triplet arrays differ in length")
        if rows.size and (rows.min() < 0 or rows.max() >= self.shape[0]
                          or cols.min() < 0 or cols.max() >= self.shape[1]):
            raise IndexError("triplet index out of range")
        self._rows.append(rows)
        self._cols.append(cols)
        self._vals.append(vals)

    def finalize(self):
        """Canonical CSR matrix with duplicate triplets summed in insertion order."""
        if not self._rows:
            return as_csr(sp.csr_matrix(self.shape))
        coo = sp.coo_matrix(
            (np.concatenate(self._vals), (np.concatenate(self._rows), np.concatenate(self._cols))),
            shape=self.shape,
        )
        return as_csr(coo)


def spmv(A, x):
    """``A @ x`` with a dimension check."""
    x = np.asarray(x, dtype=np.float64)
    if x.shape[0] != A.shape[1]:
        raise DimensionMismatchError(f"matrix has {A.shape[1]} columns, vector has {x.shape[0]} rows")
    return A @ x


def rap(R, A, P):
    """Galerkin triple product ``R A P`` in canonical form."""
    if R.shape[1] != A.shape[0] or A.shape[1] != P.shape[0]:
        raise DimensionMismatchError(
            f"cannot form R A P with shapes {R.shape}, {A.shape}, {P.shape}")
    return as_csr(sp.csr_matrix(R) @ (sp.csr_matrix(A) @ sp.csr_matrix(P)))


def is_symmetric(A, rtol=1e-13):
    """True if ``max |A - A^T| <= rtol * max |A|``."""
    if A.shape[0] != A.shape[1]:
        return False
    scale = abs(A).max() if A.nnz else 0.0
    diff = A - A.T
    return (abs(diff).max() if diff.nnz else 0.0) <= rtol * scale
