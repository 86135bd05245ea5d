"""Input checks shared by the solver estimators."""

import numpy as np
import scipy.sparse as sp

from .exceptions import DimensionMismatchError
from .sparse import as_csr


def check_matrix(A):
    """Return ``A`` as a square canonical CSR matrix with finite entries."""
    if not (sp.issparse(A) or isinstance(A, np.ndarray)):
        raise TypeError(f"expected a sparse matrix or ndarray, got {type(A).__name__}")
    if A.ndim != 2 or A.shape[0] != A.shape[1]:
        raise DimensionMismatchError(f"expected a square matrix, got shape {A.shape}")
    M = as_csr(A)
    if not np.all(np.isfinite(M.data)):
        raise ValueError("matrix has non-finite entries")
    return M


def check_vector(b, n, name="b"):
    """Return ``b`` as a finite float64 vector of length ``n``."""
    v = np.asarray(b, dtype=np.float64)
    if v.shape != (n,):
        raise DimensionMismatchError(f"{name} must have shape ({n},), got {v.shape}")
    if not np.all(np.isfinite(v)):
        raise ValueError(f"{name} has non-finite entries")
    return v
