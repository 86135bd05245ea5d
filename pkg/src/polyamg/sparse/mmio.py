"""MatrixMarket coordinate files."""

import scipy.io

from .csr import as_csr


def write_matrix_market(path, A, symmetric=False):
    """Write ``A`` in coordinate format, full precision."""
    scipy.io.mmwrite(str(path), as_csr(A), symmetry="symmetric" if symmetric else "general",
                     precision=17)


def read_matrix_market(path):
    """Read a coordinate file into canonical CSR."""
    return as_csr(scipy.io.mmread(str(path)))
