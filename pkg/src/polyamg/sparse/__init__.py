"""Sparse and dense linear-algebra kernels."""

from .cholesky import CholeskyFactor, DenseFactor, dense_cholesky, sparse_cholesky
from .csr import DROP_TOL, CooBuilder, as_csr, is_symmetric, rap, spmv
from .mmio import read_matrix_market, write_matrix_market
from .relax import gauss_seidel_sweep

__all__ = [
    "CooBuilder", "as_csr", "spmv", "rap", "is_symmetric", "DROP_TOL",
    "gauss_seidel_sweep", "dense_cholesky", "DenseFactor", "sparse_cholesky",
    "CholeskyFactor", "read_matrix_market", "write_matrix_market",
]
