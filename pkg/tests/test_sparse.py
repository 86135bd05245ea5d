import numpy as np
import pytest
import scipy.sparse as sp

from polyamg.exceptions import (
    DimensionMismatchError,
    FactorTooLargeError,
    InvalidParameterError,
    NotSPDError,
    SingularDiagonalError,
)
from polyamg.mesh import gen_hexagonal, gen_voronoi
from polyamg.sparse import (
    CooBuilder,
    as_csr,
    dense_cholesky,
    gauss_seidel_sweep,
    is_symmetric,
    rap,
    read_matrix_market,
    sparse_cholesky,
    spmv,
    write_matrix_market,
)
from polyamg.vem import build_system


def laplace1d(n):
    return as_csr(sp.diags([-np.ones(n - 1), 2 * np.ones(n), -np.ones(n - 1)], [-1, 0, 1]))


def random_spd(n, seed):
    rng = np.random.default_rng(seed)
    M = rng.standard_normal((n, n))
    return M @ M.T + n * np.eye(n)


# ---- CSR basics -----------------------------------------------------------

def test_as_csr_is_canonical():
    A = sp.coo_matrix(([1.0, 2.0, 0.0, 1e-320], ([0, 0, 1, 1], [1, 1, 0, 1])), shape=(2, 2))
    C = as_csr(A)
    assert C.has_sorted_indices and C.nnz == 1
    assert C[0, 1] == 3.0
    assert C.indices.dtype == np.int64 and C.data.dtype == np.float64


def test_coo_builder_sums_duplicates():
    b = CooBuilder((3, 3))
    b.add([0, 2, 0], [0, 1, 0], [1.0, 5.0, 2.0])
    b.add(np.array([[2]]), np.array([[1]]), np.array([[-5.0]]))
    A = b.finalize()
    assert A.nnz == 1 and A[0, 0] == 3.0


def test_coo_builder_rejects_out_of_range():
    with pytest.raises(IndexError):
        CooBuilder((2, 2)).add([2], [0], [1.0])


def test_spmv_identity_and_row_sums():
    x = np.arange(5.0)
    np.testing.assert_array_equal(spmv(sp.identity(5, format="csr"), x), x)
    A = as_csr(np.array([[2.0, -1.0], [-1.0, 2.0]]))
    np.testing.assert_array_equal(spmv(A, np.ones(2)), [1.0, 1.0])


def test_spmv_dense_oracle():
    rng = np.random.default_rng(0)
    M = rng.standard_normal((50, 50)) * (rng.random((50, 50)) < 0.2)
    x = rng.standard_normal(50)
    assert np.max(np.abs(spmv(as_csr(M), x) - M @ x)) <= 1e-12


def test_spmv_dimension_mismatch():
    with pytest.raises(DimensionMismatchError):
        spmv(laplace1d(3), np.ones(4))


# ---- Gauss-Seidel ---------------------------------------------------------

def test_gauss_seidel_identity():
    b = np.array([1.0, -2.0, 3.0])
    x = np.zeros(3)
    gauss_seidel_sweep(sp.identity(3, format="csr"), x, b)
    np.testing.assert_array_equal(x, b)


def test_gauss_seidel_hand_recurrence():
    x = np.ones(3)
    gauss_seidel_sweep(laplace1d(3), x, np.zeros(3))
    np.testing.assert_allclose(x, [0.5, 0.75, 0.375], rtol=0, atol=1e-15)


def test_gauss_seidel_backward_mirrors_forward():
    A = laplace1d(3)
    x = np.ones(3)
    gauss_seidel_sweep(A, x, np.zeros(3), "backward")
    np.testing.assert_allclose(x, [0.375, 0.75, 0.5], atol=1e-15)


def test_gauss_seidel_decreases_energy_error():
    A = as_csr(random_spd(30, 1))
    rng = np.random.default_rng(2)
    xs = rng.standard_normal(30)
    b = A @ xs
    x = np.zeros(30)
    prev = np.inf
    for direction in ("forward", "backward") * 5:
        gauss_seidel_sweep(A, x, b, direction)
        e = x - xs
        err = float(e @ (A @ e))
        assert err < prev
        prev = err


def test_gauss_seidel_zero_diagonal():
    A = as_csr(np.array([[1.0, 1.0], [1.0, 0.0]]))
    with pytest.raises(SingularDiagonalError) as err:
        gauss_seidel_sweep(A, np.zeros(2), np.ones(2))
    assert err.value.row == 1


def test_gauss_seidel_bad_direction():
    with pytest.raises(InvalidParameterError):
        gauss_seidel_sweep(laplace1d(3), np.zeros(3), np.ones(3), "sideways")


# ---- Galerkin product -----------------------------------------------------

def test_rap_identity():
    A = laplace1d(6)
    I = sp.identity(6, format="csr")
    assert abs(rap(I, A, I) - A).max() == 0


def test_rap_pairs_example():
    P = as_csr(np.kron(np.eye(2), np.ones((2, 1))))
    Ac = rap(as_csr(P.T), laplace1d(4), P).toarray()
    np.testing.assert_allclose(Ac, [[2.0, -1.0], [-1.0, 2.0]])


@pytest.mark.parametrize("seed", range(5))
def test_rap_dense_oracle_and_symmetry(seed):
    rng = np.random.default_rng(seed)
    n, m = 120, 40
    A = random_spd(n, seed) * (rng.random((n, n)) < 0.1)
    A = A + A.T
    P = rng.standard_normal((n, m)) * (rng.random((n, m)) < 0.1)
    Ac = rap(as_csr(P.T), as_csr(A), as_csr(P))
    assert np.max(np.abs(Ac.toarray() - P.T @ A @ P)) <= 1e-12 * max(1.0, np.abs(P.T @ A @ P).max())
    assert is_symmetric(Ac)


def test_rap_dimension_mismatch():
    with pytest.raises(DimensionMismatchError):
        rap(sp.identity(3, format="csr"), laplace1d(4), sp.identity(4, format="csr"))


# ---- Cholesky -------------------------------------------------------------

def test_dense_cholesky_trivial():
    f = dense_cholesky(np.array([[4.0]]))
    np.testing.assert_allclose(f.L, [[2.0]])
    np.testing.assert_allclose(dense_cholesky(np.eye(3)).solve(np.arange(3.0)), np.arange(3.0))


def test_dense_cholesky_random_spd():
    A = random_spd(20, 3)
    f = dense_cholesky(A)
    assert np.abs(f.L @ f.L.T - A).max() <= 1e-10 * np.abs(A).max()
    b = np.random.default_rng(4).standard_normal(20)
    assert np.linalg.norm(A @ f.solve(b) - b) <= 1e-12 * np.linalg.norm(b) * 20


def test_dense_cholesky_not_spd():
    with pytest.raises(NotSPDError) as err:
        dense_cholesky(np.array([[1.0, 2.0], [2.0, 1.0]]))
    assert err.value.row == 1


def test_sparse_cholesky_identity():
    f = sparse_cholesky(sp.identity(7, format="csr"))
    np.testing.assert_array_equal(f.solve(np.arange(7.0)), np.arange(7.0))


def test_sparse_cholesky_consistent_hexagonal_system():
    A = build_system(gen_hexagonal(20)).A
    assert 800 <= A.shape[0] <= 1200
    x = sparse_cholesky(A).solve(A @ np.ones(A.shape[0]))
    np.testing.assert_allclose(x, 1.0, atol=1e-10)


def test_sparse_cholesky_voronoi_residual():
    s = build_system(gen_voronoi(2500, 1), f=1.0)
    x = sparse_cholesky(s.A).solve(s.b)
    assert np.linalg.norm(s.A @ x - s.b) <= 1e-12 * np.linalg.norm(s.b)


def test_sparse_cholesky_random_rhs_roundtrip():
    A = build_system(gen_voronoi(500, 2)).A
    xs = np.random.default_rng(5).standard_normal(A.shape[0])
    x = sparse_cholesky(A).solve(A @ xs)
    assert np.linalg.norm(x - xs) <= 1e-10 * np.linalg.norm(xs)


def test_sparse_cholesky_refinement_does_not_hurt():
    s = build_system(gen_voronoi(2500, 3), f=1.0)
    res = [np.linalg.norm(s.b - s.A @ sparse_cholesky(s.A, refine=k).solve(s.b)) for k in (0, 1)]
    assert res[1] <= res[0] * (1 + 1e-12)


def test_sparse_cholesky_rejects_negative_refine():
    with pytest.raises(InvalidParameterError):
        sparse_cholesky(laplace1d(4), refine=-1)


def test_sparse_cholesky_reports_bad_row():
    A = laplace1d(5).tolil()
    A[3, 3] = -1.0
    with pytest.raises(NotSPDError) as err:
        sparse_cholesky(A.tocsr())
    assert 0 <= err.value.row < 5


def test_sparse_cholesky_rejects_unsymmetric():
    with pytest.raises(InvalidParameterError):
        sparse_cholesky(as_csr(np.array([[2.0, 1.0], [0.0, 2.0]])))


def test_sparse_cholesky_budget():
    with pytest.raises(FactorTooLargeError) as err:
        sparse_cholesky(build_system(gen_hexagonal(20)).A, budget=1000)
    assert err.value.needed > 1000
    assert isinstance(err.value, MemoryError)


# ---- MatrixMarket ---------------------------------------------------------

@pytest.mark.parametrize("symmetric", [False, True])
def test_matrix_market_round_trip(tmp_path, symmetric):
    A = build_system(gen_hexagonal(5), f=1.0).A
    write_matrix_market(tmp_path / "a.mtx", A, symmetric=symmetric)
    B = read_matrix_market(tmp_path / "a.mtx")
    if symmetric:  # only the lower triangle is stored
        A = sp.tril(A) + sp.tril(A, -1).T
    assert abs(A - B).max() == 0
