import numpy as np
import pytest
import scipy.sparse as sp
import scipy.sparse.linalg as spla

from polyamg.amg import (
    C_POINT,
    F_POINT,
    AmgConfig,
    aggregate_sa,
    build_hierarchy,
    cf_split,
    estimate_lambda_max,
    interp_direct,
    prolong_sa,
    strength_rs,
    strength_sa,
    tentative_prolongator,
    vcycle,
)
from polyamg.exceptions import (
    DegenerateCoarseningError,
    DimensionMismatchError,
    InvalidParameterError,
    SingularDiagonalError,
)
from polyamg.mesh import gen_hexagonal, gen_voronoi
from polyamg.sparse import as_csr, rap
from polyamg.vem import assemble, build_system


def laplace1d(n):
    return as_csr(sp.diags([-np.ones(n - 1), 2 * np.ones(n), -np.ones(n - 1)], [-1, 0, 1]))


def _iterates(H, A, b, n):
    x = np.zeros_like(b)
    out = [x.copy()]
    for _ in range(n):
        x = x + vcycle(H, b - A @ x)
        out.append(x.copy())
    return out


def strong_sets(S):
    return [set(S.row(i).tolist()) for i in range(S.n)]


@pytest.fixture(scope="module")
def hexa_system():
    return build_system(gen_hexagonal(100), f=1.0)


# ---- strength -------------------------------------------------------------

def test_strength_rs_tridiagonal():
    sets = strong_sets(strength_rs(laplace1d(5)))
    assert sets[2] == {1, 3} and sets[0] == {1} and sets[4] == {3}


def test_strength_rs_threshold_row():
    A = as_csr(np.array([[4.0, -2.0, -0.4, -0.1],
                         [-2.0, 4.0, 0.0, 0.0],
                         [-0.4, 0.0, 4.0, 0.0],
                         [-0.1, 0.0, 0.0, 4.0]]))
    assert strong_sets(strength_rs(A, 0.25))[0] == {1}


def test_strength_rs_ignores_positive_rows():
    A = as_csr(np.array([[2.0, 0.5], [0.5, 2.0]]))
    assert strength_rs(A).indices.size == 0


def test_strength_diagonal_matrix_is_empty():
    D = sp.identity(6, format="csr")
    assert strength_rs(D).indices.size == 0 and strength_sa(D).indices.size == 0


def test_strength_sa_uses_absolute_value():
    A = as_csr(np.array([[2.0, -1.0, 0.2], [-1.0, 2.0, 0.0], [0.2, 0.0, 2.0]]))
    sets = strong_sets(strength_sa(A, 0.08))
    assert sets[0] == {1, 2}  # |0.2| > 0.08 * sqrt(2 * 2)
    assert sets[1] == {0}


def test_strength_subset_of_offdiagonal_nonzeros(hexa_system):
    A = hexa_system.A
    S = strength_rs(A)
    for i in range(0, A.shape[0], 997):
        row = set(A.indices[A.indptr[i]:A.indptr[i + 1]].tolist()) - {i}
        assert strong_sets(S)[i] <= row


@pytest.mark.parametrize("theta", [0.0, 1.0, -0.1])
def test_strength_rejects_bad_theta(theta):
    with pytest.raises(InvalidParameterError):
        strength_rs(laplace1d(3), theta)


# ---- C/F splitting --------------------------------------------------------

def test_cf_split_tridiagonal():
    S = strength_rs(laplace1d(5))
    cf = cf_split(S)
    assert 2 <= np.sum(cf == C_POINT) <= 3
    for i in np.flatnonzero(cf == F_POINT):
        assert any(cf[j] == C_POINT for j in S.row(i))


def test_cf_split_diagonal_all_f():
    assert np.all(cf_split(strength_rs(sp.identity(5, format="csr"))) == F_POINT)


def test_cf_split_clique_one_c_point():
    n = 6
    A = as_csr(n * np.eye(n) - (np.ones((n, n)) - np.eye(n)))
    assert np.sum(cf_split(strength_rs(A)) == C_POINT) == 1


def test_cf_split_every_f_has_c_neighbor(hexa_system):
    S = strength_rs(hexa_system.A)
    cf = cf_split(S)
    for i in np.flatnonzero(cf == F_POINT):
        row = S.row(i)
        assert row.size == 0 or np.any(cf[row] == C_POINT)


def test_cf_split_is_deterministic(hexa_system):
    S = strength_rs(hexa_system.A)
    assert np.array_equal(cf_split(S), cf_split(S))


# ---- direct interpolation -------------------------------------------------

def test_interp_all_c_is_identity():
    A = laplace1d(4)
    P = interp_direct(A, strength_rs(A), np.full(4, C_POINT))
    assert abs(P - sp.identity(4)).max() == 0


def test_interp_midpoint_weights():
    A = laplace1d(3)
    P = interp_direct(A, strength_rs(A), np.array([C_POINT, F_POINT, C_POINT]))
    np.testing.assert_allclose(P.toarray()[1], [0.5, 0.5])


def test_interp_rejects_orphan_f_point():
    A = laplace1d(3)
    with pytest.raises(InvalidParameterError):
        interp_direct(A, strength_rs(A), np.array([C_POINT, C_POINT, F_POINT])[[2, 0, 1]] * 0)


def test_interp_rows_sum_to_one_on_vem_matrix():
    A = assemble(gen_hexagonal(30))  # zero row sums
    S = strength_rs(A)
    P = interp_direct(A, S, cf_split(S))
    np.testing.assert_allclose(np.asarray(P.sum(axis=1)).ravel(), 1.0, atol=1e-12)


def test_interp_interior_rows_sum_to_one_after_dirichlet(hexa_system):
    A = hexa_system.A
    A0 = assemble(hexa_system.mesh)
    S = strength_rs(A)
    P = interp_direct(A, S, cf_split(S))
    interior = np.ones(A.shape[0], dtype=bool)
    interior[hexa_system.boundary_dofs] = False
    # rows touching the boundary lose the eliminated couplings, so check the rest
    touches = np.asarray(abs(A0)[:, hexa_system.boundary_dofs].sum(axis=1)).ravel() > 0
    rows = np.flatnonzero(interior & ~touches)
    np.testing.assert_allclose(np.asarray(P[rows].sum(axis=1)).ravel(), 1.0, atol=1e-12)
    # boundary identity rows are isolated and interpolate nothing
    assert P[hexa_system.boundary_dofs].nnz == 0


# ---- smoothed aggregation -------------------------------------------------

def test_aggregate_diagonal_singletons():
    labels, n = aggregate_sa(sp.identity(5, format="csr"))
    assert n == 5 and sorted(labels.tolist()) == list(range(5))


def test_aggregate_tridiagonal_cover():
    labels, n = aggregate_sa(laplace1d(6))
    assert np.all(labels >= 0) and labels.max() == n - 1
    # roots 0 and 3; node 5 joins its only neighbor's aggregate
    assert labels.tolist() == [0, 0, 1, 1, 1, 1]


def test_aggregate_respects_disconnected_blocks():
    A = as_csr(sp.block_diag([laplace1d(5), laplace1d(7)]))
    labels, _ = aggregate_sa(A)
    assert not set(labels[:5]) & set(labels[5:])


def test_aggregate_drops_isolated_when_asked():
    A = as_csr(sp.block_diag([laplace1d(4), sp.identity(2)]))
    labels, n = aggregate_sa(A, keep_isolated=False)
    assert np.all(labels[4:] == -1) and np.all(labels[:4] >= 0)
    assert tentative_prolongator(labels, n)[4:].nnz == 0


def test_prolong_single_aggregate_keeps_constants():
    A = assemble(gen_voronoi(80, 1))
    P = prolong_sa(A, np.zeros(A.shape[0], dtype=np.int64), 1)
    np.testing.assert_allclose(P.toarray().ravel(), 1.0, atol=1e-12)


def test_prolong_zero_omega_is_tentative():
    A = laplace1d(6)
    labels, n = aggregate_sa(A)
    assert abs(prolong_sa(A, labels, n, omega=0.0) - tentative_prolongator(labels, n)).max() == 0


def test_tentative_represents_constants():
    labels, n = aggregate_sa(laplace1d(9))
    np.testing.assert_array_equal(tentative_prolongator(labels, n) @ np.ones(n), 1.0)


@pytest.mark.parametrize("seed", [0, 1, 2])
def test_lambda_max_estimate_against_dense(seed):
    A = build_system(gen_voronoi(60, seed)).A
    Dinv = 1.0 / A.diagonal()
    exact = np.max(np.linalg.eigvals(Dinv[:, None] * A.toarray()).real)
    assert 0.9 * exact <= estimate_lambda_max(A) <= 1.1 * exact


def test_prolong_rejects_zero_diagonal():
    A = as_csr(np.array([[0.0, 1.0], [1.0, 2.0]]))
    with pytest.raises(SingularDiagonalError):
        prolong_sa(A, np.array([0, 0]), 1)


# ---- hierarchy and cycle --------------------------------------------------

def test_small_matrix_one_level():
    H = build_hierarchy(laplace1d(50))
    assert H.n_levels == 1
    r = np.random.default_rng(0).standard_normal(50)
    np.testing.assert_allclose(laplace1d(50) @ vcycle(H, r), r, atol=1e-12)


@pytest.mark.parametrize("kind", ["rs", "sa"])
def test_hexagonal_hierarchy_shape(hexa_system, kind, tmp_path):
    H = build_hierarchy(hexa_system.A, AmgConfig(kind=kind))
    sizes = H.sizes()
    assert H.n_levels <= 10 and sizes[-1] <= 64
    assert all(a > b for a, b in zip(sizes, sizes[1:]))
    if kind == "rs":
        assert all(a / b >= 2 for a, b in zip(sizes, sizes[1:]))
    print(kind, sizes, f"operator complexity {H.operator_complexity():.2f}")
    H.write_stats_csv(tmp_path / "h.csv")
    assert (tmp_path / "h.csv").read_text().count("\n") == H.n_levels + 1


@pytest.mark.parametrize("kind", ["rs", "sa"])
def test_galerkin_identity_per_level(kind):
    A = build_system(gen_voronoi(400, 3)).A
    H = build_hierarchy(A, AmgConfig(kind=kind, coarse_max=10))
    for fine, coarse in zip(H.levels, H.levels[1:]):
        P = fine.P.toarray()
        Ac = P.T @ fine.A.toarray() @ P
        assert np.abs(coarse.A.toarray() - Ac).max() <= 1e-12 * np.abs(Ac).max()
        assert abs(coarse.A - rap(fine.R, fine.A, fine.P)).max() == 0


@pytest.mark.parametrize("kind", ["rs", "sa"])
def test_vcycle_linear_symmetric_positive(kind):
    A = build_system(gen_voronoi(1500, 2)).A
    H = build_hierarchy(A, AmgConfig(kind=kind))
    rng = np.random.default_rng(7)
    r1, r2 = rng.standard_normal((2, A.shape[0]))
    z1, z2 = vcycle(H, r1), vcycle(H, r2)
    np.testing.assert_allclose(vcycle(H, 2.5 * r1), 2.5 * z1, rtol=1e-12, atol=1e-14)
    assert abs(z1 @ r2 - r1 @ z2) <= 1e-10 * abs(z1 @ r2)
    assert z1 @ r1 > 0 and z2 @ r2 > 0


@pytest.mark.parametrize("kind", ["rs", "sa"])
def test_stationary_vcycle_reduces_residual(hexa_system, kind):
    A, b = hexa_system.A, hexa_system.b
    H = build_hierarchy(A, AmgConfig(kind=kind))
    xs = spla.spsolve(A.tocsc(), b)
    xk = _iterates(H, A, b, 6)
    res = [np.linalg.norm(b - A @ x) for x in xk]
    err = [np.sqrt((xs - x) @ (A @ (xs - x))) for x in xk]
    res_red = [a / c for a, c in zip(res, res[1:])]
    err_red = [a / c for a, c in zip(err, err[1:])]
    print(kind, "residual reduction", np.round(res_red, 2), "energy reduction", np.round(err_red, 2))
    # the energy norm contracts on every cycle; the residual 2-norm from the second on
    assert min(err_red) >= 1.2
    assert min(res_red[1:]) >= 1.2


def test_hierarchy_is_deterministic(hexa_system):
    a = build_hierarchy(hexa_system.A)
    b = build_hierarchy(hexa_system.A)
    assert a.sizes() == b.sizes()
    assert all(abs(x.A - y.A).max() == 0 for x, y in zip(a.levels, b.levels))


def test_stall_at_first_level_raises():
    with pytest.raises(DegenerateCoarseningError):
        build_hierarchy(sp.identity(200, format="csr"))


def test_zero_diagonal_rejected():
    A = laplace1d(100).tolil()
    A[5, 5] = 0.0
    with pytest.raises(SingularDiagonalError):
        build_hierarchy(A.tocsr())


def test_vcycle_dimension_check():
    H = build_hierarchy(laplace1d(10))
    with pytest.raises(DimensionMismatchError):
        vcycle(H, np.ones(11))


@pytest.mark.parametrize("kw", [dict(kind="xx"), dict(theta_rs=1.5), dict(presmooth=0, postsmooth=0),
                                dict(coarse_max=0), dict(min_reduction=1.0)])
def test_config_validation(kw):
    with pytest.raises(InvalidParameterError):
        AmgConfig(**kw)
