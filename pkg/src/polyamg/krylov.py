"""Preconditioned conjugate gradients with Lanczos condition estimates."""

import time
from dataclasses import dataclass, field

import numba
import numpy as np

from .exceptions import (
    DimensionMismatchError,
    IndefiniteOperatorError,
    IndefinitePreconditionerError,
    InvalidParameterError,
    NoEstimateError,
)

KINDS = ("relative", "absolute")


@dataclass(frozen=True)
class StoppingRule:
    """Residual test ``||r|| <= tol * ||b||`` (relative) or ``||r|| <= tol`` (absolute)."""

    kind: str = "relative"
    tol: float = 1e-10
    max_iters: int = 10000

    def __post_init__(self):
        if self.kind not in KINDS:
            raise InvalidParameterError(f"kind must be one of {KINDS}, got {self.kind!r}")
        if not self.tol > 0:
            raise InvalidParameterError(f"tolerance must be positive, got {self.tol}")
        if self.max_iters < 0:
            raise InvalidParameterError("max_iters must be non-negative")

    @classmethod
    def relative(cls, tol=1e-10, max_iters=10000):
        return cls("relative", tol, max_iters)

    @classmethod
    def absolute(cls, tol=1e-12, max_iters=10000):
        return cls("absolute", tol, max_iters)

    def target(self, b_norm):
        return self.tol * b_norm if self.kind == "relative" else self.tol


@dataclass
class SolveReport:
    """Outcome of one solve.

    Attributes
    ----------
    iterations : int
    converged : bool
    residual_history : list of float
        ``||r_k||`` for ``k = 0 .. iterations``.
    kappa_estimate : float or None
        Lanczos estimate of the (preconditioned) condition number.
    setup_time, solve_time : float
        Wall-clock seconds.
    alphas, betas : list of float
        CG step lengths and direction updates.
    """

    iterations: int = 0
    converged: bool = False
    residual_history: list = field(default_factory=list)
    kappa_estimate: float | None = None
    setup_time: float = 0.0
    solve_time: float = 0.0
    alphas: list = field(default_factory=list, repr=False)
    betas: list = field(default_factory=list, repr=False)


def _identity(r):
    return r.copy()


def pcg(A, b, precond=None, stop=None, x0=None, estimate_kappa=True):
    """Solve ``A x = b`` by preconditioned conjugate gradients.

    Parameters
    ----------
    A : sparse matrix or linear operator
        SPD; only ``A @ v`` is used.
    b : ndarray
    precond : callable, optional
        ``z = precond(r)``, an SPD approximation of ``A^-1``.  Identity if None.
    stop : StoppingRule, optional
    x0 : ndarray, optional
        Initial guess (zero by default).
    estimate_kappa : bool
        Attach a Lanczos condition estimate to the report.

    Returns
    -------
    x : ndarray
    report : SolveReport

    Raises
    ------
    IndefiniteOperatorError
        If ``<p, A p> <= 0`` for some search direction.
    IndefinitePreconditionerError
        If ``<M^-1 r, r> <= 0`` for a non-zero residual.
    """
    stop = stop or StoppingRule()
    M = precond or _identity
    b = np.asarray(b, dtype=np.float64)
    n = b.shape[0]
    if A.shape != (n, n):
        raise DimensionMismatchError(f"matrix shape {A.shape} does not match vector length {n}")
    x = np.zeros(n) if x0 is None else np.array(x0, dtype=np.float64)
    t0 = time.perf_counter()
    r = b - A @ x if x0 is not None else b.copy()
    target = stop.target(np.linalg.norm(b))
    rep = SolveReport(residual_history=[float(np.linalg.norm(r))])
    if rep.residual_history[-1] <= target:
        rep.converged = True
        rep.solve_time = time.perf_counter() - t0
        return x, rep

    z = M(r)
    rz = float(r @ z)
    if not rz > 0:
        raise IndefinitePreconditionerError(f"<M^-1 r, r> = {rz:.3e} at iteration 0")
    p = z.copy()
    for k in range(stop.max_iters):
        q = A @ p
        pq = float(p @ q)
        if not pq > 0:
            raise IndefiniteOperatorError(f"<p, A p> = {pq:.3e} at iteration {k}")
        alpha = rz / pq
        x += alpha * p
        r -= alpha * q
        rep.alphas.append(alpha)
        rep.iterations = k + 1
        res = float(np.linalg.norm(r))
        rep.residual_history.append(res)
        if res <= target:
            rep.converged = True
            break
        z = M(r)
        rz_new = float(r @ z)
        if not rz_new > 0:
            raise IndefinitePreconditionerError(f"<M^-1 r, r> = {rz_new:.3e} at iteration {k + 1}")
        beta = rz_new / rz
        rep.betas.append(beta)
        p = z + beta * p
        rz = rz_new
    rep.solve_time = time.perf_counter() - t0
    if estimate_kappa and rep.alphas:
        rep.kappa_estimate = lanczos_kappa(rep.alphas, rep.betas)
    return x, rep


def lanczos_tridiagonal(alphas, betas):
    """Diagonal and off-diagonal of the Lanczos matrix implied by CG coefficients."""
    a = np.asarray(alphas, dtype=np.float64)
    k = a.shape[0]
    if k == 0:
        raise NoEstimateError("no CG iterations recorded")
    bt = np.asarray(betas, dtype=np.float64)[: k - 1]
    if bt.shape[0] < k - 1:
        raise InvalidParameterError(f"need {k - 1} betas for {k} alphas, got {bt.shape[0]}")
    diag = 1.0 / a
    diag[1:] += bt / a[:-1]
    off = np.sqrt(bt) / a[:-1]
    return diag, off


@numba.njit(cache=True)
def _count_below(diag, off2, x):
    """Number of eigenvalues of the tridiagonal matrix smaller than ``x``."""
    count = 0
    q = diag[0] - x
    if q < 0:
        count += 1
    for i in range(1, diag.shape[0]):
        if q == 0.0:
            q = 1e-300
        q = diag[i] - x - off2[i - 1] / q
        if q < 0:
            count += 1
    return count


@numba.njit(cache=True)
def _bisect(diag, off2, index, lo, hi):
    """The ``index``-th smallest eigenvalue (0-based) inside ``[lo, hi]``."""
    for _ in range(200):
        mid = 0.5 * (lo + hi)
        if mid <= lo or mid >= hi:
            break
        if _count_below(diag, off2, mid) > index:
            hi = mid
        else:
            lo = mid
        if hi - lo <= 1e-15 * max(abs(lo), abs(hi)):
            break
    return 0.5 * (lo + hi)


def tridiagonal_extremes(diag, off):
    """Smallest and largest eigenvalues of a symmetric tridiagonal matrix (Sturm bisection)."""
    diag = np.asarray(diag, dtype=np.float64)
    off = np.asarray(off, dtype=np.float64)
    k = diag.shape[0]
    rad = np.zeros(k)
    rad[:-1] += np.abs(off)
    rad[1:] += np.abs(off)
    lo = float(np.min(diag - rad))
    hi = float(np.max(diag + rad))
    pad = 1e-12 * max(abs(lo), abs(hi), 1e-300)
    lo, hi = lo - pad, hi + pad
    off2 = off**2
    return _bisect(diag, off2, 0, lo, hi), _bisect(diag, off2, k - 1, lo, hi)


def lanczos_kappa(alphas, betas):
    """Condition estimate ``lambda_max / lambda_min`` of the CG Lanczos matrix.

    Raises
    ------
    NoEstimateError
        If no iteration was recorded.
    """
    diag, off = lanczos_tridiagonal(alphas, betas)
    lmin, lmax = tridiagonal_extremes(diag, off)
    if not lmin > 0:
        return float("inf")
    return max(1.0, lmax / lmin)


SOLVERS = ("cg", "rs-amg", "sa-amg", "direct")


def timed_solve(system, solver="rs-amg", stop=None, x0=None):
    """Set up and run one solver on ``system``, timing both phases separately.

    Parameters
    ----------
    system : DiscreteSystem or tuple (A, b)
    solver : {"cg", "rs-amg", "sa-amg", "direct"} or a solver estimator
        Estimators must offer ``fit(A)`` and ``solve(b, x0=None)``.
    stop : StoppingRule, optional

    Returns
    -------
    x : ndarray
    report : SolveReport
    """
    from .solvers import make_solver

    A, b = (system.A, system.b) if hasattr(system, "A") else system
    est = make_solver(solver, stop) if isinstance(solver, str) else solver
    t0 = time.perf_counter()
    est.fit(A)
    setup = time.perf_counter() - t0
    x, rep = est.solve(b, x0=x0)
    rep.setup_time = setup
    return x, rep
