"""Solver estimators with a ``fit(A)`` / ``solve(b)`` interface.

``fit`` does the expensive, matrix-only setup (AMG hierarchy or
factorization) and ``solve`` applies it to right-hand sides, mirroring the
fit/predict split of scikit-learn estimators.  Parameters are plain
constructor arguments, so ``get_params``, ``set_params`` and ``clone`` work.
"""

import time

import numpy as np
from sklearn.base import BaseEstimator, clone
from sklearn.utils.validation import check_is_fitted

from .amg import AmgConfig, build_hierarchy, vcycle
from .exceptions import InvalidParameterError
from .krylov import SOLVERS, SolveReport, StoppingRule, pcg
from .sparse import sparse_cholesky
from .validation import check_matrix, check_vector


class _AMGPreconditioner(BaseEstimator):
    _kind = None

    def _config(self):
        raise NotImplementedError

    def fit(self, A, y=None):
        """Build the multigrid hierarchy of ``A``."""
        A = check_matrix(A)
        t0 = time.perf_counter()
        self.hierarchy_ = build_hierarchy(A, self._config())
        self.setup_time_ = time.perf_counter() - t0
        self.n_levels_ = self.hierarchy_.n_levels
        self.operator_complexity_ = self.hierarchy_.operator_complexity()
        return self

    def apply(self, r):
        """One V-cycle on ``A z = r`` from a zero initial guess."""
        check_is_fitted(self, "hierarchy_")
        return vcycle(self.hierarchy_, r)

    __call__ = apply

    def solve(self, b, x0=None, stop=None):
        """CG preconditioned by this hierarchy."""
        check_is_fitted(self, "hierarchy_")
        A = self.hierarchy_.levels[0].A
        b = check_vector(b, A.shape[0])
        return pcg(A, b, self.apply, stop, x0)


class RugeStubenAMG(_AMGPreconditioner):
    """Classical AMG V-cycle.

    Parameters
    ----------
    theta : float
        Strength threshold of the ``-a_ij >= theta * max(-a_ik)`` rule.
    presmooth, postsmooth : int
        Gauss-Seidel sweeps around each coarse correction.
    coarse_max : int
    max_levels : int
    """

    def __init__(self, theta=0.25, presmooth=1, postsmooth=1, coarse_max=64, max_levels=25):
        self.theta = theta
        self.presmooth = presmooth
        self.postsmooth = postsmooth
        self.coarse_max = coarse_max
        self.max_levels = max_levels

    def _config(self):
        return AmgConfig(kind="rs", theta_rs=self.theta, presmooth=self.presmooth,
                         postsmooth=self.postsmooth, coarse_max=self.coarse_max,
                         max_levels=self.max_levels)


class SmoothedAggregationAMG(_AMGPreconditioner):
    """Smoothed-aggregation AMG V-cycle.

    Parameters
    ----------
    theta : float
        Strength threshold of the ``|a_ij| > theta * sqrt(|a_ii a_jj|)`` rule.
    presmooth, postsmooth, coarse_max, max_levels
        As for :class:`RugeStubenAMG`.
    """

    def __init__(self, theta=0.08, presmooth=1, postsmooth=1, coarse_max=64, max_levels=25):
        self.theta = theta
        self.presmooth = presmooth
        self.postsmooth = postsmooth
        self.coarse_max = coarse_max
        self.max_levels = max_levels

    def _config(self):
        return AmgConfig(kind="sa", theta_sa=self.theta, presmooth=self.presmooth,
                         postsmooth=self.postsmooth, coarse_max=self.coarse_max,
                         max_levels=self.max_levels)


class ConjugateGradient(BaseEstimator):
    """CG with an optional preconditioner estimator.

    Parameters
    ----------
    preconditioner : estimator or None
        Cloned and fitted on the same matrix in :meth:`fit`.
    rtol : float
        Relative tolerance, used when ``abstol`` is None.
    abstol : float or None
        Absolute tolerance; takes precedence over ``rtol``.
    max_iters : int
    """

    def __init__(self, preconditioner=None, rtol=1e-10, abstol=None, max_iters=10000):
        self.preconditioner = preconditioner
        self.rtol = rtol
        self.abstol = abstol
        self.max_iters = max_iters

    def stopping_rule(self):
        if self.abstol is not None:
            return StoppingRule.absolute(self.abstol, self.max_iters)
        return StoppingRule.relative(self.rtol, self.max_iters)

    def fit(self, A, y=None):
        self.stopping_rule()  # validate early
        self.A_ = check_matrix(A)
        self.preconditioner_ = None
        if self.preconditioner is not None:
            self.preconditioner_ = clone(self.preconditioner).fit(self.A_)
        return self

    def solve(self, b, x0=None):
        """Returns ``(x, SolveReport)``; the report is also kept as ``report_``."""
        check_is_fitted(self, "A_")
        b = check_vector(b, self.A_.shape[0])
        M = self.preconditioner_.apply if self.preconditioner_ is not None else None
        x, self.report_ = pcg(self.A_, b, M, self.stopping_rule(), x0)
        return x, self.report_


class DirectSolver(BaseEstimator):
    """Envelope Cholesky after reverse Cuthill-McKee ordering.

    Parameters
    ----------
    budget : int or None
        Largest number of stored factor entries; None for the library default.
    """

    def __init__(self, budget=None):
        self.budget = budget

    def fit(self, A, y=None):
        A = check_matrix(A)
        kw = {} if self.budget is None else {"budget": int(self.budget)}
        self.factor_ = sparse_cholesky(A, **kw)
        self.A_ = A
        return self

    def solve(self, b, x0=None):
        check_is_fitted(self, "factor_")
        b = check_vector(b, self.A_.shape[0])
        t0 = time.perf_counter()
        x = self.factor_.solve(b)
        rep = SolveReport(iterations=0, converged=True,
                          residual_history=[float(np.linalg.norm(b - self.A_ @ x))])
        rep.solve_time = time.perf_counter() - t0
        self.report_ = rep
        return x, rep


def make_solver(name, stop=None):
    """Estimator for one of the named solver choices."""
    stop = stop or StoppingRule()
    kw = dict(max_iters=stop.max_iters)
    if stop.kind == "absolute":
        kw["abstol"] = stop.tol
    else:
        kw["rtol"] = stop.tol
    if name == "cg":
        return ConjugateGradient(None, **kw)
    if name == "rs-amg":
        return ConjugateGradient(RugeStubenAMG(), **kw)
    if name == "sa-amg":
        return ConjugateGradient(SmoothedAggregationAMG(), **kw)
    if name == "direct":
        return DirectSolver()
    raise InvalidParameterError(f"solver must be one of {SOLVERS}, got {name!r}")
