"""Multilevel hierarchies and the V-cycle."""

import csv
from dataclasses import dataclass, field

import numpy as np

from ..exceptions import (
    DegenerateCoarseningError,
    DimensionMismatchError,
    InvalidParameterError,
    SingularDiagonalError,
)
from ..sparse import as_csr, dense_cholesky, rap
from ..sparse.relax import _gs
from .aggregation import aggregate_sa, prolong_sa
from .classical import cf_split, interp_direct
from .strength import strength_rs

KINDS = ("rs", "sa")


@dataclass(frozen=True)
class AmgConfig:
    """Coarsening and cycling parameters.

    Attributes
    ----------
    kind : {"rs", "sa"}
        Classical Ruge-Stueben or smoothed aggregation.
    theta_rs, theta_sa : float
        Strength thresholds of the two methods.
    presmooth, postsmooth : int
        Forward Gauss-Seidel sweeps before and backward sweeps after the
        coarse correction.
    coarse_max : int
        Levels at or below this size are solved by dense Cholesky.
    max_levels : int
    min_reduction : float
        Coarsening stops when a level shrinks by less than this fraction.
    """

    kind: str = "rs"
    theta_rs: float = 0.25
    theta_sa: float = 0.08
    presmooth: int = 1
    postsmooth: int = 1
    coarse_max: int = 64
    max_levels: int = 25
    min_reduction: float = 0.05

    def __post_init__(self):
        if self.kind not in KINDS:
            raise InvalidParameterError(f"kind must be one of {KINDS}, got {self.kind!r}")
        for name in ("theta_rs", "theta_sa"):
            if not 0.0 < getattr(self, name) < 1.0:
                raise InvalidParameterError(f"{name} must lie in (0, 1)")
        if self.presmooth < 0 or self.postsmooth < 0 or self.presmooth + self.postsmooth < 1:
            raise InvalidParameterError("need presmooth, postsmooth >= 0 with at least one sweep")
        if self.coarse_max < 1 or self.max_levels < 1:
            raise InvalidParameterError("coarse_max and max_levels must be positive")
        if not 0.0 <= self.min_reduction < 1.0:
            raise InvalidParameterError("min_reduction must lie in [0, 1)")


@dataclass
class Level:
    """One grid: its operator and the prolongation from the next coarser grid."""

    A: object
    P: object = None
    R: object = None


@dataclass
class AmgHierarchy:
    """Operators ``A_0, A_1, ...`` with prolongations and a coarsest-grid factor."""

    levels: list
    coarse_factor: object
    config: AmgConfig
    stalled: bool = False
    _work: list = field(default_factory=list, repr=False)

    @property
    def n_levels(self):
        return len(self.levels)

    def sizes(self):
        return [lvl.A.shape[0] for lvl in self.levels]

    def grid_complexity(self):
        s = self.sizes()
        return sum(s) / s[0]

    def operator_complexity(self):
        nnz = [lvl.A.nnz for lvl in self.levels]
        return sum(nnz) / nnz[0]

    def stats(self):
        """Per-level rows: level, n, nnz, and the running complexities."""
        n0, z0 = self.levels[0].A.shape[0], self.levels[0].A.nnz
        rows, sn, sz = [], 0, 0
        for k, lvl in enumerate(self.levels):
            sn += lvl.A.shape[0]
            sz += lvl.A.nnz
            rows.append(dict(level=k, n=lvl.A.shape[0], nnz=lvl.A.nnz,
                             grid_complexity=sn / n0, operator_complexity=sz / z0))
        return rows

    def write_stats_csv(self, path):
        rows = self.stats()
        with open(path, "w", newline="") as fh:
            w = csv.DictWriter(fh, fieldnames=list(rows[0]))
            w.writeheader()
            w.writerows(rows)


def _prolongator(A, cfg):
    if cfg.kind == "rs":
        S = strength_rs(A, cfg.theta_rs)
        return interp_direct(A, S, cf_split(S))
    labels, n_agg = aggregate_sa(A, cfg.theta_sa, keep_isolated=False)
    return prolong_sa(A, labels, n_agg)


def build_hierarchy(A, config=None):
    """Coarsen ``A`` until the coarsest operator is small enough to factor densely.

    Each step builds a prolongation ``P`` and the Galerkin operator
    ``P^T A P``.  Coarsening stops at ``coarse_max`` rows, after
    ``max_levels`` levels, or when a step removes less than
    ``min_reduction`` of the rows.

    Raises
    ------
    DegenerateCoarseningError
        If the very first coarsening step stalls.
    SingularDiagonalError
        If some level has a zero diagonal entry (Gauss-Seidel impossible).
    """
    cfg = config or AmgConfig()
    A = as_csr(A)
    levels = [Level(A)]
    stalled = False
    while levels[-1].A.shape[0] > cfg.coarse_max and len(levels) < cfg.max_levels:
        Af = levels[-1].A
        zero = np.flatnonzero(Af.diagonal() == 0)
        if zero.size:
            raise SingularDiagonalError(int(zero[0]))
        P = as_csr(_prolongator(Af, cfg))
        nc = P.shape[1]
        if nc == 0 or nc > (1.0 - cfg.min_reduction) * Af.shape[0]:
            if len(levels) == 1:
                raise DegenerateCoarseningError(
                    f"first coarsening step kept {nc} of {Af.shape[0]} rows")
            stalled = True
            break
        R = as_csr(P.T)
        levels[-1].P, levels[-1].R = P, R
        levels.append(Level(rap(R, Af, P)))
    factor = dense_cholesky(levels[-1].A.toarray())
    return AmgHierarchy(levels, factor, cfg, stalled)


def vcycle(H, r):
    """Apply one V-cycle to ``A z = r`` starting from ``z = 0``.

    Forward Gauss-Seidel before and backward Gauss-Seidel after each coarse
    correction make the cycle a symmetric linear operator.
    """
    r = np.asarray(r, dtype=np.float64)
    if r.shape != (H.levels[0].A.shape[0],):
        raise DimensionMismatchError("residual does not match the finest level")
    return _cycle(H, 0, r)


def _cycle(H, k, r):
    lvl = H.levels[k]
    if k == H.n_levels - 1:
        return H.coarse_factor.solve(r)
    A = lvl.A
    cfg = H.config
    x = np.zeros_like(r)
    for _ in range(cfg.presmooth):
        _gs(A.indptr, A.indices, A.data, x, r, True)
    rc = lvl.R @ (r - A @ x)
    x += lvl.P @ _cycle(H, k + 1, rc)
    for _ in range(cfg.postsmooth):
        _gs(A.indptr, A.indices, A.data, x, r, False)
    return x
