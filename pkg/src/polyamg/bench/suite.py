"""The benchmark suite: one table per study, rows run on a thread pool."""

import os
from concurrent.futures import ThreadPoolExecutor

from ..krylov import SOLVERS, StoppingRule
from .experiment import ExperimentSpec, run_experiment

L_VALUES = (64, 256, 1024)
SUITE_RTOL = 1e-12
CHECKER_ABSTOL = 1e-12


def suite_specs(refinements=3, quick=False, seed=0):
    """Experiment specs of every study, keyed by table name.

    With the default three refinements the largest systems have about 320k
    unknowns.  Each extra refinement quadruples the largest size.
    """
    rel = StoppingRule.relative(SUITE_RTOL)
    ab = StoppingRule.absolute(CHECKER_ABSTOL)
    if quick:
        hexa, voro, agg, koch = (10, 20), (200, 800), (64, 256), ((1, 2), (2, 2))
        checker_seeds, ls = 800, (4, 16)
    else:
        r = range(refinements)
        hexa = tuple(100 * 2**i for i in r)
        voro = tuple(10000 * 4**i for i in r)
        agg = tuple(1024 * 4**i for i in r)
        koch = tuple((level, 16) for level in (1, 2, 3))
        checker_seeds, ls = 40000, L_VALUES
    return {
        "hexa": [ExperimentSpec("hexa", m, solvers=SOLVERS, stop=rel) for m in hexa],
        "voro": [ExperimentSpec("voro", n, seed, solvers=SOLVERS, stop=rel) for n in voro],
        "agg-voro": [ExperimentSpec("agg-voro", n, seed, solvers=SOLVERS, stop=rel) for n in agg],
        "koch": [ExperimentSpec("koch", t, level=lv, solvers=SOLVERS, stop=rel) for lv, t in koch],
        "checker": [ExperimentSpec("voro", checker_seeds, seed, coeff=f"checker:{L}",
                                   problem="random-load", solvers=SOLVERS, stop=ab,
                                   coeff_seed=seed, load_seed=seed) for L in ls],
    }


def worker_count():
    """Thread-pool size: the CPU count, capped by ``POLYAMG_THREADS``."""
    n = os.cpu_count() or 1
    cap = os.environ.get("POLYAMG_THREADS")
    if cap:
        n = min(n, max(1, int(cap)))
    return n


def _safe_run(spec):
    try:
        return run_experiment(spec)
    except Exception as exc:  # mesh or assembly failure: one error row per solver
        from .experiment import ResultRow
        msg = f"{type(exc).__name__}: {exc}"
        return [ResultRow(spec.mesh_id, spec.family, 0, 0, spec.coeff, s, error=msg)
                for s in spec.solvers]


def run_specs(specs, workers=None):
    """Rows of all ``specs`` in spec order, whatever the completion order."""
    workers = workers or worker_count()
    if workers == 1:
        results = [_safe_run(s) for s in specs]
    else:
        with ThreadPoolExecutor(workers) as pool:
            results = list(pool.map(_safe_run, specs))
    return [row for rows in results for row in rows]
