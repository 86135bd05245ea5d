"""Experiment specifications and their execution."""

import math
from dataclasses import dataclass, field

import numpy as np

from ..exceptions import InvalidParameterError
from ..krylov import SOLVERS, StoppingRule, timed_solve
from ..mesh import agglomerate, gen_hexagonal, gen_koch, gen_voronoi, partition
from ..vem import CoefficientField, build_system, error_norms

FAMILIES = ("hexa", "voro", "koch", "agg-voro")
PROBLEMS = ("manufactured", "random-load")
AGG_FINE_PER_PART = 10  # fine Voronoi cells per agglomerated cell


def make_mesh(family, size, seed=0, level=3):
    """Mesh of one family.

    ``size`` is the hexagon column count (hexa), the seed count (voro), the
    tile count per side (koch, iterate ``level``) or the number of coarse
    cells (agg-voro, agglomerated from ``10 * size`` Voronoi cells).
    """
    if family == "hexa":
        return gen_hexagonal(size)
    if family == "voro":
        return gen_voronoi(size, seed)
    if family == "koch":
        return gen_koch(level, size)
    if family == "agg-voro":
        fine = gen_voronoi(AGG_FINE_PER_PART * size, seed)
        return agglomerate(fine, partition(fine, size, seed))
    raise InvalidParameterError(f"family must be one of {FAMILIES}, got {family!r}")


def mesh_id(family, size, seed=0, level=3):
    if family == "hexa":
        return f"hexa-{size}"
    if family == "koch":
        return f"koch-{level}x{size}"
    return f"{family}-{size}-s{seed}"


def checkerboard_field(mesh, L, rng_seed=0):
    """Per-part coefficients ``10**alpha`` with ``alpha`` uniform in ``-5..5``.

    The parts come from :func:`polyamg.mesh.partition` with the same seed;
    the exponents are drawn from an independent stream.
    """
    part = partition(mesh, L, rng_seed)
    alpha = np.random.default_rng([rng_seed, 1]).integers(-5, 6, size=L)
    return CoefficientField(10.0 ** alpha[part.part_of_cell].astype(np.float64))


def random_load(mesh, rng_seed=0):
    """One uniform ``[-1, 1]`` load value per cell."""
    return np.random.default_rng(rng_seed).uniform(-1.0, 1.0, mesh.n_cells)


def exact_solution(x, y):
    return np.sin(2 * np.pi * x) * np.sin(2 * np.pi * y) / (2 * np.pi**2)


def exact_gradient(x, y):
    return (np.cos(2 * np.pi * x) * np.sin(2 * np.pi * y) / np.pi,
            np.sin(2 * np.pi * x) * np.cos(2 * np.pi * y) / np.pi)


def manufactured_load(rho):
    """Load for the exact solution above with constant coefficient ``rho``."""
    return lambda x, y: 4.0 * rho * np.sin(2 * np.pi * x) * np.sin(2 * np.pi * y)


@dataclass(frozen=True)
class ExperimentSpec:
    """One row block of a results table.

    Attributes
    ----------
    family, size, seed, level
        Mesh selection, see :func:`make_mesh`.
    coeff : str
        ``"const:<value>"`` or ``"checker:<L>"``.
    problem : {"manufactured", "random-load"}
        The manufactured problem needs a constant coefficient.
    solvers : tuple of str
        Subset of ``("cg", "rs-amg", "sa-amg", "direct")``.
    stop : StoppingRule
    coeff_seed, load_seed : int
        Seeds of the checkerboard and of the random load.
    """

    family: str
    size: int
    seed: int = 0
    level: int = 3
    coeff: str = "const:1"
    problem: str = "manufactured"
    solvers: tuple = ("rs-amg",)
    stop: StoppingRule = field(default_factory=StoppingRule)
    coeff_seed: int = 0
    load_seed: int = 0

    def __post_init__(self):
        if self.family not in FAMILIES:
            raise InvalidParameterError(f"family must be one of {FAMILIES}, got {self.family!r}")
        if self.problem not in PROBLEMS:
            raise InvalidParameterError(f"problem must be one of {PROBLEMS}, got {self.problem!r}")
        object.__setattr__(self, "solvers", tuple(self.solvers))
        if not self.solvers:
            raise InvalidParameterError("at least one solver is required")
        bad = [s for s in self.solvers if s not in SOLVERS]
        if bad:
            raise InvalidParameterError(f"unknown solvers {bad}; choose from {SOLVERS}")
        kind, value = parse_coeff(self.coeff)
        if self.problem == "manufactured" and kind != "const":
            raise InvalidParameterError("the manufactured problem needs a constant coefficient")

    @property
    def mesh_id(self):
        return mesh_id(self.family, self.size, self.seed, self.level)


def parse_coeff(text):
    """Split ``"const:<v>"`` / ``"checker:<L>"`` into ``(kind, value)``."""
    kind, _, value = str(text).partition(":")
    try:
        if kind == "const":
            v = float(value)
            if not (v > 0 and math.isfinite(v)):
                raise ValueError
            return kind, v
        if kind == "checker":
            v = int(value)
            if v < 1:
                raise ValueError
            return kind, v
    except ValueError:
        pass
    raise InvalidParameterError(f"coefficient must be 'const:<positive>' or 'checker:<L>', got {text!r}")


@dataclass
class ResultRow:
    """One solver run on one system."""

    mesh: str
    family: str
    dof: int
    n_elt: int
    coeff: str
    solver: str
    iterations: int | None = None
    converged: bool = False
    kappa: float | None = None
    setup_time: float | None = None
    solve_time: float | None = None
    l2_error: float | None = None
    h1_error: float | None = None
    error: str = ""


def build_experiment_system(spec, mesh=None):
    """Mesh, coefficient, load and constrained system of ``spec``."""
    mesh = mesh if mesh is not None else make_mesh(spec.family, spec.size, spec.seed, spec.level)
    kind, value = parse_coeff(spec.coeff)
    if kind == "const":
        rho = CoefficientField.constant(mesh.n_cells, value)
    else:
        if value > mesh.n_cells:
            raise InvalidParameterError(f"checkerboard needs L <= {mesh.n_cells}, got {value}")
        rho = checkerboard_field(mesh, value, spec.coeff_seed)
    if spec.problem == "manufactured":
        f = manufactured_load(value)
    else:
        f = random_load(mesh, spec.load_seed)
    return mesh, build_system(mesh, rho, f)


def run_experiment(spec):
    """Run every solver of ``spec`` on the same system from a zero initial guess.

    Solver exceptions are caught and stored in the row's ``error`` field.
    """
    mesh, system = build_experiment_system(spec)
    rows = []
    for name in spec.solvers:
        row = ResultRow(spec.mesh_id, spec.family, system.n_dofs, mesh.n_cells, spec.coeff, name)
        try:
            x, rep = timed_solve(system, name, spec.stop)
        except Exception as exc:  # recorded, not fatal
            row.error = f"{type(exc).__name__}: {exc}"
            rows.append(row)
            continue
        row.iterations = rep.iterations
        row.converged = rep.converged
        row.kappa = rep.kappa_estimate
        row.setup_time = rep.setup_time
        row.solve_time = rep.solve_time
        if spec.problem == "manufactured" and rep.converged:
            row.l2_error, row.h1_error = error_norms(mesh, x, exact_solution, exact_gradient)
        rows.append(row)
    return rows
