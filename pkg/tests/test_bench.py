import csv
import io

import numpy as np
import pytest

from polyamg.bench import (
    ExperimentSpec,
    ResultRow,
    checkerboard_field,
    emit,
    make_mesh,
    parse_coeff,
    random_load,
    run_experiment,
    suite_specs,
    to_text,
)
from polyamg.bench.cli import main
from polyamg.bench.emit import COLUMNS
from polyamg.bench.suite import run_specs, worker_count
from polyamg.exceptions import InvalidParameterError
from polyamg.krylov import SOLVERS, StoppingRule
from polyamg.mesh import gen_voronoi, load_mesh


@pytest.fixture(scope="module")
def voro():
    return gen_voronoi(600, 2)


# ---- fields and loads -----------------------------------------------------

def test_checkerboard_single_part(voro):
    rho = checkerboard_field(voro, 1, 3).rho_of_cell
    assert np.unique(rho).size == 1
    assert np.log10(rho[0]) in range(-5, 6)


def test_checkerboard_range_and_determinism(voro):
    a = checkerboard_field(voro, 64, 5).rho_of_cell
    b = checkerboard_field(voro, 64, 5).rho_of_cell
    assert a.tobytes() == b.tobytes()
    alpha = np.log10(a)
    np.testing.assert_allclose(alpha, np.round(alpha), atol=1e-12)
    assert alpha.min() >= -5 and alpha.max() <= 5


def test_checkerboard_constant_per_part(voro):
    from polyamg.mesh import partition

    rho = checkerboard_field(voro, 16, 1).rho_of_cell
    part = partition(voro, 16, 1).part_of_cell
    for p in range(16):
        assert np.unique(rho[part == p]).size == 1


def test_checkerboard_too_many_parts(voro):
    with pytest.raises(InvalidParameterError):
        checkerboard_field(voro, voro.n_cells + 1, 0)


def test_random_load(voro):
    f = random_load(voro, 4)
    assert f.shape == (voro.n_cells,) and np.all(np.abs(f) <= 1)
    np.testing.assert_array_equal(f, random_load(voro, 4))
    assert not np.array_equal(f, random_load(voro, 5))


def test_random_load_mean():
    class Cells:
        n_cells = 200_000

    assert abs(random_load(Cells, 0).mean()) <= 0.02


# ---- specs ----------------------------------------------------------------

def test_parse_coeff():
    assert parse_coeff("const:2.5") == ("const", 2.5)
    assert parse_coeff("checker:64") == ("checker", 64)
    for bad in ("const:-1", "checker:0", "checker:x", "foo:1", "const"):
        with pytest.raises(InvalidParameterError):
            parse_coeff(bad)


def test_spec_validation():
    with pytest.raises(InvalidParameterError):
        ExperimentSpec("hexa", 10, solvers=())
    with pytest.raises(InvalidParameterError):
        ExperimentSpec("hexa", 10, solvers=("gmres",))
    with pytest.raises(InvalidParameterError):
        ExperimentSpec("square", 10)
    with pytest.raises(InvalidParameterError):
        ExperimentSpec("voro", 100, coeff="checker:4")  # manufactured needs a constant


@pytest.mark.parametrize("family, size", [("hexa", 6), ("voro", 100), ("koch", 2), ("agg-voro", 16)])
def test_make_mesh_families(family, size):
    m = make_mesh(family, size, seed=1, level=1)
    m.validate()
    if family == "agg-voro":
        assert m.n_cells == 16


# ---- experiments ----------------------------------------------------------

def test_run_experiment_rows():
    rows = run_experiment(ExperimentSpec("hexa", 8, solvers=SOLVERS))
    assert [r.solver for r in rows] == list(SOLVERS)
    assert all(r.converged and r.dof == make_mesh("hexa", 8).n_vertices for r in rows)
    assert all(r.l2_error is not None and np.isfinite(r.l2_error) for r in rows)


def test_direct_l2_error_decreases():
    e = [run_experiment(ExperimentSpec("hexa", m, solvers=("direct",)))[0].l2_error for m in (8, 16)]
    assert e[1] < e[0]


def test_checkerboard_cg_does_not_converge():
    spec = ExperimentSpec("voro", 400, coeff="checker:16", problem="random-load", solvers=("cg",),
                          stop=StoppingRule.absolute(1e-12, 10000))
    row = run_experiment(spec)[0]
    assert not row.converged and row.iterations == 10000 and not row.error


def test_solver_errors_recorded_in_row(monkeypatch):
    from polyamg.sparse import cholesky

    monkeypatch.setattr(cholesky.sparse_cholesky, "__defaults__", (10, True, 1))
    rows = run_experiment(ExperimentSpec("hexa", 6, solvers=("direct", "rs-amg")))
    assert rows[0].error.startswith("FactorTooLargeError")
    assert rows[1].converged and not rows[1].error


def test_identical_specs_identical_csv():
    spec = ExperimentSpec("voro", 300, 3, solvers=("cg", "rs-amg", "sa-amg"))
    a = to_text(run_experiment(spec), timings=False)
    b = to_text(run_experiment(spec), timings=False)
    assert a == b


# ---- emission -------------------------------------------------------------

def rows_example():
    ok = ResultRow("m", "hexa", 10, 4, "const:1", "rs-amg", 7, True, 1.23456, 0.0123456789, 1.5,
                   1e-3, 2e-2)
    slow = ResultRow("m", "hexa", 10, 4, "const:1", "cg", 10000, False, 5.0, 0.0, 3.0)
    bad = ResultRow("m", "hexa", 10, 4, "const:1", "direct", error="FactorTooLargeError: big")
    return [ok, slow, bad]


def test_emit_empty_rows_header_only():
    text = to_text([], "csv")
    assert text.strip().split(",") == list(COLUMNS)
    md = to_text([], "md").splitlines()
    assert len(md) == 2


def test_emit_csv_round_trip(tmp_path):
    rows = rows_example()
    emit(rows, "csv", tmp_path / "t.csv")
    parsed = list(csv.DictReader(open(tmp_path / "t.csv")))
    assert len(parsed) == 3
    assert parsed[0]["kappa"] == "1.23" and float(parsed[0]["kappa"]) == 1.23
    assert parsed[0]["setup_s"] == "0.012346"
    assert parsed[0]["iterations"] == "7"
    assert parsed[1]["kappa"] == "-" and parsed[1]["converged"] == "no"
    assert parsed[2]["iterations"] == "*" and parsed[2]["kappa"] == "*"
    assert parsed[2]["error"] == "FactorTooLargeError: big"


def test_emit_markdown_columns():
    lines = to_text(rows_example(), "md").splitlines()
    n = lines[0].count("|")
    assert all(line.count("|") == n for line in lines)


def test_emit_bad_format_and_path(tmp_path):
    with pytest.raises(ValueError):
        to_text([], "xml")
    with pytest.raises(OSError):
        emit([], "csv", tmp_path / "missing" / "t.csv")


# ---- suite and command line -----------------------------------------------

def test_suite_covers_every_family_and_solver():
    tables = suite_specs()
    assert set(tables) == {"hexa", "voro", "agg-voro", "koch", "checker"}
    for specs in tables.values():
        assert specs and all(set(s.solvers) == set(SOLVERS) for s in specs)
    assert [s.coeff for s in tables["checker"]] == ["checker:64", "checker:256", "checker:1024"]
    big = max(make_mesh("hexa", s.size).n_vertices for s in tables["hexa"])
    assert big <= 350_000


def test_run_specs_keeps_order_with_threads():
    specs = [ExperimentSpec("hexa", m, solvers=("rs-amg",)) for m in (12, 4, 8)]
    rows = run_specs(specs, workers=3)
    assert [r.mesh for r in rows] == ["hexa-12", "hexa-4", "hexa-8"]


def test_worker_cap(monkeypatch):
    monkeypatch.setenv("POLYAMG_THREADS", "1")
    assert worker_count() == 1


def test_cli_mesh_gen_and_stats(tmp_path, capsys):
    out = tmp_path / "m.txt"
    assert main(["mesh", "gen", "--family", "voro", "--size", "50", "--seed", "3", "--out", str(out)]) == 0
    assert load_mesh(out).n_cells == 50
    assert main(["mesh", "stats", "--mesh", str(out)]) == 0
    text = capsys.readouterr().out
    assert text.startswith("mesh,n_elt,n_v,h,h_min,gamma0,gamma1") and ",50," in text
    assert main(["mesh", "stats", "--family", "hexa", "--size", "10", "--format", "md"]) == 0
    assert capsys.readouterr().out.startswith("| mesh")


def test_cli_solve(tmp_path):
    out = tmp_path / "s.csv"
    code = main(["solve", "--family", "hexa", "--size", "10", "--solver", "cg,rs-amg",
                 "--solver", "direct", "--rtol", "1e-8", "--out", str(out)])
    assert code == 0
    rows = list(csv.DictReader(open(out)))
    assert [r["solver"] for r in rows] == ["cg", "rs-amg", "direct"]


def test_cli_solve_checker_absolute(capsys):
    code = main(["solve", "--family", "voro", "--size", "200", "--coeff", "checker:8",
                 "--solver", "rs-amg", "--abstol", "1e-12", "--max-iters", "200"])
    assert code == 0
    row = next(csv.DictReader(io.StringIO(capsys.readouterr().out)))
    assert row["coeff"] == "checker:8" and row["converged"] == "yes"


def test_cli_exit_code_on_error(monkeypatch, capsys):
    from polyamg.sparse import cholesky

    monkeypatch.setattr(cholesky.sparse_cholesky, "__defaults__", (10, True, 1))
    assert main(["solve", "--family", "hexa", "--size", "6", "--solver", "direct"]) == 1
    assert ",*," in capsys.readouterr().out


def test_cli_non_convergence_is_not_an_error(capsys):
    assert main(["solve", "--family", "hexa", "--size", "20", "--solver", "cg", "--max-iters", "3"]) == 0
    assert ",no," in capsys.readouterr().out


def test_cli_bad_arguments(capsys):
    assert main(["solve", "--family", "hexa", "--size", "6", "--coeff", "const:-2"]) == 2
    with pytest.raises(SystemExit):
        main(["solve", "--family", "cube", "--size", "6"])


def test_cli_quick_suite(tmp_path):
    assert main(["bench", "suite", "--quick", "--out", str(tmp_path), "--format", "md"]) == 0
    for name in ("hexa", "voro", "agg-voro", "koch", "checker"):
        lines = (tmp_path / f"{name}.md").read_text().splitlines()
        assert len(lines) > 2
