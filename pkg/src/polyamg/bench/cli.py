"""Command-line driver: ``polyamg mesh gen|stats``, ``polyamg solve``, ``polyamg bench suite``."""

import argparse
import csv
import io
import sys
from pathlib import Path

from ..exceptions import InvalidParameterError
from ..krylov import SOLVERS, StoppingRule
from ..mesh import load_mesh, measure, save_mesh
from .emit import emit
from .experiment import FAMILIES, PROBLEMS, ExperimentSpec, make_mesh, mesh_id
from .suite import run_specs, suite_specs


def _mesh_args(p, required=True):
    p.add_argument("--family", choices=FAMILIES, required=required)
    p.add_argument("--size", type=int, required=required,
                   help="hexa: columns; voro: seeds; koch: tiles per side; agg-voro: parts")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--level", type=int, default=3, help="Koch iterate")


def _fmt_arg(p):
    p.add_argument("--format", choices=("csv", "md"), default="csv")


def _solvers(values):
    out = []
    for v in values or ["rs-amg"]:
        out += [s for s in v.split(",") if s]
    for s in out:
        if s not in SOLVERS:
            raise InvalidParameterError(f"unknown solver {s!r}; choose from {SOLVERS}")
    return tuple(out)


def _stop(args):
    if args.abstol is not None:
        return StoppingRule.absolute(args.abstol, args.max_iters)
    return StoppingRule.relative(args.rtol, args.max_iters)


def build_parser():
    parser = argparse.ArgumentParser(prog="polyamg", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    mesh = sub.add_parser("mesh", help="mesh generation and metrics").add_subparsers(
        dest="action", required=True)
    gen = mesh.add_parser("gen", help="write a mesh file")
    _mesh_args(gen)
    gen.add_argument("--out", required=True)
    stats = mesh.add_parser("stats", help="mesh metrics table")
    _mesh_args(stats, required=False)
    stats.add_argument("--mesh", help="read the mesh from a file instead")
    stats.add_argument("--out")
    _fmt_arg(stats)

    solve = sub.add_parser("solve", help="solve one problem with one or more solvers")
    _mesh_args(solve)
    solve.add_argument("--coeff", default="const:1", help="const:<v> or checker:<L>")
    solve.add_argument("--problem", choices=PROBLEMS, default=None,
                       help="default: manufactured for constant, random-load for checkerboard")
    solve.add_argument("--solver", action="append",
                       help=f"one of {', '.join(SOLVERS)}; repeat or comma-separate")
    solve.add_argument("--rtol", type=float, default=1e-10)
    solve.add_argument("--abstol", type=float, default=None)
    solve.add_argument("--max-iters", type=int, default=10000)
    solve.add_argument("--out")
    _fmt_arg(solve)

    bench = sub.add_parser("bench", help="benchmark tables").add_subparsers(
        dest="action", required=True)
    suite = bench.add_parser("suite", help="run every study")
    suite.add_argument("--out", help="directory for one table per study (default: stdout)")
    suite.add_argument("--refinements", type=int, default=3,
                       help="sizes per family; each step quadruples the unknowns")
    suite.add_argument("--quick", action="store_true", help="tiny sizes, for smoke tests")
    suite.add_argument("--seed", type=int, default=0)
    suite.add_argument("--no-timings", action="store_true",
                       help="omit wall-clock columns (byte-reproducible output)")
    _fmt_arg(suite)
    return parser


def _write(text, out):
    if out:
        Path(out).write_text(text)
    else:
        sys.stdout.write(text)


def _mesh_gen(args):
    m = make_mesh(args.family, args.size, args.seed, args.level)
    save_mesh(m, args.out)
    return 0


def _mesh_stats(args):
    if args.mesh:
        m, name = load_mesh(args.mesh), Path(args.mesh).stem
    elif args.family and args.size:
        m = make_mesh(args.family, args.size, args.seed, args.level)
        name = mesh_id(args.family, args.size, args.seed, args.level)
    else:
        raise InvalidParameterError("give --mesh or both --family and --size")
    q = measure(m).as_dict()
    cols = ["mesh"] + list(q)
    vals = [name] + [str(v) if isinstance(v, int) else f"{v:.6g}" for v in q.values()]
    if args.format == "csv":
        buf = io.StringIO()
        csv.writer(buf, lineterminator="\n").writerows([cols, vals])
        text = buf.getvalue()
    else:
        text = "\n".join(["| " + " | ".join(cols) + " |", "|" + "---|" * len(cols),
                          "| " + " | ".join(vals) + " |"]) + "\n"
    _write(text, args.out)
    return 0


def _solve(args):
    problem = args.problem or ("random-load" if args.coeff.startswith("checker") else "manufactured")
    spec = ExperimentSpec(args.family, args.size, args.seed, args.level, args.coeff, problem,
                          _solvers(args.solver), _stop(args))
    rows = run_specs([spec], workers=1)
    _write(emit(rows, args.format), args.out)
    return 1 if any(r.error for r in rows) else 0


def _suite(args):
    tables = suite_specs(args.refinements, args.quick, args.seed)
    ext = "csv" if args.format == "csv" else "md"
    failed = False
    if args.out:
        Path(args.out).mkdir(parents=True, exist_ok=True)
    for name, specs in tables.items():
        rows = run_specs(specs)
        failed |= any(r.error for r in rows)
        text = emit(rows, args.format, timings=not args.no_timings)
        if args.out:
            (Path(args.out) / f"{name}.{ext}").write_text(text)
        else:
            sys.stdout.write(f"# {name}\n{text}\n")
    return 1 if failed else 0


def main(argv=None):
    args = build_parser().parse_args(argv)
    try:
        if args.command == "mesh":
            return (_mesh_gen if args.action == "gen" else _mesh_stats)(args)
        if args.command == "solve":
            return _solve(args)
        return _suite(args)
    except (InvalidParameterError, OSError) as exc:
        print(f"polyamg: error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
