"""CSV and Markdown tables of result rows."""

import csv
import io

COLUMNS = ("mesh", "family", "dof", "n_elt", "coeff", "solver", "iterations", "converged",
           "kappa", "setup_s", "solve_s", "l2_error", "h1_error", "error")
TIMING = ("setup_s", "solve_s")
ERROR_MARK = "*"
DIVERGED_MARK = "-"


def _sig(x, digits):
    return "" if x is None else f"{x:.{digits}g}"


def render(row):
    """String cells of one row.

    Errored runs show ``*`` in every result cell and runs that did not meet
    the stopping rule show ``-`` for the condition estimate and the errors.
    """
    cells = dict(mesh=row.mesh, family=row.family, dof=str(row.dof), n_elt=str(row.n_elt),
                 coeff=row.coeff, solver=row.solver, error=row.error)
    if row.error:
        for k in ("iterations", "converged", "kappa", "setup_s", "solve_s", "l2_error", "h1_error"):
            cells[k] = ERROR_MARK
        return cells
    cells["iterations"] = str(row.iterations)
    cells["converged"] = "yes" if row.converged else "no"
    cells["kappa"] = _sig(row.kappa, 3) if row.converged else DIVERGED_MARK
    cells["setup_s"] = _sig(row.setup_time, 5)
    cells["solve_s"] = _sig(row.solve_time, 5)
    cells["l2_error"] = _sig(row.l2_error, 6) if row.converged else DIVERGED_MARK
    cells["h1_error"] = _sig(row.h1_error, 6) if row.converged else DIVERGED_MARK
    return cells


def to_text(rows, fmt="csv", timings=True):
    """The table as a string; ``timings=False`` drops wall-clock columns."""
    cols = [c for c in COLUMNS if timings or c not in TIMING]
    body = [[render(r)[c] for c in cols] for r in rows]
    if fmt == "csv":
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(cols)
        w.writerows(body)
        return buf.getvalue()
    if fmt in ("md", "markdown"):
        lines = ["| " + " | ".join(cols) + " |", "|" + "---|" * len(cols)]
        lines += ["| " + " | ".join(c.replace("|", "\\|") for c in line) + " |" for line in body]
        return "\n".join(lines) + "\n"
    raise ValueError(f"format must be 'csv' or 'md', got {fmt!r}")


def emit(rows, fmt="csv", path=None, timings=True):
    """Write the table to ``path`` (or return it when ``path`` is None)."""
    text = to_text(rows, fmt, timings)
    if path is None:
        return text
    with open(path, "w", newline="") as fh:
        fh.write(text)
    return text
