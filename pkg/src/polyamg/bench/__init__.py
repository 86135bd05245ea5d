"""Experiment driver: specs, runs, tables and the command line."""

from .emit import emit, render, to_text
from .experiment import (
    ExperimentSpec,
    ResultRow,
    checkerboard_field,
    make_mesh,
    parse_coeff,
    random_load,
    run_experiment,
)
from .suite import run_specs, suite_specs

__all__ = [
    "ExperimentSpec", "ResultRow", "checkerboard_field", "random_load", "run_experiment",
    "make_mesh", "parse_coeff", "emit", "render", "to_text", "run_specs", "suite_specs",
]
