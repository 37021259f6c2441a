"""Safe interval branch and bound for continuous constrained optimization."""

from __future__ import annotations

__version__ = "0.1.0"

from .contractor import hc4_revise, prune
from .expr import Expr, eval_interval, eval_point, gradient_interval, gradient_point
from .feasibility import feasibility_correction, moore_penrose_step
from .interval import EMPTY, ENTIRE, Box, Interval
from .local_search import local_descent, multistart
from .lp import LinearProgram, certify_infeasible, safe_lower_bound, simplex_solve
from .problem import ParseError, Problem, load_problem, parse_problem
from .proof import ProvenBox, inflate_and_prove, krawczyk_existence, replay_certificate
from .relaxation import linearize
from .solver import SolverConfig, SolveReport, Strategy, branch_and_bound, split, upper_bounding

__all__ = [
    "__version__",
    "Box",
    "EMPTY",
    "ENTIRE",
    "Expr",
    "Interval",
    "LinearProgram",
    "ParseError",
    "Problem",
    "ProvenBox",
    "SolveReport",
    "SolverConfig",
    "Strategy",
    "branch_and_bound",
    "certify_infeasible",
    "eval_interval",
    "eval_point",
    "feasibility_correction",
    "gradient_interval",
    "gradient_point",
    "hc4_revise",
    "inflate_and_prove",
    "krawczyk_existence",
    "linearize",
    "load_problem",
    "local_descent",
    "moore_penrose_step",
    "multistart",
    "parse_problem",
    "prune",
    "replay_certificate",
    "safe_lower_bound",
    "simplex_solve",
    "split",
    "upper_bounding",
]
