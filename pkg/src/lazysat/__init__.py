"""lazysat: a CDCL SAT solver with lazy reimplication for chronological backtracking.

The solver supports four backtracking modes at runtime (ncb, wcb, rscb,
lscb), two conflict-analysis strategies, an executable invariant checker,
and a benchmark harness comparing propagation counts across modes.
"""

from .analyze import LearnedClause, analyze, minimize, resolve
from .backtrack import backtrack
from .checker import Violation, check, check_ids
from .formula import (
    Clause,
    DimacsError,
    Formula,
    lit_from_int,
    lit_to_int,
    negate,
    parse_dimacs,
    write_dimacs,
)
from .propagate import Propagator
from .solver import Solver, SolverConfig, Stats, Verdict, choose_backtrack_level, solve_formula
from .state import FALSE, INF, TRUE, UNDEF, TrailState

__all__ = [
    "Clause",
    "DimacsError",
    "FALSE",
    "Formula",
    "INF",
    "LearnedClause",
    "Propagator",
    "Solver",
    "SolverConfig",
    "Stats",
    "TRUE",
    "TrailState",
    "UNDEF",
    "Verdict",
    "Violation",
    "analyze",
    "backtrack",
    "check",
    "check_ids",
    "choose_backtrack_level",
    "lit_from_int",
    "lit_to_int",
    "minimize",
    "negate",
    "parse_dimacs",
    "resolve",
    "solve_formula",
    "write_dimacs",
]

__version__ = "0.1.0"
