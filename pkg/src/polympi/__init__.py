"""Maximal positively invariant sets of polynomial maps on semialgebraic sets."""

from .engine import (EXPLICIT, IMPLICIT, IterationRecord, MpiResult, Problem, compute_mpi, step,
                     termination_test, verify_invariance)
from .globopt import (CertifiedBound, SolverConfig, certified_min, check_bounded, check_nonempty,
                      find_fixed_point)
from .interval import Box, Interval, enclose_range
from .io import ProblemFileError, ProblemSpec, load_problem, parse_problem, read_trace, write_trace
from .poly import DimensionError, Polynomial, PolyMap, compose, evaluate, evaluate_map, iterate_map
from .semialg import (ImplicitChain, SemialgebraicSet, chain_contains, contains, preimage_update,
                      reduce_redundancy)

__version__ = "0.1.0"

__all__ = [
    "Box", "CertifiedBound", "DimensionError", "EXPLICIT", "IMPLICIT", "ImplicitChain", "Interval",
    "IterationRecord", "MpiResult", "ProblemFileError", "ProblemSpec", "PolyMap", "Polynomial", "Problem", "SemialgebraicSet", "SolverConfig",
    "certified_min", "chain_contains", "check_bounded", "check_nonempty", "compose", "compute_mpi",
    "contains", "enclose_range", "evaluate", "evaluate_map", "find_fixed_point", "iterate_map", "load_problem", "parse_problem", "read_trace", "write_trace",
    "preimage_update", "reduce_redundancy", "step", "termination_test", "verify_invariance",
]
