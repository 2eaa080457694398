"""The preimage set recursion with a certified termination test.

Starting from the constraint set ``X0``, each iterate is
``X_{k+1} = {x in X0 : f(x) in X_k}``. The recursion stops at the first
``k`` for which every new constraint block ``phi0 o f^{k+1}`` is
certified nonnegative on ``X_k``; then ``X_k`` is the maximal positively
invariant set.

Termination is only guaranteed under a stability hypothesis on ``f``
(an asymptotically stable fixed point in the interior of ``X0`` whose
basin contains ``X0``). Checking that hypothesis is left to the caller.
"""

from __future__ import annotations

import logging
import math
import time
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Union

from .globopt import (BUDGET_EXHAUSTED, INFEASIBLE, CertifiedBound, ChainTerm, NonemptyReport,
                      SolverConfig, certified_min, check_nonempty, minimize_many)
from .interval import Box
from .poly import DimensionError, PolyMap
from .semialg import ImplicitChain, SemialgebraicSet, reduce_redundancy

log = logging.getLogger(__name__)

EXPLICIT = "explicit"
IMPLICIT = "implicit"

Iterate = Union[SemialgebraicSet, ImplicitChain]


@dataclass(frozen=True)
class Problem:
    f: PolyMap
    phi0: PolyMap
    domain_box: Box
    epsilon: float = 0.0
    k_max: int = 10
    mode: str = EXPLICIT
    reduction: bool = False
    solver: SolverConfig = field(default_factory=SolverConfig)
    grid: int | None = None

    def __post_init__(self):
        n = self.f.n
        if self.f.dim_out != n:
            raise DimensionError(f"dynamics must map R^n to R^n, got R^{n} -> R^{self.f.dim_out}")
        if self.phi0.n != n:
            raise DimensionError(f"constraints live in R^{self.phi0.n}, dynamics in R^{n}")
        if len(self.phi0) == 0:
            raise ValueError("at least one constraint is required")
        if self.domain_box.n != n:
            raise DimensionError(f"domain box has dimension {self.domain_box.n}, expected {n}")
        if not (self.epsilon >= 0 and math.isfinite(self.epsilon)):
            raise ValueError("epsilon must be a finite nonnegative number")
        if self.k_max < 0:
            raise ValueError("k_max must be nonnegative")
        if self.mode not in (EXPLICIT, IMPLICIT):
            raise ValueError(f"mode must be {EXPLICIT!r} or {IMPLICIT!r}")
        if self.grid is not None and self.grid < 2:
            raise ValueError("grid resolution must be at least 2")

    @property
    def n(self) -> int:
        return self.f.n

    @property
    def m(self) -> int:
        return len(self.phi0)

    @property
    def constraint_set(self) -> SemialgebraicSet:
        return SemialgebraicSet(self.phi0.components, self.n)


@dataclass(frozen=True)
class IterationRecord:
    k: int
    bounds: tuple[CertifiedBound, ...]
    delta: float
    constraint_count: int
    emptiness: str
    wall_time: float
    passed: bool
    emptiness_witness: tuple[Fraction, ...] | None = None


@dataclass
class MpiResult:
    status: str  # "converged" | "unsuccessful" | "empty"
    k_final: int
    omega: Iterate | None
    trace: list[IterationRecord]
    iterates: list[Iterate]
    problem: Problem
    last_nonempty: int | None = None

    @property
    def final(self) -> Iterate:
        return self.iterates[-1]


def initial_iterate(problem: Problem) -> Iterate:
    if problem.mode == EXPLICIT:
        return problem.constraint_set
    return ImplicitChain(problem.phi0, problem.f, 0)


def constraint_count(X: Iterate) -> int:
    if isinstance(X, ImplicitChain):
        return len(X.base) * (X.depth + 1)
    return len(X)


def step(current: Iterate, problem: Problem, k: int, partial: PolyMap | None = None):
    """Next iterate and the new constraint block ``phi0 o f^{k+1}``.

    In explicit mode ``partial`` may carry ``phi0 o f^k`` so the block is
    one composition away; the block is appended to the current constraints.
    In implicit mode the chain just gets one level deeper.
    """
    if isinstance(current, ImplicitChain):
        nxt = current.deeper()
        block = tuple(ChainTerm(problem.phi0, problem.f, i, nxt.depth) for i in range(problem.m))
        return nxt, block
    if partial is None:
        from .poly import iterate_map
        block = problem.phi0.compose(iterate_map(problem.f, k + 1))
    else:
        block = partial.compose(problem.f)
    nxt = SemialgebraicSet(list(current.constraints) + list(block.components), problem.n)
    return nxt, block


def next_block(current: Iterate, problem: Problem, k: int, partial: PolyMap | None = None):
    """Only the block ``phi0 o f^{k+1}`` (explicit PolyMap or ChainTerms)."""
    if isinstance(current, ImplicitChain):
        return tuple(ChainTerm(problem.phi0, problem.f, i, current.depth + 1) for i in range(problem.m))
    if partial is None:
        from .poly import iterate_map
        return problem.phi0.compose(iterate_map(problem.f, k + 1))
    return partial.compose(problem.f)


def termination_test(current: Iterate, block, problem: Problem) -> tuple[float, list[CertifiedBound]]:
    """Certified minima of each block component over ``current``.

    Returns ``delta`` (smallest certified lower bound) and the bounds.
    """
    items = [(p, current) for p in block]
    bounds = minimize_many(items, problem.domain_box, problem.solver, target=problem.epsilon)
    delta = min(b.lower for b in bounds)
    return delta, bounds


def criterion_met(delta: float, bounds, epsilon: float) -> bool:
    return delta >= epsilon and all(b.status != BUDGET_EXHAUSTED for b in bounds)


def compute_mpi(problem: Problem) -> MpiResult:
    X = initial_iterate(problem)
    iterates: list[Iterate] = [X]
    trace: list[IterationRecord] = []
    partial = problem.phi0 if problem.mode == EXPLICIT else None
    k = 0
    while k < problem.k_max:
        t0 = time.perf_counter()
        ne = check_nonempty(X, problem.domain_box, problem.solver)
        if ne.status == "empty_certified":
            trace.append(IterationRecord(k, (), math.inf, constraint_count(X), ne.status,
                                         time.perf_counter() - t0, True))
            log.info("iterate %d certified empty", k)
            return MpiResult("empty", k, None, trace, iterates, problem, last_nonempty=k - 1)
        block = next_block(X, problem, k, partial)
        delta, bounds = termination_test(X, block, problem)
        if any(b.status == INFEASIBLE for b in bounds):
            trace.append(IterationRecord(k, tuple(bounds), delta, constraint_count(X), "empty_certified",
                                         time.perf_counter() - t0, True))
            return MpiResult("empty", k, None, trace, iterates, problem, last_nonempty=k - 1)
        passed = criterion_met(delta, bounds, problem.epsilon)
        trace.append(IterationRecord(k, tuple(bounds), delta, constraint_count(X), ne.status,
                                     time.perf_counter() - t0, passed, ne.witness))
        log.info("k=%d delta=%.6g constraints=%d passed=%s", k, delta, constraint_count(X), passed)
        if passed:
            return MpiResult("converged", k, X, trace, iterates, problem)
        if isinstance(X, ImplicitChain):
            X = X.deeper()
        else:
            X = SemialgebraicSet(list(X.constraints) + list(block.components), problem.n)
            partial = block
            if problem.reduction:
                X = reduce_redundancy(X, problem.domain_box, problem.solver)
        k += 1
        iterates.append(X)
    return MpiResult("unsuccessful", k, None, trace, iterates, problem)


@dataclass(frozen=True)
class InvarianceReport:
    holds: bool | None  # None: inconclusive
    invariance: tuple[CertifiedBound, ...]
    containment: tuple[CertifiedBound, ...]


def _verdict(bounds) -> bool | None:
    if all(b.lower >= 0 for b in bounds):
        return True
    if any(b.witness is not None and b.value is not None and b.value < 0 for b in bounds):
        return False
    return None


def verify_invariance(S: Iterate, f: PolyMap, problem: Problem,
                      solver: SolverConfig | None = None) -> InvarianceReport:
    """Independent audit: ``S`` inside ``X0`` and ``f(S)`` inside ``S``.

    Every constraint of ``S`` composed with ``f`` is minimized over ``S``,
    and so is every constraint of ``X0``. All certified lower bounds
    nonnegative proves invariance; a feasible witness with a negative
    value disproves it.
    """
    solver = solver or problem.solver
    b = problem.domain_box
    if isinstance(S, ImplicitChain):
        inv = [ChainTerm(S.base, S.dynamics, i, j + 1) for j in range(S.depth + 1) for i in range(len(S.base))]
        if S.dynamics != f:
            raise ValueError("an implicit chain can only be audited against its own dynamics")
    else:
        inv = [g.compose(f) for g in S.constraints]
    inv_bounds = tuple(minimize_many([(p, S) for p in inv], b, solver, target=0.0))
    cont_bounds = tuple(minimize_many([(g, S) for g in problem.phi0], b, solver, target=0.0))
    inv_ok = _verdict(inv_bounds)
    cont_ok = _verdict(cont_bounds)
    if inv_ok is False or cont_ok is False:
        holds = False
    elif inv_ok and cont_ok:
        holds = True
    else:
        holds = None
    return InvarianceReport(holds, inv_bounds, cont_bounds)


def fixed_point_report(problem: Problem):
    from .globopt import find_fixed_point
    return find_fixed_point(problem.f, problem.constraint_set, problem.domain_box, problem.solver)


def audit_nonempty(problem: Problem) -> NonemptyReport:
    return check_nonempty(problem.constraint_set, problem.domain_box, problem.solver)


__all__ = [
    "EXPLICIT", "IMPLICIT", "Problem", "IterationRecord", "MpiResult", "InvarianceReport",
    "initial_iterate", "step", "next_block", "termination_test", "compute_mpi", "verify_invariance",
    "certified_min",
]
