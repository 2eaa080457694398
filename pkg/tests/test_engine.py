import math
import random
from fractions import Fraction

import pytest

from polympi.engine import (EXPLICIT, IMPLICIT, Problem, compute_mpi, constraint_count, initial_iterate, step,
                            termination_test, verify_invariance)
from polympi.examples import DOMAIN, ball, dynamics, problem
from polympi.globopt import SolverConfig, find_fixed_point
from polympi.interval import Box
from polympi.poly import DimensionError, PolyMap
from polympi.semialg import ImplicitChain, SemialgebraicSet, contains

from .conftest import random_rationals

B2 = Box(DOMAIN)


@pytest.fixture(scope="module")
def inf_result():
    return compute_mpi(problem("inf-norm"))


def test_step_explicit_counts_constraints():
    p = problem("inf-norm")
    X1, block = step(initial_iterate(p), p, 0)
    assert len(X1) == 8 and len(block) == 4


def test_step_implicit_deepens_chain():
    p = problem("inf-norm", mode=IMPLICIT)
    X1, block = step(initial_iterate(p), p, 0)
    assert isinstance(X1, ImplicitChain) and X1.depth == 1
    assert constraint_count(X1) == 8


def test_step_under_identity_keeps_membership(rng):
    p = Problem(PolyMap.identity(2), ball("1-norm"), B2)
    X0 = initial_iterate(p)
    X1, _ = step(X0, p, 0)
    for x in random_rationals(rng, 300):
        assert contains(X1, x) == contains(X0, x)


def test_origin_survives_every_step():
    for mode in (EXPLICIT, IMPLICIT):
        p = problem("2-norm", mode=mode)
        X = initial_iterate(p)
        for k in range(4):
            X, _ = step(X, p, k)
            assert X.contains((0, 0))


def test_termination_identity_inf_ball_passes_at_zero():
    p = Problem(PolyMap.identity(2), ball("inf-norm"), B2)
    X0 = initial_iterate(p)
    _, block = step(X0, p, 0)
    delta, bounds = termination_test(X0, block[4:] if len(block) > 4 else block, p)
    assert delta == 0
    assert all(b.value == 0 for b in bounds)


def test_termination_fails_at_first_iterate():
    p = problem("inf-norm")
    X0 = initial_iterate(p)
    from polympi.engine import next_block
    delta, _ = termination_test(X0, next_block(X0, p, 0), p)
    assert delta < 0


def test_converges_in_three_iterations(inf_result):
    r = inf_result
    assert r.status == "converged" and r.k_final == 2
    assert [t.k for t in r.trace] == [0, 1, 2]
    assert [t.passed for t in r.trace] == [False, False, True]
    assert r.trace[-1].delta >= 0
    assert len(r.omega) == 12


def test_identity_converges_immediately():
    for mode in (EXPLICIT, IMPLICIT):
        r = compute_mpi(Problem(PolyMap.identity(2), ball("2-norm"), B2, mode=mode))
        assert r.status == "converged" and r.k_final == 0
        X = r.omega.explicit() if isinstance(r.omega, ImplicitChain) else r.omega
        assert X == SemialgebraicSet(ball("2-norm").components, 2)


def test_contradictory_constraints_are_empty():
    r = compute_mpi(Problem(dynamics(), PolyMap.parse(["x1 - 1", "-x1 - 1"], 2), B2))
    assert r.status == "empty" and r.omega is None
    assert r.trace[-1].emptiness == "empty_certified"
    assert r.last_nonempty == -1


def test_iterate_becoming_empty():
    # the shift pushes everything out of the unit square after one step
    r = compute_mpi(Problem(PolyMap.parse(["x1 + 3", "x2"], 2), ball("inf-norm"), B2))
    assert r.status == "empty"
    assert r.k_final == 1 and r.last_nonempty == 0


def test_k_max_stops_unsuccessfully():
    r = compute_mpi(problem("inf-norm", k_max=1))
    assert r.status == "unsuccessful" and r.omega is None and r.k_final == 1


def test_unstable_transcription_never_terminates():
    p = Problem(dynamics(unsquared=True), ball("inf-norm"), B2, k_max=2)
    assert compute_mpi(p).status == "unsuccessful"


def test_reduction_keeps_the_same_set(rng):
    plain = compute_mpi(problem("inf-norm"))
    reduced = compute_mpi(problem("inf-norm", reduction=True))
    assert reduced.status == "converged" and reduced.k_final == plain.k_final
    assert len(reduced.omega) <= len(plain.omega)
    for x in random_rationals(rng, 2000, lo=-2, hi=2):
        assert contains(reduced.omega, x) == contains(plain.omega, x)


def test_problem_validation():
    with pytest.raises(DimensionError):
        Problem(dynamics(), PolyMap.parse(["1 - x1"], 1), B2)
    with pytest.raises(DimensionError):
        Problem(dynamics(), ball("2-norm"), Box([(-1, 1)]))
    with pytest.raises(ValueError):
        Problem(dynamics(), ball("2-norm"), B2, epsilon=-1)
    with pytest.raises(ValueError):
        Problem(dynamics(), ball("2-norm"), B2, mode="lazy")
    with pytest.raises(ValueError):
        Problem(dynamics(), ball("2-norm"), B2, grid=1)


def test_positive_epsilon_stops_later_or_equal():
    r = compute_mpi(problem("2-norm", epsilon=0.3))
    assert r.status == "converged" and r.trace[-1].delta >= 0.3


def test_monotone_membership_and_fixed_point(inf_result, rng):
    fp = find_fixed_point(dynamics(), SemialgebraicSet(ball("inf-norm").components, 2), B2)
    assert fp.value == 0
    its = inf_result.iterates
    for X in its:
        assert contains(X, fp.witness)
    for x in random_rationals(rng, 3000):
        flags = [contains(X, x) for X in its]
        assert all(a or not b for a, b in zip(flags, flags[1:]))


def test_converged_set_is_invariant_on_samples(inf_result, rng):
    omega = inf_result.omega
    f = dynamics()
    X0 = SemialgebraicSet(ball("inf-norm").components, 2)
    hits = 0
    for x in random_rationals(rng, 10_000):
        if contains(omega, x):
            hits += 1
            assert contains(omega, f.evaluate(x)) and contains(X0, x)
    assert hits > 1000


def test_verify_accepts_converged_set(inf_result):
    rep = verify_invariance(inf_result.omega, dynamics(), problem("inf-norm"),
                            solver=SolverConfig(max_nodes=100_000))
    assert rep.holds is True


def test_verify_rejects_constraint_set():
    X0 = SemialgebraicSet(ball("inf-norm").components, 2)
    assert verify_invariance(X0, dynamics(), problem("inf-norm")).holds is False


def test_verify_accepts_small_ellipse():
    # x1^2 + 4 x2^2 decreases along the linearization, so a small level set is invariant
    E = SemialgebraicSet.parse(["1/100 - x1^2 - 4*x2^2"], 2)
    assert verify_invariance(E, dynamics(), problem("inf-norm")).holds is True


def test_verify_implicit_chain(rng):
    r = compute_mpi(problem("2-norm", mode=IMPLICIT))
    assert r.status == "converged" and r.k_final == 2
    assert verify_invariance(r.omega, dynamics(), problem("2-norm", mode=IMPLICIT)).holds is True
