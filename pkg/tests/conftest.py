"""Shared oracles and helpers.

The oracles here deliberately avoid the package's parser and evaluator:
polynomial text is evaluated with Python's own expression evaluator over
``Fraction`` values.
"""

from __future__ import annotations

import functools
import random
import re
from fractions import Fraction

import pytest

from polympi.examples import BALLS, QUADRATIC_DYNAMICS

_VAR = re.compile(r"x(\d+)")
_NUM = re.compile(r"(?<![x\d])(\d+(?:\.\d+)?)")


@functools.lru_cache(maxsize=None)
def _compiled(text: str):
    expr = _NUM.sub(r"Fraction('\1')", text.replace("^", "**"))
    expr = _VAR.sub(lambda m: f"X[{int(m.group(1)) - 1}]", expr)
    return compile(expr, "<oracle>", "eval")


def oracle_eval(text: str, x) -> Fraction:
    """Value of polynomial text at an exact point, via ``eval``."""
    return eval(_compiled(text), {"Fraction": Fraction, "X": [Fraction(v) for v in x]})


def oracle_map(texts, x) -> tuple[Fraction, ...]:
    return tuple(oracle_eval(t, x) for t in texts)


def oracle_member(constraints, x) -> bool:
    return all(oracle_eval(c, x) >= 0 for c in constraints)


def oracle_in_iterate(k: int, constraints, dynamics, x) -> bool:
    """``x in X_k`` by the recursion ``X_{k} = {x in X0 : f(x) in X_{k-1}}``."""
    if not oracle_member(constraints, x):
        return False
    return k == 0 or oracle_in_iterate(k - 1, constraints, dynamics, oracle_map(dynamics, x))


def random_rationals(rng: random.Random, count: int, n: int = 2, lo: float = -1.1, hi: float = 1.1,
                     max_den: int = 997):
    out = []
    for _ in range(count):
        pt = []
        for _ in range(n):
            den = rng.randint(1, max_den)
            num = rng.randint(int(lo * den) - 1, int(hi * den) + 1)
            pt.append(Fraction(num, den))
        out.append(tuple(pt))
    return out


@pytest.fixture
def rng():
    return random.Random(20240611)


@pytest.fixture(params=sorted(BALLS))
def ball_name(request):
    return request.param


@pytest.fixture
def dynamics_text():
    return QUADRATIC_DYNAMICS


def pytest_terminal_summary(terminalreporter):
    import sys

    module = sys.modules.get("tests.test_acceptance")
    lines = getattr(module, "REPORT", None)
    if lines:
        terminalreporter.section("acceptance criteria")
        for key in sorted(lines):
            terminalreporter.write_line(lines[key])
