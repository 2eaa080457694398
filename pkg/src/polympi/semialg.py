"""Basic semialgebraic sets and the restricted preimage update."""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from math import lcm
from typing import Sequence

from .poly import DimensionError, Polynomial, PolyMap


class SemialgebraicSet:
    """``{x : g(x) >= 0 for every constraint g}``, closed inequalities only."""

    __slots__ = ("n", "constraints")

    def __init__(self, constraints: Sequence[Polynomial] | PolyMap, n: int | None = None):
        cons = tuple(constraints)
        if not cons:
            raise ValueError("a semialgebraic set needs at least one constraint")
        if n is None:
            n = cons[0].n
        for c in cons:
            if c.n != n:
                raise DimensionError(f"constraint in {c.n} variables, set declared in R^{n}")
        self.n = n
        self.constraints = cons

    @classmethod
    def parse(cls, texts: Sequence[str], n: int) -> SemialgebraicSet:
        return cls([Polynomial.parse(t, n) for t in texts], n)

    def __len__(self) -> int:
        return len(self.constraints)

    def __eq__(self, other) -> bool:
        return isinstance(other, SemialgebraicSet) and self.n == other.n and self.constraints == other.constraints

    def __hash__(self) -> int:
        return hash((self.n, self.constraints))

    def __repr__(self) -> str:
        return f"SemialgebraicSet(n={self.n}, {len(self.constraints)} constraints)"

    def as_map(self) -> PolyMap:
        return PolyMap(self.constraints, self.n)

    def to_strings(self) -> list[str]:
        return [str(c) for c in self.constraints]

    def contains(self, x) -> bool:
        if len(x) != self.n:
            raise DimensionError(f"point has dimension {len(x)}, set lives in R^{self.n}")
        xs = [v if isinstance(v, Fraction) else Fraction(v) for v in x]
        D = lcm(*(v.denominator for v in xs))
        nums = [v.numerator * (D // v.denominator) for v in xs]
        # denominators are positive, so the sign of the scaled numerator decides
        return all(c._eval_scaled(nums, D)[0] >= 0 for c in self.constraints)

    def __contains__(self, x) -> bool:
        return self.contains(x)


@dataclass(frozen=True)
class ImplicitChain:
    """``{x : base(f^j(x)) >= 0 for j = 0..depth}`` with no compositions formed."""

    base: PolyMap
    dynamics: PolyMap
    depth: int

    def __post_init__(self):
        if self.depth < 0:
            raise ValueError("depth must be nonnegative")
        if self.dynamics.n != self.dynamics.dim_out:
            raise DimensionError("dynamics must map R^n to itself")
        if self.base.n != self.dynamics.n:
            raise DimensionError(f"constraints on R^{self.base.n}, dynamics on R^{self.dynamics.n}")

    @property
    def n(self) -> int:
        return self.base.n

    def deeper(self) -> ImplicitChain:
        return ImplicitChain(self.base, self.dynamics, self.depth + 1)

    def contains(self, x) -> bool:
        return chain_contains(self, x)

    def __contains__(self, x) -> bool:
        return chain_contains(self, x)

    def explicit(self) -> SemialgebraicSet:
        """Materialize the stacked constraints by explicit composition."""
        cons = list(self.base.components)
        fk = PolyMap.identity(self.n)
        for _ in range(self.depth):
            fk = self.dynamics.compose(fk)
            cons.extend(g.compose(fk) for g in self.base.components)
        return SemialgebraicSet(cons, self.n)


def contains(S: SemialgebraicSet, x) -> bool:
    return S.contains(x)


def preimage_update(S: SemialgebraicSet, f: PolyMap, X0: SemialgebraicSet) -> SemialgebraicSet:
    """``{x in X0 : f(x) in S}``: X0's constraints followed by ``S o f``."""
    if not (S.n == X0.n == f.n == f.dim_out):
        raise DimensionError(f"dimensions disagree: S in R^{S.n}, X0 in R^{X0.n}, f: R^{f.n} -> R^{f.dim_out}")
    composed = [g.compose(f) for g in S.constraints]
    return SemialgebraicSet(list(X0.constraints) + composed, X0.n)


def chain_contains(C: ImplicitChain, x) -> bool:
    if len(x) != C.n:
        raise DimensionError(f"point has dimension {len(x)}, chain lives in R^{C.n}")
    y = tuple(v if isinstance(v, Fraction) else Fraction(v) for v in x)
    for j in range(C.depth + 1):
        if j:
            y = C.dynamics.evaluate(y)
        if any(v < 0 for v in C.base.evaluate(y)):
            return False
    return True


def first_exit(base: PolyMap, f: PolyMap, x, depth: int) -> int:
    """Smallest j <= depth with ``base(f^j(x))`` violated, or ``depth + 1``.

    Membership in the k-th iterate is then ``first_exit(...) > k``.
    """
    y = tuple(v if isinstance(v, Fraction) else Fraction(v) for v in x)
    for j in range(depth + 1):
        if j:
            y = f.evaluate(y)
        if any(v < 0 for v in base.evaluate(y)):
            return j
    return depth + 1


def reduce_redundancy(S: SemialgebraicSet, b, cfg=None, threshold: Fraction = Fraction(0)) -> SemialgebraicSet:
    """Drop constraints whose certified minimum over the others is ``>= 0``.

    Single pass in list order. Each test is made against the constraints
    still kept, so two mutually redundant copies never both disappear. A
    constraint whose minimization does not certify is kept.
    """
    from .globopt import SolverConfig, certified_min

    cfg = cfg or SolverConfig()
    kept = list(S.constraints)
    i = 0
    while i < len(kept):
        if len(kept) == 1:
            break
        others = kept[:i] + kept[i + 1:]
        bound = certified_min(kept[i], SemialgebraicSet(others, S.n), b, cfg, target=float(threshold))
        if bound.status != "budget_exhausted" and bound.lower >= threshold:
            del kept[i]
        else:
            i += 1
    return SemialgebraicSet(kept, S.n)


