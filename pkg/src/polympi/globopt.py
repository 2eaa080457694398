"""Certified global minimization of polynomials over boxed semialgebraic sets.

Interval branch-and-bound: boxes are bisected along their widest side and
explored best-first. A box is discarded when some constraint is provably
negative on it, or when the objective provably cannot beat the incumbent.
Incumbents are box midpoints whose feasibility and objective value are
checked in exact rational arithmetic, so the reported upper bound is
always attained by a feasible point.
"""

from __future__ import annotations

import heapq
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence, Union

import numpy as np

from .interval import (Box, ChainEnclosure, EnclosureParts, PolyEnclosure, _rigorous_sum, down,
                       exact_range, frac_down, frac_up, mean_value_slack, up)
from .poly import DimensionError, Polynomial, PolyMap
from .semialg import ImplicitChain, SemialgebraicSet

CONVERGED = "converged"
BUDGET_EXHAUSTED = "budget_exhausted"
INFEASIBLE = "infeasible_certified"


@dataclass(frozen=True)
class SolverConfig:
    gap: float = 1e-6
    min_width: float = 1e-10
    max_nodes: int = 200_000
    deterministic: bool = True
    batch: int = 16

    def __post_init__(self):
        if not self.gap > 0:
            raise ValueError("gap tolerance must be positive")
        if not self.min_width > 0:
            raise ValueError("minimum box width must be positive")
        if self.max_nodes < 1 or self.batch < 1:
            raise ValueError("node budget and batch size must be at least 1")


@dataclass(frozen=True)
class CertifiedBound:
    """``lower <= min <= upper``; ``upper`` is the value at ``witness``."""

    lower: float
    upper: float
    witness: tuple[Fraction, ...] | None
    status: str
    nodes: int = 0
    value: Fraction | None = None  # exact objective value at the witness

    @property
    def gap(self) -> float:
        return self.upper - self.lower

    @property
    def converged(self) -> bool:
        return self.status == CONVERGED


@dataclass(frozen=True)
class ChainTerm:
    """The function ``base[index](f^depth(x))``, never composed explicitly."""

    base: PolyMap
    dynamics: PolyMap
    index: int
    depth: int

    @property
    def n(self) -> int:
        return self.base.n

    def evaluate(self, x) -> Fraction:
        y = tuple(Fraction(v) for v in x)
        for _ in range(self.depth):
            y = self.dynamics.evaluate(y)
        return self.base[self.index].evaluate(y)

    def explicit(self) -> Polynomial:
        g = self.base[self.index]
        fk = PolyMap.identity(self.n)
        for _ in range(self.depth):
            fk = self.dynamics.compose(fk)
        return g.compose(fk)


Objective = Union[Polynomial, ChainTerm]
Region = Union[SemialgebraicSet, ImplicitChain, None]


@dataclass
class SearchLog:
    """Optional record of boxes discarded as infeasible (for auditing)."""

    infeasible: list[tuple[np.ndarray, np.ndarray]] = field(default_factory=list)
    limit: int = 10_000


class _Problem:
    """Batched bounds and exact checks for one (objective, region) pair."""

    def __init__(self, p: Objective, S: Region, n: int):
        self.n = n
        self.p = p
        self.S = S
        self.chain = None
        self.chain_depth = -1
        self.obj_from_chain = False
        self.cons_enc = None
        self.diff_enc = None
        self.obj_enc = None
        self.obj_is_constraint = False
        if isinstance(S, ImplicitChain):
            self.chain = ChainEnclosure(S.base, S.dynamics)
            self.chain_depth = S.depth
        elif isinstance(S, SemialgebraicSet):
            self.cons_enc = PolyEnclosure(S.constraints)
        if isinstance(p, ChainTerm) and p.dynamics == PolyMap.identity(n):
            # under the identity every chain level is the base constraint itself
            p = p.base.components[p.index]
            self.p = p
            if isinstance(S, ImplicitChain) and S.dynamics == PolyMap.identity(n):
                self.S = S = SemialgebraicSet(S.base.components, n)
                self.chain = None
                self.chain_depth = -1
                self.cons_enc = PolyEnclosure(S.constraints)
        if isinstance(p, ChainTerm):
            if self.chain is not None and p.base == S.base and p.dynamics == S.dynamics:
                self.obj_from_chain = True
                self.chain_depth = max(self.chain_depth, p.depth)
            else:
                self.obj_chain = ChainEnclosure(p.base, p.dynamics)
        else:
            self.obj_enc = PolyEnclosure([p])
            # an objective that is one of the constraints is nonnegative on the set
            self.obj_is_constraint = isinstance(S, ImplicitChain) and p in S.base.components
            if isinstance(S, SemialgebraicSet):
                # p >= p - g on the feasible set whenever g >= 0 there
                diffs = [p - g for g in S.constraints if len(p - g) < len(p)]
                if diffs:
                    self.diff_enc = PolyEnclosure(diffs)

    def parts(self, lo, hi) -> tuple[EnclosureParts, EnclosureParts]:
        """Objective parts (one row) and constraint parts (one row each)."""
        N, n = lo.shape
        obj = None
        if self.chain is not None:
            cp = self.chain.parts(lo, hi, self.chain_depth)
            m = len(self.S.base)
            cons = cp.select(slice(0, (self.S.depth + 1) * m))
            if self.obj_from_chain:
                row = self.p.depth * m + self.p.index
                obj = cp.select(slice(row, row + 1))
                if self.p.depth <= self.S.depth:
                    # the objective is itself one of the constraints
                    obj.lo[0] = np.maximum(obj.lo[0], 0.0)
        elif self.cons_enc is not None:
            cons = self.cons_enc.parts(lo, hi)
        else:
            cons = EnclosureParts.empty(0, n, N)
        if self.obj_enc is not None:
            obj = self.obj_enc.parts(lo, hi)
            if self.obj_is_constraint:
                obj.lo[0] = np.maximum(obj.lo[0], 0.0)
            if self.diff_enc is not None:
                d_lo, _ = self.diff_enc.bounds(lo, hi)
                obj.lo[0] = np.maximum(obj.lo[0], d_lo.max(axis=0))
        elif obj is None:
            op = self.obj_chain.parts(lo, hi, self.p.depth)
            row = self.p.depth * len(self.p.base) + self.p.index
            obj = op.select(slice(row, row + 1))
        return obj, cons

    def approx(self, x):
        """Float objective and worst constraint value at points ``x``."""
        if isinstance(self.S, ImplicitChain):
            worst = np.full(x.shape[0], np.inf)
            y = x
            for j in range(self.S.depth + 1):
                if j:
                    y = self._f(y)
                vals = np.array([c.approx(y) for c in self._base_c(self.S.base)])
                worst = np.minimum(worst, vals.min(axis=0))
        elif isinstance(self.S, SemialgebraicSet):
            worst = self.cons_enc.approx(x).min(axis=0)
        else:
            worst = np.full(x.shape[0], np.inf)
        if isinstance(self.p, ChainTerm):
            y = x
            for _ in range(self.p.depth):
                y = self._f(y, self.p.dynamics)
            obj = self._base_c(self.p.base)[self.p.index].approx(y)
        else:
            obj = self.obj_enc.compiled[0].approx(x)
        return obj, worst

    def _base_c(self, base):
        key = ("base", id(base))
        cache = self.__dict__.setdefault("_cache", {})
        if key not in cache:
            from .interval import CompiledPolynomial
            cache[key] = [CompiledPolynomial(c, with_gradient=False) for c in base.components]
        return cache[key]

    def _f(self, y, dynamics=None):
        dynamics = dynamics or self.S.dynamics
        comps = self._base_c(dynamics)
        with np.errstate(over="ignore", invalid="ignore"):
            return np.stack([c.approx(y) for c in comps], axis=1)

    def exact_lower(self, lo, hi) -> float:
        """Rational lower bound of the objective over one box, or ``-inf``."""
        if self.obj_enc is None:
            return -math.inf
        flo = [Fraction(float(v)) for v in lo]
        fhi = [Fraction(float(v)) for v in hi]
        if isinstance(self.S, SemialgebraicSet):
            # same face collapse as the float pass, decided exactly
            for g in self.S.constraints:
                ghi = exact_range(g, flo, fhi)[1]
                if ghi < 0:
                    return math.inf
                if ghi > 0:
                    continue
                for i, d in enumerate(g.gradient()):
                    dlo, dhi = exact_range(d, flo, fhi)
                    if dlo > 0:
                        flo[i] = fhi[i]
                    elif dhi < 0:
                        fhi[i] = flo[i]
        best = exact_range(self.p, flo, fhi)[0]
        if self.diff_enc is not None:
            best = max([best] + [exact_range(d, flo, fhi)[0] for d in self.diff_enc.polys])
        return frac_down(best)

    def exact_value(self, x) -> Fraction:
        return self.p.evaluate(x)

    def exact_feasible(self, x) -> bool:
        if self.S is None:
            return True
        return self.S.contains(x)


def _multipliers(gp: np.ndarray, gg: np.ndarray, straddle: np.ndarray) -> np.ndarray:
    """Nonnegative weights ``lam`` with ``grad p ~ sum lam_j grad g_j``.

    ``gp`` (n, N), ``gg`` (m, n, N), ``straddle`` (m, N) marks constraints
    whose boundary may cross the box. Only those get a weight; this is a
    heuristic, and any nonnegative choice yields a valid bound.
    """
    m, n, N = gg.shape
    lam = np.zeros((m, N))
    counts = straddle.sum(axis=0)
    one = np.flatnonzero(counts == 1)
    if one.size:
        j = np.argmax(straddle[:, one], axis=0)
        g = gg[j, :, one]  # (k, n)
        p = gp[:, one].T
        denom = np.einsum("kn,kn->k", g, g)
        with np.errstate(divide="ignore", invalid="ignore"):
            w = np.einsum("kn,kn->k", p, g) / denom
        lam[j, one] = np.where(np.isfinite(w) & (w > 0), w, 0.0)
    for col in np.flatnonzero(counts > 1):
        rows = np.flatnonzero(straddle[:, col])
        A = gg[rows, :, col].T  # (n, r)
        w, *_ = np.linalg.lstsq(A, gp[:, col], rcond=None)
        if not (np.all(np.isfinite(w)) and np.all(w >= 0)):
            w = np.zeros(len(rows))
            best = None
            for t, r in enumerate(rows):
                g = gg[r, :, col]
                d = g @ g
                if d > 0:
                    c = max(0.0, float(gp[:, col] @ g) / d)
                    res = np.linalg.norm(gp[:, col] - c * g)
                    if best is None or res < best:
                        best = res
                        w[:] = 0.0
                        w[t] = c
        lam[rows, col] = w
    return lam


def lagrangian_lower(obj: EnclosureParts, cons: EnclosureParts, lo, hi) -> np.ndarray:
    """Lower bound of ``p - sum lam_j g_j`` over each box, a valid lower
    bound of ``p`` on the feasible part of the box for ``lam >= 0``."""
    N = lo.shape[0]
    if cons.lo.shape[0] == 0:
        return np.full(N, -np.inf)
    straddle = (cons.lo < 0) & (cons.hi >= 0)
    if not straddle.any():
        return np.full(N, -np.inf)
    gp = (obj.grad_lo[0] + obj.grad_hi[0]) / 2
    gg = (cons.grad_lo + cons.grad_hi) / 2
    with np.errstate(invalid="ignore", over="ignore"):
        lam = _multipliers(gp, gg, straddle)
        lam = np.where(np.isfinite(lam), lam, 0.0)
        # lam >= 0: subtracting lam*g needs lam*g_hi (rounded up) at the center
        # and the interval lam*[g_lo, g_hi] in the gradient
        c_sub = _rigorous_sum(up(lam * cons.center_hi), up(lam * cons.center_hi))[1]
        center = down(obj.center_lo[0] - c_sub)
        sub_hi = _rigorous_sum(up(lam[:, None, :] * cons.grad_hi), up(lam[:, None, :] * cons.grad_hi))[1]
        sub_lo = _rigorous_sum(down(lam[:, None, :] * cons.grad_lo), down(lam[:, None, :] * cons.grad_lo))[0]
        glo = down(obj.grad_lo[0] - sub_hi)
        ghi = up(obj.grad_hi[0] - sub_lo)
        mid = (lo + hi) / 2
        rad = up(np.maximum(hi - mid, mid - lo))
        bound = down(center - mean_value_slack(glo, ghi, rad))
    bound = np.where(np.isnan(bound), -np.inf, bound)
    bound[~straddle.any(axis=0)] = -np.inf
    return bound


def collapse_to_faces(lo, hi, cons: EnclosureParts):
    """Shrink boxes onto the face where an active constraint can vanish.

    If ``g <= 0`` on a box and ``dg/dx_i > 0`` throughout it, a feasible
    point (``g >= 0``) has ``g = 0`` and cannot move up in ``x_i``, so it
    lies on the face ``x_i = hi_i``; symmetrically for a negative slope.
    Returns the new bounds and the indices of boxes that changed.
    """
    if cons.hi.shape[0] == 0:
        return lo, hi, np.empty(0, dtype=int)
    active = cons.hi <= 0  # (m, N)
    if not active.any():
        return lo, hi, np.empty(0, dtype=int)
    act = active[:, None, :]
    to_hi = (act & (cons.grad_lo > 0)).any(axis=0).T  # (N, n)
    to_lo = (act & (cons.grad_hi < 0)).any(axis=0).T
    to_lo &= ~to_hi  # both at once only on a degenerate box
    changed = np.flatnonzero((to_hi | to_lo).any(axis=1) & ((hi - lo) > 0).any(axis=1))
    if changed.size == 0:
        return lo, hi, changed
    lo, hi = lo.copy(), hi.copy()
    lo[to_hi] = hi[to_hi]
    hi[to_lo] = lo[to_lo]
    return lo, hi, changed


def _region_dim(S: Region) -> int | None:
    return None if S is None else S.n


def certified_min(p: Objective, S: Region, b: Box, cfg: SolverConfig | None = None,
                  log: SearchLog | None = None, target: float | None = None) -> CertifiedBound:
    """Certified bounds on ``min {p(x) : x in S, x in b}``.

    With ``target`` set, the search goes on past the gap tolerance until
    the lower bound reaches ``target`` or a feasible value below it is
    found, as far as the node budget allows. Callers that only need the
    sign of ``min - target`` use this.
    """
    cfg = cfg or SolverConfig()
    n = b.n
    if p.n != n or (S is not None and S.n != n):
        raise DimensionError(f"objective in R^{p.n}, set in R^{_region_dim(S)}, box in R^{n}")
    prob = _Problem(p, S, n)
    root_lo, root_hi = b.float_hull()
    exact_box = all(Fraction(a) == q for a, q in zip(root_lo, b.lo)) and \
        all(Fraction(a) == q for a, q in zip(root_hi, b.hi))

    best_val: Fraction | None = None
    best_x: tuple[Fraction, ...] | None = None
    best_up = math.inf
    heap: list = []
    frozen_lower = math.inf
    nodes = 0
    seq = 0

    def try_candidates(mids, obj_approx, worst):
        nonlocal best_val, best_x, best_up
        order = np.argsort(obj_approx, kind="stable")
        for idx in order:
            if not obj_approx[idx] < best_up + 1e-12 * (1 + abs(best_up)) and best_val is not None:
                break
            if worst[idx] < -1e-9:
                continue
            x = tuple(Fraction(float(v)) for v in mids[idx])
            if not exact_box and not b.contains(x):
                continue
            if not prob.exact_feasible(x):
                continue
            val = prob.exact_value(x)
            if best_val is None or val < best_val:
                best_val, best_x, best_up = val, x, frac_up(val)
                return

    def push_children(lo, hi, inherited=None):
        nonlocal nodes, seq, frozen_lower
        obj, cons = prob.parts(lo, hi)
        lo, hi, changed = collapse_to_faces(lo, hi, cons)
        if changed.size:
            obj, cons = prob.parts(lo, hi)
        olo = np.maximum(obj.lo[0], lagrangian_lower(obj, cons, lo, hi))
        if inherited is not None:
            # a parent's bound holds on every child, which keeps refinement monotone
            olo = np.fmax(olo, inherited)
        if target is not None:
            # rounding alone may keep a bound just under the target
            near = np.flatnonzero((olo < target) & (olo >= target - 1e-9 * (1 + abs(target))))
            for i in near:
                olo[i] = max(olo[i], prob.exact_lower(lo[i], hi[i]))
        chi = cons.hi
        nodes += lo.shape[0]
        infeasible = (chi < 0).any(axis=0) if chi.shape[0] else np.zeros(lo.shape[0], bool)
        if log is not None:
            for i in np.flatnonzero(infeasible):
                if len(log.infeasible) < log.limit:
                    log.infeasible.append((lo[i].copy(), hi[i].copy()))
        alive = np.flatnonzero(~infeasible)
        slack = np.nan_to_num(chi.min(axis=0), nan=-np.inf) if chi.shape[0] else np.zeros(lo.shape[0])
        if alive.size:
            mids = (lo[alive] + hi[alive]) / 2
            # also try the corner the gradient points away from, where a
            # monotone objective is smallest
            glo, ghi = obj.grad_lo[0][:, alive].T, obj.grad_hi[0][:, alive].T
            corners = np.where(glo > 0, lo[alive], np.where(ghi < 0, hi[alive], mids))
            moved = np.flatnonzero((corners != mids).any(axis=1))
            extra = [corners[moved]]
            if chi.shape[0]:
                # and the corner that raises the tightest constraint
                j = np.argmin(cons.center_lo[:, alive], axis=0)
                cglo = cons.grad_lo[j, :, alive]
                cghi = cons.grad_hi[j, :, alive]
                up_c = np.where(cglo > 0, hi[alive], np.where(cghi < 0, lo[alive], mids))
                extra.append(up_c[(up_c != mids).any(axis=1)])
            mids = np.concatenate([mids] + extra)
            with np.errstate(over="ignore", invalid="ignore"):
                oa, wa = prob.approx(mids)
            oa = np.where(np.isfinite(oa), oa, np.inf)
            try_candidates(mids, oa, np.where(np.isnan(wa), -np.inf, wa))
        for i in alive:
            lower = float(olo[i])
            if math.isnan(lower):
                lower = -math.inf
            if best_val is not None and lower >= best_up:
                continue
            # ties (a constant objective, say) go to the box with most constraint slack
            heapq.heappush(heap, (lower, -slack[i], seq, lo[i], hi[i]))
            seq += 1

    push_children(root_lo[None, :], root_hi[None, :])

    def decided(lower):
        return target is None or lower >= target or (best_val is not None and best_val < target)

    status = None
    gap_met = False
    budget = cfg.max_nodes
    while True:
        open_lower = heap[0][0] if heap else math.inf
        lower = min(open_lower, frozen_lower)
        if best_val is not None:
            lower = min(lower, frac_down(best_val))
        if not gap_met and best_val is not None and best_up - lower <= cfg.gap:
            gap_met = True
            # a sign decision that needs far more work than the gap did is
            # usually a minimum touching the target exactly; cap the extra effort
            budget = min(cfg.max_nodes, 4 * nodes + 1000)
        if not heap:
            if best_val is None and frozen_lower == math.inf:
                status = INFEASIBLE
            elif gap_met:
                status = CONVERGED
            else:
                status = BUDGET_EXHAUSTED
            break
        if gap_met and decided(lower):
            status = CONVERGED
            break
        if nodes >= budget:
            status = CONVERGED if gap_met else BUDGET_EXHAUSTED
            break
        los, his, lbs = [], [], []
        while heap and len(los) < cfg.batch:
            lb, _, _, lo, hi = heapq.heappop(heap)
            if best_val is not None and lb >= best_up:
                heap.clear()
                break
            widths = hi - lo
            d = int(np.argmax(widths))  # first index among ties
            if widths[d] < cfg.min_width:
                frozen_lower = min(frozen_lower, lb)
                continue
            mid = (lo[d] + hi[d]) / 2
            lo2, hi1 = lo.copy(), hi.copy()
            hi1[d] = mid
            lo2[d] = mid
            los.extend([lo, lo2])
            his.extend([hi1, hi])
            lbs.extend([lb, lb])
        if los:
            push_children(np.array(los), np.array(his), np.array(lbs))

    if status == INFEASIBLE:
        return CertifiedBound(math.inf, math.inf, None, INFEASIBLE, nodes)
    if best_val is None:
        return CertifiedBound(lower, math.inf, None, status, nodes)
    return CertifiedBound(min(lower, best_up), best_up, best_x, status, nodes, best_val)


# auxiliary checks


@dataclass(frozen=True)
class NonemptyReport:
    status: str  # "nonempty" | "empty_certified" | "unknown"
    witness: tuple[Fraction, ...] | None = None
    nodes: int = 0


def check_nonempty(S: Region, b: Box, cfg: SolverConfig | None = None) -> NonemptyReport:
    """Find an exactly feasible rational point or prove ``S`` misses ``b``."""
    zero = Polynomial.zero(b.n)
    r = certified_min(zero, S, b, cfg)
    if r.witness is not None:
        return NonemptyReport("nonempty", r.witness, r.nodes)
    if r.status == INFEASIBLE:
        return NonemptyReport("empty_certified", None, r.nodes)
    return NonemptyReport("unknown", None, r.nodes)


def simplex_normals(n: int) -> list[tuple[Fraction, ...]]:
    """Outward facet normals of the standard simplex: ``-e_i`` and ``(1,...,1)``."""
    dirs = [tuple(Fraction(-1 if i == j else 0) for i in range(n)) for j in range(n)]
    dirs.append(tuple(Fraction(1) for _ in range(n)))
    return dirs


@dataclass(frozen=True)
class DirectionReport:
    direction: tuple[float, ...]  # unit vector
    maximum: float  # certified upper bound on max c.x over S and b (c unit)
    attained: float  # value at the exact witness
    touches_box_boundary: bool
    status: str


@dataclass(frozen=True)
class BoundednessReport:
    feasibility: NonemptyReport
    directions: tuple[DirectionReport, ...] = ()

    @property
    def bounded(self) -> bool | None:
        """True if certified bounded inside the box, None if inconclusive."""
        if self.feasibility.status == "empty_certified":
            return True
        if self.feasibility.status != "nonempty":
            return None
        if any(d.touches_box_boundary or d.status != CONVERGED for d in self.directions):
            return None
        return True


def check_bounded(S: Region, b: Box, cfg: SolverConfig | None = None,
                  margin: float = 1e-3) -> BoundednessReport:
    """Support of ``S`` along each simplex normal, restricted to ``b``.

    A direction is flagged ``touches_box_boundary`` unless the part of
    ``S`` where ``c.x`` is within tolerance of its maximum is certified to
    stay ``margin`` (relative to the box width) away from every face of
    ``b``; then boundedness relative to ``b`` cannot be concluded.
    """
    cfg = cfg or SolverConfig()
    feas = check_nonempty(S, b, cfg)
    if feas.status != "nonempty":
        return BoundednessReport(feas)
    n = b.n
    reports = []
    for c in simplex_normals(n):
        lin = sum((Polynomial.variable(n, i) * ci for i, ci in enumerate(c) if ci), Polynomial.zero(n))
        r = certified_min(-lin, S, b, cfg)
        scale = math.sqrt(sum(float(ci) ** 2 for ci in c))
        top = -r.lower  # certified upper bound on max c.x
        attained = -r.upper
        level = Fraction(attained) - Fraction(max(cfg.gap, 1e-9)) - Fraction(r.gap)
        touches = _level_touches_boundary(lin, level, S, b, cfg, margin)
        reports.append(DirectionReport(
            tuple(float(ci) / scale for ci in c), top / scale, attained / scale, touches, r.status))
    return BoundednessReport(feas, tuple(reports))


def _level_touches_boundary(lin: Polynomial, level: Fraction, S: Region, b: Box,
                            cfg: SolverConfig, margin: float) -> bool:
    extra = lin - level
    for i in range(b.n):
        w = (b.hi[i] - b.lo[i]) * Fraction(margin)
        for side in ("lo", "hi"):
            bounds = b.bounds()
            a, z = bounds[i]
            bounds[i] = (a, a + w) if side == "lo" else (z - w, z)
            strip = Box(bounds)
            report = check_nonempty(_with_constraint(S, extra), strip, cfg)
            if report.status != "empty_certified":
                return True
    return False


def _with_constraint(S: Region, g: Polynomial) -> Region:
    if S is None:
        return SemialgebraicSet([g], g.n)
    if isinstance(S, SemialgebraicSet):
        return SemialgebraicSet(list(S.constraints) + [g], S.n)
    # chains are materialized; this path only serves the boundedness report
    return SemialgebraicSet(list(S.explicit().constraints) + [g], S.n)


def fixed_point_residual(f: PolyMap) -> Polynomial:
    """``sum_i (f_i(x) - x_i)^2``."""
    if f.n != f.dim_out:
        raise DimensionError("fixed points need a self-map")
    n = f.n
    res = Polynomial.zero(n)
    for i, fi in enumerate(f.components):
        d = fi - Polynomial.variable(n, i)
        res = res + d * d
    return res


def find_fixed_point(f: PolyMap, S: Region, b: Box, cfg: SolverConfig | None = None) -> CertifiedBound:
    """Certified bounds on ``min ||f(x) - x||^2`` over ``S`` and ``b``.

    A fixed point is certified when ``value == 0`` at the witness.
    """
    return certified_min(fixed_point_residual(f), S, b, cfg)


def minimize_many(items: Sequence[tuple[Objective, Region]], b: Box, cfg: SolverConfig,
                  target: float | None = None) -> list[CertifiedBound]:
    """Independent ``certified_min`` calls, optionally on a thread pool."""
    if cfg.deterministic or len(items) <= 1:
        return [certified_min(p, S, b, cfg, target=target) for p, S in items]
    from concurrent.futures import ThreadPoolExecutor

    with ThreadPoolExecutor() as pool:
        return list(pool.map(lambda item: certified_min(item[0], item[1], b, cfg, target=target), items))
