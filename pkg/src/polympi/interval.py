"""Boxes, outward-rounded float intervals and polynomial range enclosures.

Everything here works on batches: ``lo`` and ``hi`` are arrays of shape
``(N, n)`` holding ``N`` boxes at once. Every float operation that can
round is pushed one ulp outward, and sums use a rigorous a-priori error
bound, so returned enclosures are sound.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

import numpy as np

from .poly import DimensionError, Polynomial, PolyMap

_INF = np.inf
_EPS = np.finfo(float).eps
_TINY = np.finfo(float).tiny


def down(x):
    return np.nextafter(x, -_INF)


def up(x):
    return np.nextafter(x, _INF)


def frac_down(q: Fraction) -> float:
    f = float(q)
    return f if Fraction(f) <= q else float(np.nextafter(f, -_INF))


def frac_up(q: Fraction) -> float:
    f = float(q)
    return f if Fraction(f) >= q else float(np.nextafter(f, _INF))


@dataclass(frozen=True)
class Interval:
    lo: float
    hi: float

    def __post_init__(self):
        if not self.lo <= self.hi:
            raise ValueError(f"empty interval [{self.lo}, {self.hi}]")

    def __contains__(self, value) -> bool:
        if isinstance(value, Fraction):
            return Fraction(self.lo) <= value <= Fraction(self.hi)
        return self.lo <= value <= self.hi

    @property
    def width(self) -> float:
        return self.hi - self.lo


class Box:
    """Axis-aligned box with exact rational endpoints."""

    __slots__ = ("lo", "hi")

    def __init__(self, bounds: Sequence[tuple]):
        lo = tuple(Fraction(a) if not isinstance(a, Fraction) else a for a, _ in bounds)
        hi = tuple(Fraction(b) if not isinstance(b, Fraction) else b for _, b in bounds)
        for a, b in zip(lo, hi):
            if a > b:
                raise ValueError(f"malformed box side [{a}, {b}]")
        self.lo = lo
        self.hi = hi

    @property
    def n(self) -> int:
        return len(self.lo)

    def __repr__(self) -> str:
        sides = ", ".join(f"[{a}, {b}]" for a, b in zip(self.lo, self.hi))
        return f"Box({sides})"

    def __eq__(self, other) -> bool:
        return isinstance(other, Box) and self.lo == other.lo and self.hi == other.hi

    def __hash__(self) -> int:
        return hash((self.lo, self.hi))

    def contains(self, x) -> bool:
        return all(a <= Fraction(v) <= b for a, v, b in zip(self.lo, x, self.hi))

    def bounds(self) -> list[tuple[Fraction, Fraction]]:
        return list(zip(self.lo, self.hi))

    def float_hull(self) -> tuple[np.ndarray, np.ndarray]:
        """Smallest float box containing this box."""
        return (np.array([frac_down(a) for a in self.lo]),
                np.array([frac_up(b) for b in self.hi]))

    def width(self) -> float:
        return float(max(b - a for a, b in zip(self.lo, self.hi)))

    def center(self) -> tuple[Fraction, ...]:
        return tuple((a + b) / 2 for a, b in zip(self.lo, self.hi))


# batched interval primitives (arrays of any matching shape)

def imul(alo, ahi, blo, bhi):
    p1, p2, p3, p4 = alo * blo, alo * bhi, ahi * blo, ahi * bhi
    lo = np.minimum(np.minimum(p1, p2), np.minimum(p3, p4))
    hi = np.maximum(np.maximum(p1, p2), np.maximum(p3, p4))
    # 0 * inf style NaNs cannot occur with finite inputs
    return down(lo), up(hi)


def iadd(alo, ahi, blo, bhi):
    return down(alo + blo), up(ahi + bhi)


def _pow_nonneg(a, e, direction):
    r = np.ones_like(a)
    for _ in range(e):
        r = direction(r * a)
    return r


def ipow(lo, hi, e: int):
    """Tight enclosure of ``x**e`` over ``[lo, hi]``."""
    if e == 0:
        return np.ones_like(lo), np.ones_like(hi)
    if e == 1:
        return lo, hi
    if e % 2 == 0:
        mig = np.where(lo > 0, lo, np.where(hi < 0, -hi, 0.0))
        mag = np.maximum(np.abs(lo), np.abs(hi))
        return _pow_nonneg(mig, e, down), _pow_nonneg(mag, e, up)
    plo = np.where(lo >= 0, _pow_nonneg(np.abs(lo), e, down), -_pow_nonneg(np.abs(lo), e, up))
    phi = np.where(hi >= 0, _pow_nonneg(np.abs(hi), e, up), -_pow_nonneg(np.abs(hi), e, down))
    return plo, phi


def _rigorous_sum(lo_terms, hi_terms, axis=0):
    """Outward enclosure of sums along ``axis``.

    Recursive summation of k floats errs by at most (k-1)*u*sum|x_i|; the
    factor 2 margin absorbs the rounding in forming the bound itself.
    """
    k = lo_terms.shape[axis]
    slo = np.sum(lo_terms, axis=axis)
    shi = np.sum(hi_terms, axis=axis)
    if k <= 1:
        return slo, shi
    elo = 2 * k * _EPS * np.sum(np.abs(lo_terms), axis=axis) + k * _TINY
    ehi = 2 * k * _EPS * np.sum(np.abs(hi_terms), axis=axis) + k * _TINY
    return down(slo - elo), up(shi + ehi)


class CompiledPolynomial:
    """Float-interval image of an exact polynomial for batched enclosure."""

    def __init__(self, p: Polynomial, with_gradient: bool = True):
        self.poly = p
        self.n = p.n
        items = p.sorted_terms()
        self.exps = np.array([m for m, _ in items], dtype=np.int64).reshape(len(items), p.n)
        self.clo = np.array([frac_down(c) for _, c in items], dtype=float)
        self.chi = np.array([frac_up(c) for _, c in items], dtype=float)
        self.maxdeg = int(self.exps.max()) if len(items) else 0
        self.grad = [CompiledPolynomial(d, with_gradient=False) for d in p.gradient()] if with_gradient else None
        # float coefficients for fast approximate evaluation
        self.cf = np.array([float(c) for _, c in items], dtype=float)

    def natural(self, powers, N: int):
        """Natural interval extension using a shared power table."""
        T = len(self.clo)
        if T == 0:
            z = np.zeros(N)
            return z, z.copy()
        tlo = np.broadcast_to(self.clo[:, None], (T, N))
        thi = np.broadcast_to(self.chi[:, None], (T, N))
        for v in range(self.n):
            ev = self.exps[:, v]
            if not ev.any():
                continue
            plo, phi = powers[v]
            tlo, thi = imul(tlo, thi, plo[ev], phi[ev])
        return _rigorous_sum(tlo, thi)

    def approx(self, x: np.ndarray) -> np.ndarray:
        """Plain float values at points ``x`` of shape (N, n)."""
        if len(self.cf) == 0:
            return np.zeros(x.shape[0])
        mono = np.ones((len(self.cf), x.shape[0]))
        for v in range(self.n):
            ev = self.exps[:, v]
            if ev.any():
                mono = mono * x[None, :, v] ** ev[:, None]
        return self.cf @ mono


def power_table(lo: np.ndarray, hi: np.ndarray, maxdeg: int):
    """Per variable, interval powers 0..maxdeg: list of (lo[e, N], hi[e, N])."""
    table = []
    for v in range(lo.shape[1]):
        los = np.empty((maxdeg + 1, lo.shape[0]))
        his = np.empty_like(los)
        for e in range(maxdeg + 1):
            los[e], his[e] = ipow(lo[:, v], hi[:, v], e)
        table.append((los, his))
    return table


def mean_value_slack(glo, ghi, rad):
    """Upper bound of ``sum_v |grad_v| * rad_v``; ``glo`` has shape (n, N)."""
    mag = np.maximum(np.abs(glo), np.abs(ghi))
    slack = np.zeros(rad.shape[0])
    for v in range(rad.shape[1]):
        slack = up(slack + up(mag[v] * rad[:, v]))
    return slack


@dataclass
class EnclosureParts:
    """Bounds of P functions over N boxes in R^n.

    ``lo``/``hi`` (P, N) enclose the range, ``center_*`` (P, N) the value
    at the box center, ``grad_*`` (P, n, N) the gradient over the box.
    """

    lo: np.ndarray
    hi: np.ndarray
    center_lo: np.ndarray
    center_hi: np.ndarray
    grad_lo: np.ndarray
    grad_hi: np.ndarray

    @classmethod
    def empty(cls, P: int, n: int, N: int) -> "EnclosureParts":
        return cls(np.empty((P, N)), np.empty((P, N)), np.empty((P, N)), np.empty((P, N)),
                   np.empty((P, n, N)), np.empty((P, n, N)))

    def select(self, rows) -> "EnclosureParts":
        return EnclosureParts(self.lo[rows], self.hi[rows], self.center_lo[rows], self.center_hi[rows],
                              self.grad_lo[rows], self.grad_hi[rows])

    @classmethod
    def concat(cls, items: Sequence["EnclosureParts"]) -> "EnclosureParts":
        return cls(*(np.concatenate([getattr(it, name) for it in items], axis=0)
                     for name in ("lo", "hi", "center_lo", "center_hi", "grad_lo", "grad_hi")))


class PolyEnclosure:
    """Batched enclosure of several polynomials over many boxes.

    Each bound is the intersection of the natural extension with the
    mean-value form around the box center, so over-estimation shrinks
    quadratically with the box width.
    """

    def __init__(self, polys: Sequence[Polynomial]):
        self.polys = list(polys)
        self.compiled = [CompiledPolynomial(p) for p in self.polys]
        self.maxdeg = max([c.maxdeg for c in self.compiled] + [1])

    def __len__(self) -> int:
        return len(self.compiled)

    def parts(self, lo: np.ndarray, hi: np.ndarray) -> "EnclosureParts":
        """Range bounds plus the center value and gradient enclosures."""
        N, n = lo.shape
        P = len(self.compiled)
        parts = EnclosureParts.empty(P, n, N)
        if P == 0:
            return parts
        mid = (lo + hi) / 2  # exact for floats away from overflow
        rad = up(np.maximum(hi - mid, mid - lo))
        box_pw = power_table(lo, hi, self.maxdeg)
        mid_pw = power_table(mid, mid, self.maxdeg)
        for j, cp in enumerate(self.compiled):
            nlo, nhi = cp.natural(box_pw, N)
            clo, chi = cp.natural(mid_pw, N)
            parts.center_lo[j], parts.center_hi[j] = clo, chi
            for v, g in enumerate(cp.grad):
                parts.grad_lo[j, v], parts.grad_hi[j, v] = g.natural(box_pw, N)
            slack = mean_value_slack(parts.grad_lo[j], parts.grad_hi[j], rad)
            parts.lo[j] = np.maximum(nlo, down(clo - slack))
            parts.hi[j] = np.minimum(nhi, up(chi + slack))
        return parts

    def bounds(self, lo: np.ndarray, hi: np.ndarray):
        p = self.parts(lo, hi)
        return p.lo, p.hi

    def approx(self, x: np.ndarray) -> np.ndarray:
        return np.array([c.approx(x) for c in self.compiled]).reshape(len(self.compiled), x.shape[0])


def _exact_power(lo: Fraction, hi: Fraction, e: int) -> tuple[Fraction, Fraction]:
    if e == 0:
        return Fraction(1), Fraction(1)
    a, b = lo ** e, hi ** e
    if e % 2 == 0 and lo < 0 < hi:
        return Fraction(0), max(a, b)
    return min(a, b), max(a, b)


def exact_range(p: Polynomial, lo: Sequence[Fraction], hi: Sequence[Fraction]) -> tuple[Fraction, Fraction]:
    """Natural interval extension in rational arithmetic, no rounding.

    Slow; meant for the few boxes where float rounding alone decides a sign.
    """
    tot_lo = tot_hi = Fraction(0)
    for mono, c in p.items():
        mlo = mhi = Fraction(1)
        for i, e in enumerate(mono):
            if e:
                plo, phi = _exact_power(lo[i], hi[i], e)
                cands = (mlo * plo, mlo * phi, mhi * plo, mhi * phi)
                mlo, mhi = min(cands), max(cands)
        if c >= 0:
            tot_lo += c * mlo
            tot_hi += c * mhi
        else:
            tot_lo += c * mhi
            tot_hi += c * mlo
    return tot_lo, tot_hi


def enclose_range(p: Polynomial, b: Box) -> Interval:
    """Sound enclosure of ``{p(x) : x in b}``."""
    if p.n != b.n:
        raise DimensionError(f"polynomial in {p.n} variables, box of dimension {b.n}")
    lo, hi = b.float_hull()
    elo, ehi = PolyEnclosure([p]).bounds(lo[None, :], hi[None, :])
    return Interval(float(elo[0, 0]), float(ehi[0, 0]))


class ChainEnclosure:
    """Enclosures of ``phi0_i(f^j(x))`` without composing polynomials.

    The image of a box under ``f^j`` is carried as a natural-extension
    range together with a first-order form (value at the center plus the
    interval Jacobian of ``f^j`` over the box, built by the chain rule),
    and the two are intersected at every step.
    """

    def __init__(self, phi0: PolyMap, f: PolyMap):
        self.phi0 = phi0
        self.f = f
        self.n = f.n
        self.f_enc = [CompiledPolynomial(c) for c in f.components]
        self.phi_enc = [CompiledPolynomial(c) for c in phi0.components]
        self.maxdeg = max([c.maxdeg for c in self.f_enc + self.phi_enc] + [1])

    def parts(self, lo: np.ndarray, hi: np.ndarray, depth: int) -> EnclosureParts:
        """Parts for every ``phi0_i o f^j``, j = 0..depth, flattened j-major.

        Row ``j * m + i`` holds ``phi0_i o f^j``.
        """
        N, n = lo.shape
        m = len(self.phi_enc)
        out = EnclosureParts.empty((depth + 1) * m, n, N)
        mid = (lo + hi) / 2
        rad = up(np.maximum(hi - mid, mid - lo))
        # range of f^j over the box, its value enclosure at the center, and
        # the interval Jacobian d f^j / dx over the box (shape n x n x N)
        rlo, rhi = lo.copy(), hi.copy()
        clo, chi = mid.copy(), mid.copy()
        jlo = np.zeros((n, n, N))
        jhi = np.zeros((n, n, N))
        for i in range(n):
            jlo[i, i] = 1.0
            jhi[i, i] = 1.0
        for j in range(depth + 1):
            rpw = power_table(rlo, rhi, self.maxdeg)
            cpw = power_table(clo, chi, self.maxdeg)
            for i, cp in enumerate(self.phi_enc):
                self._first_order(cp, rpw, cpw, jlo, jhi, rad, N, out, j * m + i)
            if j == depth:
                break
            fp = EnclosureParts.empty(n, n, N)
            for i, cp in enumerate(self.f_enc):
                self._first_order(cp, rpw, cpw, jlo, jhi, rad, N, fp, i)
            rlo, rhi = fp.lo.T.copy(), fp.hi.T.copy()
            clo, chi = fp.center_lo.T.copy(), fp.center_hi.T.copy()
            jlo, jhi = fp.grad_lo, fp.grad_hi
        return out

    def bounds(self, lo: np.ndarray, hi: np.ndarray, depth: int):
        """Range bounds with shape ``(depth + 1, m, N)``."""
        p = self.parts(lo, hi, depth)
        m = len(self.phi_enc)
        N = lo.shape[0]
        return p.lo.reshape(depth + 1, m, N), p.hi.reshape(depth + 1, m, N)

    @staticmethod
    def _first_order(cp: CompiledPolynomial, rpw, cpw, jlo, jhi, rad, N, out: EnclosureParts, row: int):
        """Enclose ``g o h`` given range/center/Jacobian data of ``h``."""
        n = jlo.shape[0]
        nlo, nhi = cp.natural(rpw, N)
        vlo, vhi = cp.natural(cpw, N)
        grads = [g.natural(rpw, N) for g in cp.grad]
        for col in range(n):
            tl = []
            th = []
            for k in range(n):
                a, b = imul(grads[k][0], grads[k][1], jlo[k, col], jhi[k, col])
                tl.append(a)
                th.append(b)
            out.grad_lo[row, col], out.grad_hi[row, col] = _rigorous_sum(np.array(tl), np.array(th))
        slack = mean_value_slack(out.grad_lo[row], out.grad_hi[row], rad)
        out.center_lo[row], out.center_hi[row] = vlo, vhi
        out.lo[row] = np.maximum(nlo, down(vlo - slack))
        out.hi[row] = np.minimum(nhi, up(vhi + slack))
