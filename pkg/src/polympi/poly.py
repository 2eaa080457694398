"""Sparse multivariate polynomials with exact rational coefficients.

Terms are stored as ``{exponent tuple: Fraction}`` with zero coefficients
never kept, so two equal polynomials always carry identical term maps.
Printing uses graded lexicographic order (highest degree first).
"""

from __future__ import annotations

import re
from fractions import Fraction
from math import lcm
from numbers import Rational
from typing import Iterable, Iterator, Mapping, Sequence

Monomial = tuple[int, ...]
Point = Sequence[Fraction]


class DimensionError(ValueError):
    """Raised when ambient dimensions of operands disagree."""


class PolynomialSyntaxError(ValueError):
    """Malformed polynomial text; ``column`` is 1-based."""

    def __init__(self, message: str, text: str, column: int):
        super().__init__(f"{message} at column {column}: {text!r}")
        self.text = text
        self.column = column


def _as_fraction(value) -> Fraction:
    if isinstance(value, Fraction):
        return value
    if isinstance(value, (int, Rational)):
        return Fraction(value)
    if isinstance(value, float):
        return Fraction(value)
    if isinstance(value, str):
        return Fraction(value)
    raise TypeError(f"cannot use {type(value).__name__} as an exact coefficient")


def grlex_key(monomial: Monomial) -> tuple:
    return (sum(monomial), monomial)


class Polynomial:
    """Immutable polynomial in ``n`` variables ``x1..xn``."""

    __slots__ = ("n", "_terms", "_hash", "_int_form")

    def __init__(self, n: int, terms: Mapping[Monomial, object] | None = None):
        if n < 0:
            raise ValueError("dimension must be nonnegative")
        self.n = n
        clean: dict[Monomial, Fraction] = {}
        for mono, coef in (terms or {}).items():
            mono = tuple(int(e) for e in mono)
            if len(mono) != n:
                raise DimensionError(f"monomial {mono} has length {len(mono)}, expected {n}")
            if any(e < 0 for e in mono):
                raise ValueError(f"negative exponent in {mono}")
            c = _as_fraction(coef)
            if c:
                clean[mono] = clean.get(mono, Fraction(0)) + c
                if not clean[mono]:
                    del clean[mono]
        self._terms = clean
        self._hash = None
        self._int_form = None

    @classmethod
    def _raw(cls, n: int, terms: dict[Monomial, Fraction]) -> Polynomial:
        # caller guarantees canonical form (no zeros, right lengths)
        p = cls.__new__(cls)
        p.n = n
        p._terms = terms
        p._hash = None
        p._int_form = None
        return p

    # constructors

    @classmethod
    def zero(cls, n: int) -> Polynomial:
        return cls._raw(n, {})

    @classmethod
    def constant(cls, n: int, value) -> Polynomial:
        c = _as_fraction(value)
        return cls._raw(n, {(0,) * n: c} if c else {})

    @classmethod
    def variable(cls, n: int, index: int) -> Polynomial:
        """The coordinate ``x_{index+1}`` (0-based ``index``)."""
        if not 0 <= index < n:
            raise DimensionError(f"variable index {index} out of range for n={n}")
        mono = tuple(1 if i == index else 0 for i in range(n))
        return cls._raw(n, {mono: Fraction(1)})

    @classmethod
    def parse(cls, text: str, n: int) -> Polynomial:
        return _Parser(text, n).parse()

    # structure

    @property
    def terms(self) -> Mapping[Monomial, Fraction]:
        return dict(self._terms)

    def items(self) -> Iterator[tuple[Monomial, Fraction]]:
        return iter(self._terms.items())

    def __len__(self) -> int:
        return len(self._terms)

    def is_zero(self) -> bool:
        return not self._terms

    def degree(self) -> int:
        """Total degree; the zero polynomial has degree -1."""
        return max((sum(m) for m in self._terms), default=-1)

    def constant_term(self) -> Fraction:
        return self._terms.get((0,) * self.n, Fraction(0))

    def is_constant(self) -> bool:
        return self.degree() <= 0

    def sorted_terms(self) -> list[tuple[Monomial, Fraction]]:
        return sorted(self._terms.items(), key=lambda t: grlex_key(t[0]), reverse=True)

    # arithmetic

    def _check(self, other: Polynomial) -> None:
        if other.n != self.n:
            raise DimensionError(f"dimension mismatch: {self.n} vs {other.n}")

    def _coerce(self, other) -> Polynomial:
        if isinstance(other, Polynomial):
            self._check(other)
            return other
        return Polynomial.constant(self.n, other)

    def __add__(self, other) -> Polynomial:
        other = self._coerce(other)
        out = dict(self._terms)
        for mono, c in other._terms.items():
            v = out.get(mono, 0) + c
            if v:
                out[mono] = v
            else:
                out.pop(mono, None)
        return Polynomial._raw(self.n, out)

    __radd__ = __add__

    def __neg__(self) -> Polynomial:
        return Polynomial._raw(self.n, {m: -c for m, c in self._terms.items()})

    def __sub__(self, other) -> Polynomial:
        return self + (-self._coerce(other))

    def __rsub__(self, other) -> Polynomial:
        return self._coerce(other) - self

    def __mul__(self, other) -> Polynomial:
        if not isinstance(other, Polynomial):
            c = _as_fraction(other)
            if not c:
                return Polynomial.zero(self.n)
            return Polynomial._raw(self.n, {m: v * c for m, v in self._terms.items()})
        self._check(other)
        out: dict[Monomial, Fraction] = {}
        for m1, c1 in self._terms.items():
            for m2, c2 in other._terms.items():
                mono = tuple(a + b for a, b in zip(m1, m2))
                out[mono] = out.get(mono, 0) + c1 * c2
        return Polynomial._raw(self.n, {m: c for m, c in out.items() if c})

    __rmul__ = __mul__

    def __truediv__(self, other) -> Polynomial:
        c = _as_fraction(other)
        if not c:
            raise ZeroDivisionError("polynomial division by zero")
        return self * (1 / c)

    def __pow__(self, k: int) -> Polynomial:
        if not isinstance(k, int) or k < 0:
            raise ValueError("exponent must be a nonnegative integer")
        result = Polynomial.constant(self.n, 1)
        base = self
        while k:
            if k & 1:
                result = result * base
            k >>= 1
            if k:
                base = base * base
        return result

    def __eq__(self, other) -> bool:
        if isinstance(other, Polynomial):
            return self.n == other.n and self._terms == other._terms
        if isinstance(other, (int, Fraction)):
            return self == Polynomial.constant(self.n, other)
        return NotImplemented

    def __hash__(self) -> int:
        if self._hash is None:
            self._hash = hash((self.n, frozenset(self._terms.items())))
        return self._hash

    def derivative(self, index: int) -> Polynomial:
        out: dict[Monomial, Fraction] = {}
        for mono, c in self._terms.items():
            e = mono[index]
            if e:
                m = list(mono)
                m[index] = e - 1
                out[tuple(m)] = c * e
        return Polynomial._raw(self.n, out)

    def gradient(self) -> list[Polynomial]:
        return [self.derivative(i) for i in range(self.n)]

    # evaluation

    def _integer_form(self):
        """Coefficients scaled to integers: ``self = (1/L) * sum(c * x^a)``."""
        if self._int_form is None:
            L = lcm(*(c.denominator for c in self._terms.values())) if self._terms else 1
            ints = [(m, int(c * L)) for m, c in self._terms.items()]
            self._int_form = (L, ints, self.degree())
        return self._int_form

    def evaluate(self, x: Point) -> Fraction:
        """Exact value at a rational point."""
        if len(x) != self.n:
            raise DimensionError(f"point has dimension {len(x)}, polynomial has {self.n}")
        if not self._terms:
            return Fraction(0)
        xs = [_as_fraction(v) for v in x]
        D = lcm(*(v.denominator for v in xs)) if xs else 1
        nums = [v.numerator * (D // v.denominator) for v in xs]
        return Fraction(*self._eval_scaled(nums, D))

    def _eval_scaled(self, nums: Sequence[int], D: int) -> tuple[int, int]:
        """Value at ``nums/D`` as an unreduced (numerator, denominator) pair."""
        L, ints, deg = self._integer_form()
        powers = _power_table(nums, D, ints, deg)
        total = 0
        for mono, c in ints:
            t = c
            for i, e in enumerate(mono):
                if e:
                    t *= powers[0][i][e]
            total += t * powers[1][deg - sum(mono)]
        return total, L * D**deg if deg > 0 else L

    def sign_at(self, x: Point) -> int:
        """Sign (-1, 0, 1) of the exact value at ``x``."""
        v = self.evaluate(x)
        return (v > 0) - (v < 0)

    def __call__(self, *x) -> Fraction:
        if len(x) == 1 and isinstance(x[0], (list, tuple)):
            x = x[0]
        return self.evaluate(x)

    def evaluate_float(self, x: Sequence[float]) -> float:
        total = 0.0
        for mono, c in self._terms.items():
            t = float(c)
            for v, e in zip(x, mono):
                if e:
                    t *= v**e
            total += t
        return total

    def compose(self, g: PolyMap) -> Polynomial:
        """The polynomial ``x -> self(g(x))``."""
        if g.dim_out != self.n:
            raise DimensionError(f"cannot compose: polynomial in {self.n} variables with a map to R^{g.dim_out}")
        n_new = g.n
        result = Polynomial.zero(n_new)
        if not self._terms:
            return result
        maxdeg = [max((m[i] for m in self._terms), default=0) for i in range(self.n)]
        powers: list[list[Polynomial]] = []
        for i, comp in enumerate(g.components):
            seq = [Polynomial.constant(n_new, 1)]
            for _ in range(maxdeg[i]):
                seq.append(seq[-1] * comp)
            powers.append(seq)
        acc: dict[Monomial, Fraction] = {}
        for mono, c in self._terms.items():
            t = Polynomial.constant(n_new, c)
            for i, e in enumerate(mono):
                if e:
                    t = t * powers[i][e]
            for m, v in t._terms.items():
                acc[m] = acc.get(m, 0) + v
        return Polynomial._raw(n_new, {m: v for m, v in acc.items() if v})

    # text

    def __str__(self) -> str:
        return format_polynomial(self)

    def __repr__(self) -> str:
        return f"Polynomial({self.n}, {str(self)!r})"


def _power_table(nums, D, ints, deg):
    n = len(nums)
    maxe = [0] * n
    for mono, _ in ints:
        for i, e in enumerate(mono):
            if e > maxe[i]:
                maxe[i] = e
    xp = []
    for i in range(n):
        seq = [1]
        for _ in range(maxe[i]):
            seq.append(seq[-1] * nums[i])
        xp.append(seq)
    dp = [1]
    for _ in range(max(deg, 0)):
        dp.append(dp[-1] * D)
    return xp, dp


def format_polynomial(p: Polynomial) -> str:
    if p.is_zero():
        return "0"
    parts: list[str] = []
    for mono, c in p.sorted_terms():
        factors = [f"x{i + 1}" + (f"^{e}" if e > 1 else "") for i, e in enumerate(mono) if e]
        mag = abs(c)
        if factors:
            body = "*".join(factors)
            if mag != 1:
                body = f"{_fmt_fraction(mag)}*{body}"
        else:
            body = _fmt_fraction(mag)
        if not parts:
            parts.append(("-" if c < 0 else "") + body)
        else:
            parts.append(("- " if c < 0 else "+ ") + body)
    return " ".join(parts)


def _fmt_fraction(q: Fraction) -> str:
    return str(q.numerator) if q.denominator == 1 else f"{q.numerator}/{q.denominator}"


class PolyMap:
    """A vector of polynomials sharing the input dimension ``n``."""

    __slots__ = ("n", "components")

    def __init__(self, components: Iterable[Polynomial], n: int | None = None):
        comps = tuple(components)
        if n is None:
            if not comps:
                raise ValueError("cannot infer the dimension of an empty map")
            n = comps[0].n
        for c in comps:
            if c.n != n:
                raise DimensionError(f"component in {c.n} variables, map declared on R^{n}")
        self.n = n
        self.components = comps

    @classmethod
    def identity(cls, n: int) -> PolyMap:
        return cls([Polynomial.variable(n, i) for i in range(n)], n)

    @classmethod
    def parse(cls, texts: Sequence[str], n: int) -> PolyMap:
        return cls([Polynomial.parse(t, n) for t in texts], n)

    @property
    def dim_out(self) -> int:
        return len(self.components)

    def __len__(self) -> int:
        return len(self.components)

    def __iter__(self) -> Iterator[Polynomial]:
        return iter(self.components)

    def __getitem__(self, i):
        return self.components[i]

    def __eq__(self, other) -> bool:
        return isinstance(other, PolyMap) and self.n == other.n and self.components == other.components

    def __hash__(self) -> int:
        return hash((self.n, self.components))

    def __repr__(self) -> str:
        return f"PolyMap({[str(c) for c in self.components]})"

    def degree(self) -> int:
        return max((c.degree() for c in self.components), default=-1)

    def evaluate(self, x: Point) -> tuple[Fraction, ...]:
        if len(x) != self.n:
            raise DimensionError(f"point has dimension {len(x)}, map is on R^{self.n}")
        xs = [_as_fraction(v) for v in x]
        D = lcm(*(v.denominator for v in xs)) if xs else 1
        nums = [v.numerator * (D // v.denominator) for v in xs]
        return tuple(Fraction(*c._eval_scaled(nums, D)) if not c.is_zero() else Fraction(0)
                     for c in self.components)

    def compose(self, g: PolyMap) -> PolyMap:
        """The map ``x -> self(g(x))``."""
        return PolyMap([c.compose(g) for c in self.components], g.n)

    def stack(self, other: PolyMap) -> PolyMap:
        if other.n != self.n:
            raise DimensionError(f"dimension mismatch: {self.n} vs {other.n}")
        return PolyMap(self.components + other.components, self.n)

    def to_strings(self) -> list[str]:
        return [str(c) for c in self.components]


def evaluate(p: Polynomial, x: Point) -> Fraction:
    return p.evaluate(x)


def evaluate_map(g: PolyMap, x: Point) -> tuple[Fraction, ...]:
    return g.evaluate(x)


def compose(p: Polynomial, g: PolyMap) -> Polynomial:
    return p.compose(g)


def iterate_map(f: PolyMap, k: int) -> PolyMap:
    """The k-th functional power of ``f``; ``k = 0`` gives the identity."""
    if f.dim_out != f.n:
        raise DimensionError(f"iterating requires a self-map, got R^{f.n} -> R^{f.dim_out}")
    if k < 0:
        raise ValueError("k must be nonnegative")
    result = PolyMap.identity(f.n)
    for _ in range(k):
        result = f.compose(result)
    return result


def orbit(f: PolyMap, x: Point, steps: int) -> list[tuple[Fraction, ...]]:
    """``[x, f(x), ..., f^steps(x)]`` by repeated exact evaluation."""
    pts = [tuple(_as_fraction(v) for v in x)]
    for _ in range(steps):
        pts.append(f.evaluate(pts[-1]))
    return pts


# parsing

_TOKEN = re.compile(r"\s*(?:(?P<num>\d+(?:\.\d*)?|\.\d+)|(?P<var>x(?P<idx>\d+))|(?P<op>[-+*/^()]))")


class _Parser:
    def __init__(self, text: str, n: int):
        self.text = text
        self.n = n
        self.tokens: list[tuple[str, str, int]] = []
        pos = 0
        stripped = text.rstrip()
        while pos < len(stripped):
            m = _TOKEN.match(stripped, pos)
            if not m:
                col = pos + 1 + (len(stripped[pos:]) - len(stripped[pos:].lstrip()))
                raise PolynomialSyntaxError("unexpected character", text, col)
            col = m.start(m.lastgroup) + 1
            if m.group("num") is not None:
                self.tokens.append(("num", m.group("num"), col))
            elif m.group("var") is not None:
                self.tokens.append(("var", m.group("idx"), col))
            else:
                self.tokens.append(("op", m.group("op"), col))
            pos = m.end()
        self.i = 0

    def _peek(self):
        return self.tokens[self.i] if self.i < len(self.tokens) else None

    def _next(self):
        tok = self._peek()
        if tok is None:
            raise PolynomialSyntaxError("unexpected end of input", self.text, len(self.text) + 1)
        self.i += 1
        return tok

    def parse(self) -> Polynomial:
        if not self.tokens:
            raise PolynomialSyntaxError("empty polynomial", self.text, 1)
        p = self._expr()
        tok = self._peek()
        if tok is not None:
            raise PolynomialSyntaxError(f"unexpected {tok[1]!r}", self.text, tok[2])
        return p

    def _expr(self) -> Polynomial:
        tok = self._peek()
        if tok and tok[0] == "op" and tok[1] in "+-":
            self._next()
            p = self._term()
            if tok[1] == "-":
                p = -p
        else:
            p = self._term()
        while (tok := self._peek()) and tok[0] == "op" and tok[1] in "+-":
            self._next()
            q = self._term()
            p = p + q if tok[1] == "+" else p - q
        return p

    def _term(self) -> Polynomial:
        p = self._power()
        while (tok := self._peek()) and tok[0] == "op" and tok[1] in "*/":
            self._next()
            q = self._power()
            if tok[1] == "*":
                p = p * q
            else:
                if not q.is_constant():
                    raise PolynomialSyntaxError("division by a non-constant", self.text, tok[2])
                c = q.constant_term()
                if not c:
                    raise PolynomialSyntaxError("division by zero", self.text, tok[2])
                p = p / c
        return p

    def _power(self) -> Polynomial:
        base = self._atom()
        tok = self._peek()
        if tok and tok[0] == "op" and tok[1] == "^":
            self._next()
            etok = self._next()
            if etok[0] != "num" or not etok[1].isdigit():
                raise PolynomialSyntaxError("exponent must be a nonnegative integer", self.text, etok[2])
            base = base ** int(etok[1])
        return base

    def _atom(self) -> Polynomial:
        kind, val, col = self._next()
        if kind == "num":
            return Polynomial.constant(self.n, Fraction(val))
        if kind == "var":
            idx = int(val)
            if not 1 <= idx <= self.n:
                raise DimensionError(f"variable x{idx} out of range for n={self.n} at column {col}: {self.text!r}")
            return Polynomial.variable(self.n, idx - 1)
        if val == "(":
            p = self._expr()
            kind2, val2, col2 = self._next()
            if val2 != ")":
                raise PolynomialSyntaxError("expected ')'", self.text, col2)
            return p
        if val == "-":
            return -self._power()
        raise PolynomialSyntaxError(f"unexpected {val!r}", self.text, col)
