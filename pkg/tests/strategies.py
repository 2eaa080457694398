"""Hypothesis strategies for exact polynomials and points."""

from fractions import Fraction

from hypothesis import strategies as st

from polympi.poly import Polynomial, PolyMap

small_fractions = st.fractions(min_value=-3, max_value=3, max_denominator=12)


def monomials(n: int, max_deg: int):
    return st.lists(st.integers(0, max_deg), min_size=n, max_size=n).filter(
        lambda m: sum(m) <= max_deg).map(tuple)


def polynomials(n: int = 2, max_deg: int = 3, max_terms: int = 5):
    return st.dictionaries(monomials(n, max_deg), small_fractions, max_size=max_terms).map(
        lambda d: Polynomial(n, d))


def polymaps(n: int = 2, dim_out: int = 2, max_deg: int = 2):
    return st.lists(polynomials(n, max_deg, 4), min_size=dim_out, max_size=dim_out).map(
        lambda cs: PolyMap(cs, n))


def points(n: int = 2):
    return st.lists(st.fractions(min_value=-2, max_value=2, max_denominator=50), min_size=n, max_size=n).map(
        lambda v: tuple(Fraction(c) for c in v))
