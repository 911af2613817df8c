from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from fcw.exact import (
    Poly,
    RationalFunction,
    format_rf,
    from_partial_fractions,
    laurent_expand,
    parse_rf,
    partial_fractions,
    rational_roots,
    reduce_ratfunc,
    valuation_at,
)

x = RationalFunction.x()


def P(*cs):
    return Poly(list(cs))


def fval(f, t):
    """Evaluate with Fractions only: an oracle independent of the mpq code."""
    num = sum(Fraction(str(c)) * Fraction(t) ** i for i, c in enumerate(f.num.cs))
    den = sum(Fraction(str(c)) * Fraction(t) ** i for i, c in enumerate(f.den.cs))
    return num / den


# --- examples ---------------------------------------------------------------

def test_reduce_common_factor():
    assert reduce_ratfunc(P(-1, 0, 1), P(-1, 1)) == RationalFunction(P(1, 1))


def test_reduce_zero():
    f = reduce_ratfunc(P(), P(0, 0, 0, 1))
    assert not f and f.den == P(1)


def test_reduce_scales_to_monic():
    f = reduce_ratfunc(P(0, 2), P(4))
    assert f.den == P(1)
    assert f.num == P(0, Fraction(1, 2))


def test_reduce_zero_denominator():
    with pytest.raises(ZeroDivisionError):
        reduce_ratfunc(P(1), P())


def test_valuations():
    assert valuation_at(RationalFunction(P(1)), 0) == 0
    assert valuation_at(x ** 3, 0) == 3
    assert valuation_at((x + 1) / (x - 1) ** 2, 1) == -2


def test_valuation_of_zero_rejected():
    with pytest.raises(ValueError):
        valuation_at(RationalFunction(P()), 0)


def test_laurent_examples():
    assert laurent_expand((1 - x).inverse(), 0, 3) == (0, [1, 1, 1])
    assert laurent_expand(x, 0, 2) == (1, [1, 0])
    assert laurent_expand(x.inverse(), 0, 1) == (-1, [1])


def test_partial_fractions_examples():
    poly, pf = partial_fractions((x * (x - 1)).inverse(), [0, 1])
    assert not poly
    assert pf == {(0, 1): -1, (1, 1): 1}
    poly, pf = partial_fractions(x ** 2, [])
    assert poly == P(0, 0, 1) and not pf
    poly, pf = partial_fractions((x ** 2).inverse(), [0])
    assert pf == {(0, 2): 1}


def test_partial_fractions_names_missing_pole():
    with pytest.raises(ValueError, match="3"):
        partial_fractions((x - 3).inverse(), [0])


def test_rational_roots():
    assert rational_roots(P(-2, 1) * P(1, 3) * P(1, 0, 1)) == [Fraction(-1, 3), 2]


def test_format_and_parse_round_trip():
    f = (x ** 2 - 2) / (x * (x - 1) ** 2)
    assert format_rf(f) == "(x^2 - 2)/(x*(x - 1)^2)"
    assert parse_rf(format_rf(f)) == f


# --- properties -------------------------------------------------------------

small = st.integers(-4, 4)
polys = st.lists(small, min_size=1, max_size=4).map(lambda cs: Poly(cs))
nonzero_polys = polys.filter(bool)
ratfuncs = st.tuples(polys, nonzero_polys).map(lambda t: RationalFunction(*t))
nonzero_rf = ratfuncs.filter(bool)
points = st.integers(-6, 6)


def defined(fs, t):
    return all(f.den(t) != 0 for f in fs)


@settings(max_examples=60, deadline=None)
@given(ratfuncs, ratfuncs, ratfuncs, points)
def test_field_axioms_by_evaluation(f, g, h, t):
    assert (f + g) + h == f + (g + h)
    assert (f * g) * h == f * (g * h)
    assert f * (g + h) == f * g + f * h
    if defined([f, g, h], t):
        assert fval(f * g + h, t) == fval(f, t) * fval(g, t) + fval(h, t)


@settings(max_examples=60, deadline=None)
@given(nonzero_rf)
def test_inverse(f):
    assert f * f.inverse() == RationalFunction(P(1))


@settings(max_examples=60, deadline=None)
@given(nonzero_rf, nonzero_rf, points)
def test_valuation_additive(f, g, lam):
    assert valuation_at(f * g, lam) == valuation_at(f, lam) + valuation_at(g, lam)


@settings(max_examples=60, deadline=None)
@given(nonzero_rf, points)
def test_valuation_of_derivative(f, lam):
    k = valuation_at(f, lam)
    if k != 0:
        assert valuation_at(f.derivative(), lam) == k - 1


@settings(max_examples=60, deadline=None)
@given(ratfuncs)
def test_partial_fraction_round_trip(f):
    poles = rational_roots(f.den)
    if f.den.degree != sum(f.den.valuation_at(l) for l in poles):
        return  # irreducible quadratic factors are outside the domain
    poly, pf = partial_fractions(f, poles)
    assert from_partial_fractions(poly, pf) == f


@settings(max_examples=40, deadline=None)
@given(nonzero_rf, points)
def test_laurent_resums(f, lam):
    k, cs = laurent_expand(f, lam, 4)
    approx = sum((RationalFunction(P(-lam, 1)) ** (k + i) * c for i, c in enumerate(cs)), RationalFunction(P()))
    rest = f - approx
    assert not rest or valuation_at(rest, lam) >= k + 4
