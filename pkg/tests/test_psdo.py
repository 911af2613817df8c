import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from fcw.exact import RationalFunction
from fcw.odo import DiffOp
from fcw.psdo import (
    InsufficientDepth,
    PsDO,
    centralizer_order_zero,
    express_in_powers,
    expand_rational_in_inverse_derivation,
    format_psdo,
    mul_many,
    psdo_commutator,
    psdo_conjugate,
    psdo_decompose,
    psdo_invert,
    psdo_mul,
    psdo_nth_root,
)

x = RationalFunction.x()
ONE = RationalFunction.const(1)
D = PsDO.d()
DINV = PsDO.d(-1)


def ps(terms, low=None):
    return PsDO(terms, low)


def test_mul_examples():
    p = psdo_mul(DINV, ps({0: x}), -3)
    assert p.agrees_with(ps({-1: x, -2: -1}), -3)
    # oracle: D*(x D^-1 - D^-2) = x, exactly
    assert psdo_mul(D, ps({-1: x, -2: -1}), -5).agrees_with(ps({0: x}), -5)
    assert psdo_mul(ps({0: 1, -1: x}), PsDO.const(1), -4).agrees_with(ps({0: 1, -1: x}), -4)
    assert psdo_mul(D, DINV, -5).agrees_with(PsDO.const(1), -5)


def test_mul_needs_depth():
    a = ps({0: 1, -1: x}, low=-2)
    with pytest.raises(InsufficientDepth) as exc:
        psdo_mul(a, a, -6)
    assert exc.value.required == -2 and exc.value.requested == -6


def test_invert_examples():
    a = ps({0: 1, -1: -x.inverse()})
    inv = psdo_invert(a, -3)
    assert inv.coeff(-1) == x.inverse() and inv.coeff(-2) == (x ** 2).inverse()
    assert psdo_mul(a, inv, -3).agrees_with(PsDO.const(1), -3)
    assert psdo_mul(inv, a, -3).agrees_with(PsDO.const(1), -3)
    assert psdo_invert(DINV, -4) == D
    assert psdo_invert(PsDO.const(2), -4) == PsDO.const(RationalFunction.const(1) / 2)
    with pytest.raises(ZeroDivisionError):
        psdo_invert(PsDO(), -3)


def test_nth_root_examples():
    assert psdo_nth_root(PsDO.d(2), 2, -6).agrees_with(D, -6)
    L = ps({2: 1, 0: x})
    R = psdo_nth_root(L, 2, -3)
    assert R.coeff(1) == ONE and R.coeff(0) == 0
    assert R.coeff(-1) == x / 2 and R.coeff(-2) == RationalFunction.const(-1) / 4
    L = ps({2: 1, 0: (x + 1).inverse()})
    R = psdo_nth_root(L, 2, -10)
    assert psdo_mul(R, R, -8).agrees_with(L, -8)
    assert psdo_commutator(L, R, -8).is_zero_to(-8)


def test_nth_root_errors():
    with pytest.raises(ValueError, match="order"):
        psdo_nth_root(PsDO.d(3), 2, -4)
    with pytest.raises(ValueError, match="leading"):
        psdo_nth_root(ps({2: 2}), 2, -4)


def test_decompose():
    d, n = psdo_decompose(ps({2: 1, -1: x}))
    assert d == DiffOp([0, 0, 1]) and n == ps({-1: x})
    d, n = psdo_decompose(PsDO.from_diffop(DiffOp.parse("x*D + 3")))
    assert d == DiffOp.parse("x*D + 3") and not n
    d, n = psdo_decompose(ps({0: 1, -1: -x.inverse()}))
    assert d == DiffOp.const(1) and n == ps({-1: -x.inverse()})


def test_expand_rational():
    z = x  # same variable type, read as the spectral parameter
    assert expand_rational_in_inverse_derivation(z.inverse(), -6) == DINV
    assert expand_rational_in_inverse_derivation((z ** 2).inverse(), -6) == PsDO.d(-2)
    g = expand_rational_in_inverse_derivation((z - 3).inverse(), -6)
    assert all(g.coeff(-k) == RationalFunction.const(3 ** (k - 1)) for k in range(1, 7))
    # multiplying back by the denominator recovers the numerator
    assert psdo_mul(ps({1: 1, 0: -3}), g, -5).agrees_with(PsDO.const(1), -5)
    with pytest.raises(ValueError):
        expand_rational_in_inverse_derivation(z, -4)


def test_conjugate():
    assert psdo_conjugate(PsDO.const(1), D, -6).agrees_with(D, -6)
    K = ps({0: 1, -1: -x.inverse()})
    L = psdo_conjugate(K, PsDO.d(2), -6)
    assert L.agrees_with(ps({2: 1, 0: -2 / x ** 2}), -6)


def test_format():
    assert format_psdo(ps({2: 1, 0: -2 / x ** 2})) == "D^2 - 2*x^-2"
    assert format_psdo(ps({0: 1, -1: x}, low=-3)).endswith("O(D^-4)")


# --- properties -------------------------------------------------------------

coef = st.sampled_from([x, x + 1, x ** 2, x.inverse(), RationalFunction.const(2), (x - 1).inverse()])
series = st.builds(
    lambda top, cs: PsDO({top - i: c for i, c in enumerate(cs)}),
    st.integers(-1, 2),
    st.lists(coef, min_size=1, max_size=3),
)


@settings(max_examples=25, deadline=None)
@given(series, series, series)
def test_associative(a, b, c):
    cut = -4
    assert mul_many([psdo_mul(a, b, cut - c.top), c], cut).agrees_with(
        psdo_mul(a, psdo_mul(b, c, cut - a.top), cut), cut)


@settings(max_examples=30, deadline=None)
@given(series, series)
def test_leading_terms_multiply(a, b):
    ab = psdo_mul(a, b, a.top + b.top - 2)
    assert ab.top == a.top + b.top and ab.lc() == a.lc() * b.lc()


@settings(max_examples=25, deadline=None)
@given(series)
def test_invert_both_sides(a):
    inv = psdo_invert(a, -4 - a.top)
    assert psdo_mul(a, inv, -4).agrees_with(PsDO.const(1), -4)
    assert psdo_mul(inv, a, -4).agrees_with(PsDO.const(1), -4)


@settings(max_examples=15, deadline=None)
@given(series, series)
def test_conjugation_preserves_commutators(d1, d2):
    K = ps({0: 1, -1: x.inverse(), -2: x})
    cut = -3
    deep = cut - d1.top - d2.top - 2
    lhs = psdo_conjugate(K, psdo_commutator(d1, d2, deep), cut)
    c1, c2 = psdo_conjugate(K, d1, deep), psdo_conjugate(K, d2, deep)
    assert lhs.agrees_with(psdo_commutator(c1, c2, cut), cut)


def test_centralizer_of_root_is_laurent_in_root():
    L = ps({2: 1, 0: x})
    R = psdo_nth_root(L, 2, -10)
    # an order-zero series built from powers of R commutes with L and is recovered
    rinv = psdo_invert(R, -9)
    P = PsDO.const(1) + psdo_mul(rinv, rinv, -8) * 3
    assert psdo_commutator(P, L, -6).is_zero_to(-6)
    cs = express_in_powers(P.truncate(-6), R, -6)
    assert {k: v for k, v in cs.items() if v} == {0: 1, -2: 3}


def test_centralizer_order_zero_commutes():
    L = ps({0: x, -1: x ** 2, -2: 1})
    for p in [x, x ** 2 + 1, x.inverse()]:
        P = centralizer_order_zero(L, p, -5)
        assert P.coeff(0) == p
        assert psdo_commutator(P, L, -5).is_zero_to(-5)
