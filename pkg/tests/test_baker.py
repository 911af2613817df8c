from fractions import Fraction
from math import factorial

import pytest

from fcw.baker import (
    BakerError,
    beta_map,
    bispectral_dual,
    compute_baker,
    eigen_operator,
    expansion_coefficients,
    expansion_recursion_check,
    format_baker,
    wave_operator,
)
from fcw.exact import Poly, RationalFunction
from fcw.grassmannian import GrPoint, cusp, double_cusp, maps_into, operator_space_basis
from fcw.odo import DiffOp, commutator
from fcw.psdo import PsDO, psdo_invert, psdo_mul

x = RationalFunction.x()
WEYL = GrPoint.weyl()


def frac(v):
    return Fraction(str(v))


def rf_at(f, t):
    num = sum(frac(c) * t ** i for i, c in enumerate(f.num.cs))
    den = sum(frac(c) * t ** i for i, c in enumerate(f.den.cs))
    return num / den


def condition_on_psi(W, data, cond, x0):
    """Apply a jet condition to q*psi at x = x0 using plain Taylor series.

    exp(x0 z) is expanded around lam directly, so this shares no code with the
    solver.  The common factor exp(x0 lam) is dropped.
    """
    lam = frac(cond.lam)
    m = len(cond.jet)
    # q(z) (1 + sum f_i g_i(z)) is a polynomial in z for fixed x0
    terms = [(Poly.const(1) * W.q, Fraction(1))]
    for (mu, j), f in zip(data.basis, data.coeffs):
        terms.append((W.q // Poly.linear_power(mu, j), rf_at(f, x0)))
    taylor = [Fraction(0)] * m
    for P, c in terms:
        cs = [frac(v) for v in P.cs]
        # Taylor coefficients of P at lam by repeated synthetic division
        for k in range(m):
            if not cs:
                break
            rem, quo = Fraction(0), []
            for a in reversed(cs):
                rem = rem * lam + a
                quo.append(rem)
            taylor[k] += c * quo[-1]
            cs = list(reversed(quo[:-1]))
    ex = [x0 ** k / factorial(k) for k in range(m)]
    prod = [sum(ex[i] * taylor[k - i] for i in range(k + 1)) for k in range(m)]
    return sum(frac(c) * factorial(j) * prod[j] for j, c in enumerate(cond.jet))


@pytest.mark.parametrize("W", [cusp(), double_cusp(), cusp(1), GrPoint([(0, (0, 1)), (2, (1, 0, 1))])])
def test_conditions_kill_psi(W):
    data = compute_baker(W)
    for cond in W.conditions:
        for x0 in [Fraction(1), Fraction(-3, 2), Fraction(5)]:
            assert condition_on_psi(W, data, cond, x0) == 0


def test_baker_examples():
    assert format_baker(compute_baker(WEYL)) == "exp(x*z)"
    assert format_baker(compute_baker(cusp())) == "exp(x*z)*(1 - 1/(x*z))"
    assert format_baker(compute_baker(double_cusp())) == "exp(x*z)*(1 - 2/(x*z) + 2/(x^2*z^2))"


def test_coefficients_vanish_at_infinity():
    for W in [cusp(), double_cusp(), cusp(3)]:
        for f in compute_baker(W).coeffs:
            assert not f or f.degree < 0


def test_wave_operator():
    assert wave_operator(WEYL).K == PsDO.const(1)
    K = wave_operator(cusp()).K
    assert K.agrees_with(PsDO({0: 1, -1: -x.inverse()}), -8)
    inv = psdo_invert(K, -8)
    assert psdo_mul(K, inv, -6).agrees_with(PsDO.const(1), -6)


def test_eigen_operators():
    assert eigen_operator(WEYL, Poly([0, 1])) == DiffOp.d()
    L2 = eigen_operator(cusp(), Poly([0, 0, 1]))
    L3 = eigen_operator(cusp(), Poly([0, 0, 0, 1]))
    assert L2 == DiffOp.parse("D^2 - 2*x^-2")
    assert L3.order == 3
    assert not commutator(L2, L3)
    assert L3 * L3 == L2 * L2 * L2
    with pytest.raises(BakerError):
        eigen_operator(cusp(), Poly([0, 1]))


def test_eigen_operator_is_homomorphism():
    W = double_cusp()
    f, g = Poly([0, 0, 0, 1]), Poly([0, 0, 0, 0, 1])
    Lf, Lg = eigen_operator(W, f), eigen_operator(W, g)
    assert eigen_operator(W, f * g) == Lf * Lg
    assert not commutator(Lf, Lg)


def test_expansion_coefficients():
    assert expansion_coefficients(compute_baker(WEYL), 3) == [0, 0, 0]
    a = expansion_coefficients(compute_baker(cusp()), 4)
    assert a[0] == -x.inverse() and not any(a[1:])
    data = compute_baker(cusp())
    L = eigen_operator(cusp(), Poly([0, 0, 1]))
    assert expansion_recursion_check(L, Poly([0, 0, 1]), data, 5) == []
    # a wrong operator is caught
    assert expansion_recursion_check(DiffOp.parse("D^2 - 3*x^-2"), Poly([0, 0, 1]), data, 5)


def test_bispectral_duals():
    assert bispectral_dual(WEYL) == WEYL
    assert bispectral_dual(cusp()) == cusp()
    for W in [double_cusp(), cusp(1), GrPoint([(1, (0, 1)), (-1, (0, 1))])]:
        dual = bispectral_dual(W)
        assert bispectral_dual(dual) == W


def test_beta():
    assert beta_map(WEYL, DiffOp.x()) == DiffOp.d()
    z2 = DiffOp([x ** 2])
    assert beta_map(cusp(), z2) == eigen_operator(cusp(), Poly([0, 0, 1]))
    with pytest.raises(BakerError):
        beta_map(cusp(), DiffOp.d())


def test_beta_anti_multiplicative_and_lands_in_dual():
    W = cusp()
    box = operator_space_basis(W, W, 2, 2)
    ops = box.basis[:4]
    dual = bispectral_dual(W)
    for a in ops:
        assert maps_into(beta_map(W, a), dual, dual)
        for b in ops[:2]:
            assert beta_map(W, a * b) == beta_map(W, b) * beta_map(W, a)
