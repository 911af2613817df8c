import pytest

from fcw.exact import RationalFunction
from fcw.grassmannian import GrPoint, cusp, double_cusp, operator_space_basis
from fcw.mad import (
    MadError,
    counterexample_algebra,
    dual_subalgebra,
    good_framing_normalize,
    induced_degree,
    lemma_p_check,
    leading_monomials,
    mad_filtration_audit,
    symbol_codimensions,
)
from fcw.odo import DiffOp, commutator, principal_symbol, shift_derivation

x = RationalFunction.x()
WEYL = GrPoint.weyl()
X, D = DiffOp.x(), DiffOp.d()


def op(text):
    return DiffOp.parse(text)


@pytest.fixture(scope="module")
def cusp_box():
    return operator_space_basis(cusp(), cusp(), 4, 4)


def test_weyl_dual_subalgebra():
    b = dual_subalgebra(operator_space_basis(WEYL, WEYL, 3, 2))
    assert sorted(o.order for o in b.basis) == [0, 1, 2, 3]
    assert all(o.coeff(o.order) == 1 and not any(o.coeffs[:-1]) for o in b.basis)
    assert b.commutative and not b.trivial and not b.negative


def test_cusp_dual_subalgebra(cusp_box):
    b = dual_subalgebra(cusp_box)
    assert b.commutative and not b.trivial
    assert b.orders == [0, 2, 3, 4]
    assert op("D^2 - 2*x^-2") in b.basis
    assert b.rank_one() and b.conductor() == 2


def test_counterexample_dual_subalgebra_is_scalars():
    b = dual_subalgebra(counterexample_algebra(6, 6))
    assert b.trivial and b.basis == [DiffOp.const(1)]


def test_framing_identity_on_cusp(cusp_box):
    fr = good_framing_normalize(dual_subalgebra(cusp_box))
    assert not fr.q and fr.normalized and fr.degrees_kept


def test_framing_recovers_shift(cusp_box):
    shifted = [shift_derivation(o, x.inverse()) for o in cusp_box.basis]
    fr = good_framing_normalize(dual_subalgebra(shifted))
    # the normalizing shift undoes the one applied above
    assert fr.q == -x.inverse() and fr.normalized


def test_framing_keeps_constant():
    fr = good_framing_normalize([op("D^2 + 3*D")])
    assert not fr.q and fr.basis == [op("D^2 + 3*D")]


def test_framing_needs_positive_order():
    with pytest.raises(MadError):
        good_framing_normalize([DiffOp.const(1)])


def test_codims_weyl():
    r = symbol_codimensions(operator_space_basis(WEYL, WEYL, 2, 2))
    assert r.codim_d == r.codim_x == 0 and r.equal


def test_codims_cusp_and_double():
    r1 = symbol_codimensions(operator_space_basis(cusp(), cusp(), 4, 4))
    assert r1.equal and not r1.violations
    assert (1, 0) in r1.missing_d and (0, 1) in r1.missing_d
    r2 = symbol_codimensions(operator_space_basis(double_cusp(), double_cusp(), 4, 4))
    assert r2.equal and r2.codim_d > r1.codim_d


def test_box_leading_coefficients_are_polynomials(cusp_box):
    for o in cusp_box.basis:
        principal_symbol(o)  # raises on a non-polynomial leading coefficient
    grd, _, viol = leading_monomials(cusp_box.basis)
    assert not viol and all(t >= 0 for t, _ in grd)


def test_filtration_weyl():
    box = operator_space_basis(WEYL, WEYL, 3, 2)
    audit = mad_filtration_audit(box, [X])
    assert audit.ok
    for a, k in audit.degrees:
        assert k == a.order


def test_filtration_cusp():
    box = operator_space_basis(cusp(), cusp(), 3, 3)
    # the image of A_W: multiplication by z^2 and z^3
    audit = mad_filtration_audit(box, [DiffOp([x ** 2]), DiffOp([x ** 3])])
    assert audit.ok
    degs = {str(a): k for a, k in audit.degrees}
    assert induced_degree(op("D^2 - 2*x^-2"), [DiffOp([x ** 2]), DiffOp([x ** 3])], 6) == 2
    assert all(k is not None for k in degs.values())


def test_filtration_measures_nilpotency():
    assert induced_degree(op("x*D"), [X], 5) == 1
    assert commutator(X, op("x*D")) == -X


def test_valuation_examples():
    r = lemma_p_check(1, 2, x, 0)
    assert (r.r, r.s, r.branch, r.identity) == (0, 1, 1, True) and r.ok
    r = lemma_p_check(1, 2, x ** 2, 0)
    assert (r.s, r.branch, r.identity) == (2, 2, True) and r.ok
    r = lemma_p_check(x, 2, x, 0)
    assert (r.r, r.branch, r.identity) == (1, 2, True) and r.ok


def test_valuation_with_lower_terms():
    r = lemma_p_check(x + 1, 3, x ** 2 / (x - 1), 0, lower=[x, 1, x ** 2])
    assert r.cross_check and r.branch_rule


def test_valuation_rejects_zero_valuation():
    with pytest.raises(MadError):
        lemma_p_check(1, 2, x + 1, 0)
