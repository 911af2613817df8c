"""
Baker functions of adelic Grassmannian points, the wave operator, the
eigen-operators L_f, the bispectral involution and the map beta.

For W with support {lam} and multiplicities k_lam the Baker function is

    psi_W(x, z) = exp(x z) * (1 + sum_{lam, 1 <= j <= k_lam} f_{lam,j}(x) (z - lam)^-j)

with the f rational in x, fixed by requiring that every condition of W
annihilates q(z) psi_W(x, z) identically in x.
"""

from dataclasses import dataclass

from fcw.exact import (
    ONE,
    ZERO,
    Poly,
    RationalFunction,
    binom,
    factor_strings,
    format_poly,
    format_rf,
    partial_fractions,
    rational_roots,
    scalar,
)
from fcw.grassmannian import GrPoint, PointCondition, maps_into
from fcw.linalg import nullspace, rref
from fcw.odo import DiffOp
from fcw.psdo import (
    DEFAULT_DEPTH,
    InsufficientDepth,
    PsDO,
    expand_rational_in_inverse_derivation,
    mul_many,
    psdo_decompose,
    psdo_invert,
    rational_symbol,
)


class BakerError(ValueError):
    pass


def _x():
    return RationalFunction.x()


def _poly_rf(p):
    return RationalFunction(p)


@dataclass
class BakerData:
    """psi = exp(x z) (1 + sum f_i(x) (z - lam_i)^-j_i)."""

    basis: list
    coeffs: list

    def terms(self):
        return list(zip(self.basis, self.coeffs))

    @property
    def poles(self):
        return sorted({lam for lam, _ in self.basis})

    def correction(self):
        """The coefficient of each g_i, as a dict (lam, j) -> f(x)."""
        return {b: f for b, f in zip(self.basis, self.coeffs) if f}

    def __str__(self):
        return format_baker(self)

    def to_json(self):
        return {
            "psi": format_baker(self),
            "terms": [
                {"lambda": str(lam), "j": j, "f": format_rf(f)} for (lam, j), f in zip(self.basis, self.coeffs)
            ],
        }


def g_basis(W):
    return [(lam, j) for lam in W.support for j in range(1, W.k(lam) + 1)]


def _g(lam, j):
    """(z - lam)^-j as a rational function."""
    return RationalFunction(Poly.const(1), Poly.linear_power(lam, j))


def _condition_row(cond, polys):
    """For each polynomial Q(z) in polys: sum_j c_j sum_t C(j,t) x^(j-t) Q^(t)(lam).

    This is cond applied to exp(x z) Q(z), with the factor exp(x lam) dropped.
    """
    x = _x()
    out = []
    m = cond.order
    for Q in polys:
        ders = [Q]
        for _ in range(m):
            ders.append(ders[-1].derivative())
        vals = [d(cond.lam) for d in ders]
        total = RationalFunction.const(0)
        for j, c in enumerate(cond.jet):
            if not c:
                continue
            for t in range(j + 1):
                if vals[t]:
                    total = total + x ** (j - t) * (c * binom(j, t) * vals[t])
        out.append(total)
    return out


def compute_baker(W):
    basis = g_basis(W)
    if not basis:
        return BakerData([], [])
    q = W.q
    qg = [q // Poly.linear_power(lam, j) for lam, j in basis]
    rows = []
    rhs = []
    for cond in W.conditions:
        vals = _condition_row(cond, qg + [q])
        rows.append(vals[:-1])
        rhs.append(-vals[-1])
    n = len(basis)
    aug = [r + [b] for r, b in zip(rows, rhs)]
    red, piv = rref(aug)
    if piv[:n] != list(range(n)) or len(piv) > n:
        missing = next((c for c in range(n) if c not in piv), None)
        raise BakerError("degenerate Baker system (no pivot for unknown %s)" % (basis[missing] if missing is not None else "rhs"))
    coeffs = [red[i][n] for i in range(n)]
    data = BakerData(basis, coeffs)
    bad = baker_residuals(W, data)
    if any(bad):
        raise BakerError("Baker function fails re-substitution")
    return data


def baker_residuals(W, data):
    """Value of each condition of W on q psi (exp factor dropped); all zero for psi_W."""
    q = W.q
    out = []
    for cond in W.conditions:
        polys = [q] + [q // Poly.linear_power(lam, j) for lam, j in data.basis]
        vals = _condition_row(cond, polys)
        total = vals[0]
        for f, v in zip(data.coeffs, vals[1:]):
            total = total + f * v
        out.append(total)
    return out


def _term_text(f, lam, j):
    """Text for f(x) (z - lam)^-j, with the sign pulled out."""
    num, den = f.num, f.den
    neg = num.lc() < 0
    if neg:
        num = -num
    factors = factor_strings(den, "x") if den.degree > 0 else []
    zf = "z" if lam == 0 else ("z - %s" % lam if lam > 0 else "z + %s" % (-lam))
    if lam != 0:
        zf = "(%s)" % zf
    factors.append(zf if j == 1 else "%s^%d" % (zf, j))
    bottom = "*".join(factors)
    if len(factors) > 1:
        bottom = "(%s)" % bottom
    if num.degree == 0:
        top = str(num.lc())
    else:
        top = format_poly(num, "x")
        if " " in top:
            top = "(%s)" % top
    return neg, "%s/%s" % (top, bottom)


def format_baker(data):
    parts = []
    for (lam, j), f in zip(data.basis, data.coeffs):
        if f:
            parts.append(_term_text(f, lam, j))
    if not parts:
        return "exp(x*z)"
    body = "1"
    for neg, t in parts:
        body += (" - " if neg else " + ") + t
    return "exp(x*z)*(%s)" % body


# ---------------------------------------------------------------- wave operator

@dataclass
class WaveOperator:
    K: PsDO
    data: BakerData

    def __str__(self):
        return str(self.K)

    def to_json(self):
        return self.K.to_json()


def _k_series(data, cutoff):
    total = PsDO.const(1)
    for (lam, j), f in zip(data.basis, data.coeffs):
        if not f:
            continue
        g = expand_rational_in_inverse_derivation(_g(lam, j), cutoff)
        total = total + PsDO._raw({i: f * c for i, c in g.terms.items()}, g.low)
    return total


def wave_operator(W, cutoff=-DEFAULT_DEPTH, data=None):
    data = data if data is not None else compute_baker(W)
    return WaveOperator(_k_series(data, cutoff), data)


def expansion_coefficients(data, N):
    """a_1..a_N of exp(-x z) psi = 1 + sum a_i(x) z^-i."""
    out = []
    for i in range(1, N + 1):
        a = RationalFunction.const(0)
        for (lam, j), f in zip(data.basis, data.coeffs):
            if i >= j and f:
                c = binom(i - 1, i - j) * scalar(lam) ** (i - j)
                if c:
                    a = a + f * c
        out.append(a)
    return out


def _conjugate(data, X, cutoff):
    """K X K^-1 to the cutoff, deepening the inputs until it is determined.

    ``X`` is a callable taking an input depth and returning a PsDO.
    """
    need = cutoff - 2
    for _ in range(12):
        Xs = X(need)
        if not Xs:
            return Xs
        depth = need - max(Xs.top, 0)
        K = _k_series(data, depth)
        try:
            kinv = psdo_invert(K, depth)
            return mul_many([K, Xs, kinv], cutoff)
        except InsufficientDepth:
            need -= 4
    raise BakerError("could not reach depth %d" % cutoff)


def _differential_part(P, cutoff, what):
    diff, neg = psdo_decompose(P)
    if not neg.is_zero_to(cutoff):
        raise BakerError("%s has a nonzero negative part down to D^%d" % (what, cutoff))
    return diff


def eigen_operator(W, f, cutoff=-DEFAULT_DEPTH, data=None):
    """The differential operator L_f with L_f psi_W = f(z) psi_W."""
    f = f if isinstance(f, Poly) else Poly(f)
    if not maps_into(DiffOp.const(0) + DiffOp._raw([_poly_rf(f)]), W, W):
        raise BakerError("%s is not in the spectral algebra of W" % format_poly(f, "z"))
    data = data if data is not None else compute_baker(W)
    fd = PsDO.from_diffop(DiffOp._raw([RationalFunction.const(c) for c in f.cs]))
    P = _conjugate(data, lambda depth: fd, cutoff)
    L = _differential_part(P, cutoff, "K f(D) K^-1")
    if L.order >= 1:
        if not L.coeff(L.order - 1).is_constant() or not L.lc().is_constant():
            raise BakerError("L_f is not normalized (first two coefficients not constant)")
    return L


def apply_to_baker(L, data, N):
    """Coefficients of z^p (p >= deg - N) in exp(-x z) L psi, from a_0..a_N."""
    a = [RationalFunction.const(1)] + expansion_coefficients(data, N)
    out = {}
    for j, lj in enumerate(L.coeffs):
        if not lj:
            continue
        for i, ai in enumerate(a):
            d = ai
            for s in range(j + 1):
                if s:
                    d = d.derivative()
                if not d:
                    break
                p = j - s - i
                out[p] = out.get(p, RationalFunction.const(0)) + lj * d * binom(j, s)
    return out


def expansion_recursion_check(L, f, data, N):
    """Substitute the expansion into L psi = f(z) psi and compare order by order.

    Only powers of z that cannot receive contributions from a_i with i > N
    are compared.  Returns the list of mismatching powers (empty on success).
    """
    f = f if isinstance(f, Poly) else Poly(f)
    n = L.order
    lhs = apply_to_baker(L, data, N)
    a = [RationalFunction.const(1)] + expansion_coefficients(data, N)
    rhs = {}
    for k, c in enumerate(f.cs):
        for i, ai in enumerate(a):
            if c and ai:
                rhs[k - i] = rhs.get(k - i, RationalFunction.const(0)) + ai * c
    bad = []
    for p in range(n - N, max(n, f.degree) + 1):
        l = lhs.get(p, RationalFunction.const(0))
        r = rhs.get(p, RationalFunction.const(0))
        if l != r:
            bad.append(p)
    return bad


# ---------------------------------------------------------------- bispectral

def _x_coefficient_rows(vec):
    """Rows of the matrix whose nullspace is {c : c . vec(x) = 0 for all x}."""
    den = Poly.const(1)
    for v in vec:
        if v:
            den = den * (v.den // _gcd(den, v.den))
    polys = [(v * RationalFunction(den)).num if v else Poly.const(0) for v in vec]
    # v * den is a polynomial; .num carries it since its den is 1
    top = max((p.degree for p in polys), default=-1)
    return [[p[t] for p in polys] for t in range(top + 1)]


def _gcd(a, b):
    from fcw.exact import poly_gcd

    return poly_gcd(a, b)


def bispectral_dual(W, data=None):
    """The point b(W) with psi_{b(W)}(x, z) = psi_W(z, x)."""
    data = data if data is not None else compute_baker(W)
    if not data.basis:
        return GrPoint.weyl()
    F = Poly.const(1)
    for f in data.coeffs:
        if f:
            F = F * (f.den // _gcd(F, f.den))
    roots = rational_roots(F)
    rest = F
    for mu in roots:
        while rest.degree > 0 and not rest(mu):
            rest = rest // Poly.linear_power(mu, 1)
    if rest.degree > 0:
        raise BakerError("dual point has support outside the rationals (factor %s)" % format_poly(rest, "x"))
    # G(z, x) = F(z) (1 + sum f_i(z) g_i(x)), a polynomial in z
    parts = [(F, RationalFunction.const(1))]
    for (lam, j), f in zip(data.basis, data.coeffs):
        if f:
            Ff = f * RationalFunction(F)
            parts.append((Ff.num, _g(lam, j)))
    x = _x()
    conds = []
    for mu in roots:
        e = F.valuation_at(mu)
        found = None
        for N in range(e + 1, e + 4 * (e + 2) + 1):
            # jets  d^n/dz^n [exp(x z) G](mu) / exp(x mu),  n < N
            ders = []
            for P, coef in parts:
                ds = [P]
                for _ in range(N):
                    ds.append(ds[-1].derivative())
                ders.append(([d(mu) for d in ds], coef))
            vec = []
            for n in range(N):
                total = RationalFunction.const(0)
                for vals, coef in ders:
                    s = RationalFunction.const(0)
                    for t in range(n + 1):
                        if vals[t]:
                            s = s + x ** (n - t) * (binom(n, t) * vals[t])
                    total = total + s * coef
                vec.append(total)
            rows = _x_coefficient_rows(vec)
            null = nullspace(rows, N, ZERO, ONE)
            if len(null) == e:
                found = null
                break
            if len(null) > e:
                raise BakerError("transposed Baker function is not a Gr-ad point at %s" % mu)
        if found is None:
            raise BakerError("could not determine dual conditions at %s" % mu)
        conds.extend(PointCondition(mu, tuple(c)) for c in found)
    dual = GrPoint(conds)
    if not _is_transpose(data, compute_baker(dual)):
        raise BakerError("bispectral dual failed the transpose check")
    return dual


def transpose_terms(data):
    """Partial fractions in z of  sum f_i(z) g_i(x):  {(mu, j): coefficient in x}."""
    out = {}
    for (lam, j), f in zip(data.basis, data.coeffs):
        if not f:
            continue
        poles = rational_roots(f.den)
        poly, pf = partial_fractions(f, poles)
        if poly:
            raise BakerError("coefficient %s does not vanish at infinity" % f)
        for key, c in pf.items():
            if c:
                out[key] = out.get(key, RationalFunction.const(0)) + _g(lam, j) * c
    return {k: v for k, v in out.items() if v}


def _is_transpose(data, dual_data):
    return transpose_terms(data) == dual_data.correction()


def _b_image(D, depth):
    """b(D) = sum_j x^j a_j(D) as a PsDO, for D = sum a_j(z) d_z^j."""
    total = PsDO.const(0)
    for j, a in enumerate(D.coeffs):
        if not a:
            continue
        s = rational_symbol(a, depth)
        xj = _x() ** j
        total = total + PsDO._raw({i: xj * c for i, c in s.terms.items()}, s.low)
    return total


def beta_map(W, D, cutoff=-DEFAULT_DEPTH, data=None, check=True):
    """Theta = K_W b(D) K_W^-1 for D in D(W)."""
    if check and not maps_into(D, W, W):
        raise BakerError("operator is not in D(W)")
    data = data if data is not None else compute_baker(W)
    P = _conjugate(data, lambda depth: _b_image(D, depth), cutoff)
    return _differential_part(P, cutoff, "K b(D) K^-1")
