"""
Points of the adelic Grassmannian.

A point is given by finitely many jet conditions  f -> sum_j c_j f^(j)(lam),
each supported at one point.  V is the joint kernel of the conditions in
C[z], k_lam the number of independent conditions at lam, and

    W = prod_lam (z - lam)^(-k_lam) * V.

The representation is normalized on construction: the conditions at each
point are row-reduced, and a point is never represented with V_lam inside
(z - lam) C[z] (that factor is cancelled against k_lam).  Equal points
therefore compare equal.

Containment questions (``D.V in W``) are decided locally: they only depend
on finitely many Taylor coefficients of elements of V at each point of the
support, and by the Chinese remainder theorem every local jet of V_lam is
attained by some element of V.
"""

import math
from dataclasses import dataclass, field
from functools import cached_property

from fcw.exact import (
    ONE,
    ZERO,
    Poly,
    RationalFunction,
    binom,
    laurent_coeffs,
    rational_roots,
    rf,
    scalar,
)
from fcw.linalg import nullspace, rref
from fcw.odo import DiffOp


class GrError(ValueError):
    pass


def _factorial(n):
    return math.factorial(n)


@dataclass(frozen=True)
class PointCondition:
    """The functional f -> sum_j jet[j] * f^(j)(lam)."""

    lam: object
    jet: tuple

    def __post_init__(self):
        jet = tuple(scalar(c) for c in self.jet)
        while jet and not jet[-1]:
            jet = jet[:-1]
        if not jet:
            raise GrError("jet condition at %s is identically zero" % self.lam)
        object.__setattr__(self, "lam", scalar(self.lam))
        object.__setattr__(self, "jet", jet)

    @property
    def order(self):
        return len(self.jet) - 1

    def taylor_row(self, n):
        """Coefficients against the first n Taylor coefficients at lam."""
        row = [ZERO] * n
        for j, c in enumerate(self.jet):
            row[j] = c * _factorial(j)
        return row

    def __call__(self, f):
        t = laurent_coeffs(rf(f), self.lam, 0, self.order)
        return sum((c * _factorial(j) * t[j] for j, c in enumerate(self.jet)), ZERO)

    def to_json(self):
        return {"lambda": str(self.lam), "jet": [str(c) for c in self.jet]}


def _echelon_conditions(lam, jets):
    """Row-reduce jets at one point, pivots on the highest jet order."""
    if not jets:
        return []
    n = max(len(j) for j in jets)
    rows = [[scalar(j[i]) if i < len(j) else ZERO for i in range(n - 1, -1, -1)] for j in jets]
    red, _ = rref(rows)
    out = []
    for r in red:
        jet = tuple(reversed(r))
        out.append(jet)
    out.sort(key=lambda j: (len(_strip(j)), j))
    return [_strip(j) for j in out]


def _strip(jet):
    jet = tuple(jet)
    while jet and not jet[-1]:
        jet = jet[:-1]
    return jet


def _times_linear(jet, mu, lam):
    """Jet of c' where c'(g) = c((z - lam) g), c supported at mu."""
    d = mu - lam
    n = len(jet)
    out = []
    for j in range(n):
        v = d * jet[j]
        if j + 1 < n:
            v += (j + 1) * jet[j + 1]
        out.append(v)
    return _strip(out)


def _contains_evaluation(jets):
    """Is the functional f -> f(lam) in the span of these jets?"""
    n = max(len(j) for j in jets)
    rows = [[j[i] if i < len(j) else ZERO for i in range(n)] for j in jets]
    red, piv = rref(rows)
    e0 = [ONE] + [ZERO] * (n - 1)
    from fcw.linalg import row_space_contains

    return row_space_contains(red, piv, e0)


class GrPoint:
    """A point W of the adelic Grassmannian."""

    __slots__ = ("_by_point", "__dict__")

    def __init__(self, conditions=()):
        by = {}
        for c in conditions:
            if not isinstance(c, PointCondition):
                lam, jet = c
                c = PointCondition(lam, tuple(jet))
            by.setdefault(c.lam, []).append(c.jet)
        self._by_point = _normalize(by)

    @classmethod
    def weyl(cls):
        return cls([])

    @classmethod
    def from_jets(cls, spec):
        """``spec`` maps lam -> list of jets."""
        return cls([PointCondition(lam, tuple(j)) for lam, jets in spec.items() for j in jets])

    @property
    def support(self):
        return sorted(self._by_point)

    def k(self, lam):
        return len(self._by_point.get(scalar(lam), ()))

    def N(self, lam):
        """Every polynomial divisible by (z - lam)^N lies in V_lam."""
        jets = self._by_point.get(scalar(lam), ())
        return max((len(j) for j in jets), default=0)

    def conditions_at(self, lam):
        return [PointCondition(scalar(lam), j) for j in self._by_point.get(scalar(lam), ())]

    @property
    def conditions(self):
        return [c for lam in self.support for c in self.conditions_at(lam)]

    @cached_property
    def q(self):
        """prod (z - lam)^k_lam."""
        p = Poly.const(1)
        for lam in self.support:
            p = p * Poly.linear_power(lam, self.k(lam))
        return p

    @property
    def total_k(self):
        return sum(self.k(lam) for lam in self.support)

    def __eq__(self, other):
        return isinstance(other, GrPoint) and self._by_point == other._by_point

    def __hash__(self):
        return hash(tuple(sorted(self._by_point.items())))

    def describe(self):
        """Conditions as text, e.g. "f'(0) = 0"; "C[z]" when there are none."""
        if not self._by_point:
            return "C[z]"
        parts = []
        for c in self.conditions:
            terms = []
            for j, v in enumerate(c.jet):
                if v:
                    coef = "" if v == 1 else ("-" if v == -1 else "%s*" % v)
                    terms.append("%sf%s(%s)" % (coef, "'" * j if j < 4 else "^(%d)" % j, c.lam))
            parts.append(" + ".join(terms).replace("+ -", "- ") + " = 0")
        return "; ".join(parts)

    def __repr__(self):
        return "GrPoint(%s)" % self.describe()

    def to_json(self):
        return {"conditions": [c.to_json() for c in self.conditions]}

    # ------------------------------------------------------------ local data

    def local_jet_basis(self, lam, M):
        """Basis (Taylor coefficient vectors at lam, length M+1) of the jets of V_lam."""
        conds = self.conditions_at(lam)
        if not conds:
            return [[ONE if i == j else ZERO for i in range(M + 1)] for j in range(M + 1)]
        rows = [c.taylor_row(M + 1) for c in conds]
        return nullspace(rows, M + 1, ZERO, ONE)

    def local_checks(self, lam, series_lo, series):
        """Linear functionals on a Laurent series of h at lam expressing h in W.

        ``series`` holds coefficients of (z - lam)^i for i >= series_lo,
        already multiplied by q.  Returns the list of values that must all
        vanish: negative-power coefficients, then the jet conditions.
        """
        vals = []
        for i, c in enumerate(series):
            if series_lo + i < 0:
                vals.append(c)
        for cond in self.conditions_at(lam):
            s = ZERO
            for j, cj in enumerate(cond.jet):
                idx = j - series_lo
                if 0 <= idx < len(series):
                    s += cj * _factorial(j) * series[idx]
            vals.append(s)
        return vals


def _normalize(by):
    by = {lam: _echelon_conditions(lam, jets) for lam, jets in by.items()}
    by = {lam: jets for lam, jets in by.items() if jets}
    changed = True
    while changed:
        changed = False
        for lam in sorted(by):
            jets = by[lam]
            if not _contains_evaluation(jets):
                continue
            # V_lam lies in (z - lam) C[z]: divide V by (z - lam) and lower k_lam
            n = max(len(j) for j in jets)
            rows = [[j[i] if i < len(j) else ZERO for i in range(n)] for j in jets]
            red, piv = rref(rows)
            rest = [r for r, p in zip(red, piv) if p != 0]
            new = {}
            for mu, mjets in by.items():
                if mu == lam:
                    shifted = []
                    for r in rest:
                        s = _strip([(j + 1) * r[j + 1] for j in range(len(r) - 1)])
                        if s:
                            shifted.append(s)
                    new[mu] = _echelon_conditions(mu, shifted) if shifted else []
                else:
                    new[mu] = _echelon_conditions(mu, [_times_linear(j, mu, lam) for j in mjets])
            by = {mu: j for mu, j in new.items() if j}
            changed = True
            break
    return {lam: tuple(jets) for lam, jets in sorted(by.items())}


# ---------------------------------------------------------------- membership

def membership(W, h):
    h = rf(h)
    f = h * W.q
    if not f.is_polynomial():
        return False
    return all(not c(f) for c in W.conditions)


def basis_up_to_degree(W, d):
    """Basis of the elements of W of degree <= d (deg num - deg den), echelon by degree."""
    if d < 0:
        raise ValueError("degree bound must be nonnegative")
    n = d + W.total_k + 1
    rows = []
    for c in W.conditions:
        # c(f) for f = sum a_i z^i, as a row in the a_i
        row = []
        for i in range(n):
            row.append(c(Poly.monomial(i)))
        rows.append(row)
    vecs = nullspace(rows, n, ZERO, ONE) if rows else [[ONE if i == j else ZERO for i in range(n)] for j in range(n)]
    polys = _echelon_polys(vecs, n)
    return [RationalFunction(p, W.q) for p in polys]


def _echelon_polys(vecs, n):
    """Echelon basis (pivot = highest degree), sorted by degree."""
    if not vecs:
        return []
    rows = [list(reversed(v)) for v in vecs]
    red, piv = rref(rows)
    polys = [Poly(list(reversed(r))) for r in red]
    return sorted(polys, key=lambda p: p.degree)


def _taylor(p, lam, n):
    t = p.taylor(lam)
    return (t + [ZERO] * n)[:n]


@dataclass
class SpectralAlgebra:
    bound: int
    staircase: list
    basis: list

    def gaps(self):
        return [i for i in range(self.bound + 1) if i not in set(self.staircase)]

    def to_json(self):
        return {
            "bound": self.bound,
            "staircase": self.staircase,
            "basis": [p.to_json() for p in self.basis],
        }


def spectral_algebra(W, d):
    """The polynomials f of degree <= d with f W inside W."""
    if d < 0:
        raise ValueError("degree bound must be nonnegative")
    n = d + 1
    rows = []
    for lam in W.support:
        N = W.N(lam)
        jets = W.local_jet_basis(lam, N - 1)
        conds = W.conditions_at(lam)
        # Taylor coefficients of z^i at lam
        mono = [_taylor(Poly.monomial(i), lam, N) for i in range(n)]
        for v in jets:
            for c in conds:
                row = []
                for i in range(n):
                    prod = [sum((mono[i][a] * v[t - a] for a in range(t + 1)), ZERO) for t in range(N)]
                    row.append(sum((cj * _factorial(j) * prod[j] for j, cj in enumerate(c.jet)), ZERO))
                rows.append(row)
    vecs = nullspace(rows, n, ZERO, ONE) if rows else [[ONE if i == j else ZERO for i in range(n)] for j in range(n)]
    polys = _echelon_polys(vecs, n)
    return SpectralAlgebra(d, sorted(p.degree for p in polys), polys)


# ---------------------------------------------------------------- operators

def _series_mul(alo, a, blo, b, hi):
    lo = alo + blo
    out = [ZERO] * max(0, hi - lo + 1)
    for i, ca in enumerate(a):
        if not ca:
            continue
        for j, cb in enumerate(b):
            e = i + j
            if lo + e > hi:
                break
            out[e] += ca * cb
    return lo, out


def _pole_order(f, lam):
    if not f:
        return 0
    return max(0, -f.valuation_at(lam))


def _series_derivative(lo, s):
    return lo - 1, [(lo + i) * c for i, c in enumerate(s)]


def _series_add(alo, a, blo, b):
    base = min(alo, blo)
    n = max(alo + len(a), blo + len(b)) - base
    out = [ZERO] * n
    for i, c in enumerate(a):
        out[alo - base + i] += c
    for i, c in enumerate(b):
        out[blo - base + i] += c
    return base, out


def _local_rows(ops, V, W, lam):
    """Constraint rows (one column per op) for  ops . V  in W  at lam.

    Elements of V near lam are h = v / q_V with v running over the local
    jets of the polynomial kernel; the rows say that q_W * D.h has no
    polar part at lam and satisfies the conditions of W there.
    """
    if not ops:
        return []
    NW = W.N(lam)
    kV = V.k(lam)
    hi = NW - 1
    pole = 0
    order = 0
    for op in ops:
        order = max(order, op.order)
        for j, a in enumerate(op.coeffs):
            if a:
                pole = max(pole, _pole_order(a, lam) + j)
    M = max(0, hi + pole + kV + 1)
    jets = V.local_jet_basis(lam, M)
    inv_q = laurent_coeffs(RationalFunction(Poly.const(1), V.q), lam, -kV, M - kV)
    qW = _taylor(W.q, lam, hi + pole + kV + 2)
    ser = []
    for op in ops:
        cs = []
        for j, a in enumerate(op.coeffs):
            if not a:
                cs.append(None)
                continue
            po = _pole_order(a, lam)
            cs.append((-po, laurent_coeffs(a, lam, -po, hi + pole + kV + 1)))
        ser.append(cs)
    rows = []
    for v in jets:
        hlo, h = _series_mul(0, v, -kV, inv_q, M - kV)
        dh = [(hlo, h)]
        for _ in range(order):
            dh.append(_series_derivative(*dh[-1]))
        per_op = []
        for cs in ser:
            acc = None
            for j, entry in enumerate(cs):
                if entry is None:
                    continue
                alo, a = entry
                term = _series_mul(alo, a, dh[j][0], dh[j][1], hi)
                acc = term if acc is None else _series_add(acc[0], acc[1], term[0], term[1])
            if acc is None:
                per_op.append(None)
                continue
            per_op.append(_series_mul(acc[0], acc[1], 0, qW, hi))
        base = min([e[0] for e in per_op if e is not None] + [0])
        checks = []
        for e in per_op:
            if e is None:
                checks.append(None)
                continue
            lo, s = e
            checks.append(W.local_checks(lam, base, [ZERO] * (lo - base) + s))
        nchk = max((len(c) for c in checks if c is not None), default=0)
        for r in range(nchk):
            rows.append([c[r] if c is not None else ZERO for c in checks])
    return [r for r in rows if any(r)]


def _relevant_points(ops, V, W):
    pts = set(V.support) | set(W.support)
    for op in ops:
        for a in op.coeffs:
            if a and a.den.degree > 0:
                for lam in rational_roots(a.den):
                    pts.add(lam)
                # irrational poles can never be cancelled by elements of V
                rest = a.den
                for lam in rational_roots(a.den):
                    while rest.degree > 0 and not rest(lam):
                        rest = rest // Poly.linear_power(lam, 1)
                if rest.degree > 0:
                    raise GrError("coefficient %s has poles outside the rationals" % a)
    return sorted(pts)


def maps_into(D, V, W):
    """True iff D.V is contained in W (exact, for all of V)."""
    if not D:
        return True
    try:
        pts = _relevant_points([D], V, W)
    except GrError:
        return False
    for lam in pts:
        for row in _local_rows([D], V, W, lam):
            if row[0]:
                return False
    return True


@dataclass
class OperatorSpaceBasis:
    """A basis of D(V, W) inside the box (D-order <= m, x-degree <= d)."""

    V: GrPoint
    W: GrPoint
    m: int
    d: int
    denominators: list
    basis: list = field(default_factory=list)

    @property
    def dim(self):
        return len(self.basis)

    def columns(self):
        """(j, t): coefficient of z^t in the numerator of the D^j coefficient."""
        cols = []
        for j in range(self.m, -1, -1):
            for t in range(self.d + self.denominators[j].degree, -1, -1):
                cols.append((j, t))
        return cols

    def coords(self, op):
        """Coordinates of op in the ansatz, or None if op is not of box shape."""
        vec = []
        if op.order > self.m:
            return None
        for j in range(self.m, -1, -1):
            c = op.coeff(j) * self.denominators[j]
            if not c.is_polynomial():
                return None
            p = c.num.scale(ONE / c.den.lc())
            top = self.d + self.denominators[j].degree
            if p.degree > top:
                return None
            for t in range(top, -1, -1):
                vec.append(p[t])
        return vec

    def from_coords(self, vec):
        it = iter(vec)
        per_j = {}
        for j in range(self.m, -1, -1):
            top = self.d + self.denominators[j].degree
            cs = [next(it) for _ in range(top + 1)]
            per_j[j] = RationalFunction(Poly(list(reversed(cs))), self.denominators[j])
        return DiffOp([per_j[j] for j in range(self.m + 1)])

    def contains(self, op):
        """Exact membership of op in this box."""
        return self.coords(op) is not None and maps_into(op, self.V, self.W)

    def to_json(self):
        from fcw.odo import format_op

        return {
            "order": self.m,
            "degree": self.d,
            "dim": self.dim,
            "basis": [format_op(op, "z") for op in self.basis],
        }


def box_denominators(V, W, m):
    pts = sorted(set(V.support) | set(W.support))
    dens = []
    for j in range(m + 1):
        p = Poly.const(1)
        for lam in pts:
            e = W.k(lam) + (V.N(lam) - V.k(lam)) + (m - j)
            p = p * Poly.linear_power(lam, e)
        dens.append(p)
    return dens


def operator_space_basis(V, W, m, d):
    """Basis of {D : D.V in W, order <= m, x-degree <= d}."""
    if m < 0 or d < 0:
        raise ValueError("box bounds must be nonnegative")
    box = OperatorSpaceBasis(V, W, m, d, box_denominators(V, W, m))
    cols = box.columns()
    atoms = []
    for (j, t) in cols:
        cs = [RationalFunction.const(0)] * (j + 1)
        cs[j] = RationalFunction(Poly.monomial(t), box.denominators[j])
        atoms.append(DiffOp(cs))
    rows = []
    for lam in sorted(set(V.support) | set(W.support)):
        rows.extend(_local_rows(atoms, V, W, lam))
    n = len(cols)
    vecs = nullspace(rows, n, ZERO, ONE) if rows else [[ONE if i == k else ZERO for i in range(n)] for k in range(n)]
    if vecs:
        red, _ = rref(vecs)
    else:
        red = []
    box.basis = [box.from_coords(v) for v in red]
    return box


def verify_on_window(box, width):
    """Apply every basis element to the elements of V of degree <= width and
    check membership in W directly (an independent global check)."""
    vs = basis_up_to_degree(box.V, width)
    bad = []
    for op in box.basis:
        for v in vs:
            if not membership(box.W, op.apply(v)):
                bad.append((op, v))
    return bad


# ---------------------------------------------------------------- Gamma

def _exp_series(s, n):
    """Taylor coefficients of exp(s(w)) for s(0) = 0, first n."""
    e = [ONE] + [ZERO] * (n - 1)
    for k in range(1, n):
        acc = ZERO
        for i in range(1, k + 1):
            if i < len(s) and s[i]:
                acc += i * s[i] * e[k - i]
        e[k] = acc / k
    return e


def gamma_act_on_point(W, p):
    """gamma_p W = exp(p(z)) W, as conditions c'(f) = c(exp(-p) f)."""
    p = p if isinstance(p, Poly) else Poly(p)
    conds = []
    for lam in W.support:
        for c in W.conditions_at(lam):
            m = c.order
            t = p.taylor(lam)
            s = [ZERO] + [-v for v in t[1:]]
            e = _exp_series(s, m + 1)
            # derivatives of exp(-(p - p(lam))) at lam
            E = [e[r] * _factorial(r) for r in range(m + 1)]
            new = []
            for i in range(m + 1):
                v = ZERO
                for j in range(i, m + 1):
                    if c.jet[j] if j < len(c.jet) else False:
                        v += c.jet[j] * binom(j, i) * E[j - i]
                new.append(v)
            conds.append(PointCondition(lam, tuple(new)))
    return GrPoint(conds)


def translate_point(W, a):
    """W(z - a): every condition moves from lam to lam + a."""
    return GrPoint([PointCondition(c.lam + scalar(a), c.jet) for c in W.conditions])


# ---------------------------------------------------------------- examples

def cusp(lam=0):
    return GrPoint([PointCondition(lam, (0, 1))])


def double_cusp(lam=0):
    return GrPoint([PointCondition(lam, (0, 1)), PointCondition(lam, (0, 0, 1))])
