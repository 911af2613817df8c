"""
Mad-subalgebra diagnostics on finite boxes of operators: the dual
subalgebra of x-degree zero, good framings, symbol codimensions for the
D- and x-gradings, induced filtration audits and the valuation identity
for iterated commutators with a function.
"""

import math
from dataclasses import dataclass, field

from fcw.exact import ONE, ZERO, Poly, RationalFunction, laurent_at_infinity, poly_lcm, rf, scalar
from fcw.linalg import rref
from fcw.odo import DiffOp, commutator, format_op, shift_derivation


class MadError(ValueError):
    pass


# ---------------------------------------------------------------- vectorizing

class OpSpace:
    """Coordinates for a finite family of operators.

    Coefficient j of every operator is written num / den_j with a common
    denominator den_j; the coordinate (j, t) is the z^t coefficient of num.
    """

    def __init__(self, ops):
        ops = [o for o in ops if o]
        self.m = max((o.order for o in ops), default=0)
        dens = [Poly.const(1)] * (self.m + 1)
        for o in ops:
            for j, c in enumerate(o.coeffs):
                if c:
                    dens[j] = poly_lcm(dens[j], c.den)
        self.dens = dens
        tops = [-1] * (self.m + 1)
        for o in ops:
            for j, c in enumerate(o.coeffs):
                if c:
                    tops[j] = max(tops[j], (c.num * (dens[j] // c.den)).degree)
        self.tops = tops

    def xdeg(self, col):
        j, t = col
        return t - self.dens[j].degree

    def columns(self, key):
        cols = [(j, t) for j in range(self.m + 1) for t in range(self.tops[j] + 1)]
        return sorted(cols, key=key)

    def vector(self, op, cols):
        out = {}
        for j, c in enumerate(op.coeffs):
            if not c:
                continue
            if j > self.m:
                raise MadError("operator outside the coordinate space")
            if self.dens[j] % c.den:
                raise MadError("operator outside the coordinate space")
            p = c.num * (self.dens[j] // c.den)
            for t, v in enumerate(p.cs):
                if v:
                    out[(j, t)] = v
        return [out.get(col, ZERO) for col in cols]

    def op(self, vec, cols):
        per = {}
        for col, v in zip(cols, vec):
            if v:
                per.setdefault(col[0], {})[col[1]] = v
        coeffs = []
        for j in range(self.m + 1):
            d = per.get(j, {})
            if not d:
                coeffs.append(RationalFunction.const(0))
                continue
            num = Poly([d.get(t, ZERO) for t in range(max(d) + 1)])
            coeffs.append(RationalFunction(num, self.dens[j]))
        return DiffOp(coeffs)


def _key_d(space):
    return lambda col: (-col[0], -col[1])


def _key_x(space):
    return lambda col: (-space.xdeg(col), -col[0])


def echelon(ops, grading="x"):
    """RREF of the span of ops with pivots on the leading monomial of the grading."""
    space = OpSpace(ops)
    cols = space.columns(_key_x(space) if grading == "x" else _key_d(space))
    rows = [space.vector(o, cols) for o in ops if o]
    red, piv = rref(rows)
    return space, cols, red, piv


def _ops_of(box):
    return list(box.basis) if hasattr(box, "basis") else list(box)


# ---------------------------------------------------------------- B-check

@dataclass
class DualSubalgebraBasis:
    basis: list
    commutative: bool
    trivial: bool
    orders: list = field(default_factory=list)
    negative: list = field(default_factory=list)

    def conductor(self):
        """Least c with every order >= c (up to the largest order) present."""
        if not self.orders:
            return None
        top = max(self.orders)
        have = set(self.orders)
        c = top
        while c - 1 >= 0 and (c - 1) in have:
            c -= 1
        return c

    def rank_one(self):
        """Every order from the conductor up to the top is attained and the top is positive."""
        return bool(self.orders) and max(self.orders) > 0 and self.conductor() is not None and self.conductor() < max(self.orders)

    def to_json(self):
        return {
            "basis": [format_op(o) for o in self.basis],
            "orders": self.orders,
            "commutative": self.commutative,
            "trivial": self.trivial,
            "negative_degree": [format_op(o) for o in self.negative],
        }


def dual_subalgebra(box):
    """The operators of x-degree <= 0 in the span of the box."""
    ops = _ops_of(box)
    space, cols, red, piv = echelon(ops, "x")
    basis = []
    negative = []
    for row, p in zip(red, piv):
        if space.xdeg(cols[p]) <= 0:
            op = space.op(row, cols)
            basis.append(op)
            if space.xdeg(cols[p]) < 0:
                negative.append(op)
    basis.sort(key=lambda o: (o.order, format_op(o)))
    comm = all(not commutator(a, b) for i, a in enumerate(basis) for b in basis[i + 1:])
    trivial = all(o.order == 0 and o.coeff(0).is_constant() for o in basis)
    orders = sorted({o.order for o in basis})
    return DualSubalgebraBasis(basis, comm, trivial, orders, negative)


def generated_span(gens, max_order, max_len):
    """Basis of the span of words of length <= max_len in gens, keeping order <= max_order."""
    basis = [DiffOp.const(1)]
    frontier = [DiffOp.const(1)]
    for _ in range(max_len):
        new = []
        for w in frontier:
            for g in gens:
                p = g * w
                if p and p.order <= max_order:
                    new.append(p)
        # dedupe against the span so far
        kept = []
        cur = list(basis)
        for p in new:
            space, cols, red, piv = echelon(cur + [p], "d")
            if len(red) > len(cur):
                cur.append(p)
                kept.append(p)
        basis = cur
        frontier = kept
        if not frontier:
            break
    return basis


def counterexample_algebra(max_order=6, max_len=6):
    """Span of words in x, x D, 4 x D^2 + 2 D, of order <= max_order."""
    gens = [DiffOp.parse("x"), DiffOp.parse("x*D"), DiffOp.parse("4*x*D^2 + 2*D")]
    return generated_span(gens, max_order, max_len)


# ---------------------------------------------------------------- good framing

def _first_two_constant(op):
    if op.order < 1:
        return op.coeff(0).is_constant() if op.order == 0 else True
    return op.lc().is_constant() and op.coeff(op.order - 1).is_constant()


@dataclass
class Framing:
    q: object
    element: DiffOp
    basis: list
    normalized: bool
    degrees_kept: bool

    def to_json(self):
        from fcw.exact import format_rf

        return {
            "q": format_rf(self.q),
            "element": format_op(self.element),
            "basis": [format_op(o) for o in self.basis],
            "normalized": self.normalized,
            "x_degrees_kept": self.degrees_kept,
        }


def good_framing_normalize(bcheck):
    """Shift D by q (deg_x q < 0) so that the lowest positive-order element of
    B-check gets a constant subleading coefficient."""
    basis = bcheck.basis if hasattr(bcheck, "basis") else list(bcheck)
    pos = [o for o in basis if o.order > 0]
    if not pos:
        raise MadError("B-check trivial: no element of positive order")
    L = min(pos, key=lambda o: (o.order, format_op(o)))
    lc = L.lc()
    if not lc.is_constant():
        raise MadError("leading coefficient %s is not constant" % lc)
    L = L.scale(ONE / lc.constant_value())
    n = L.order
    s = L.coeff(n - 1)
    if s and s.degree > 0:
        raise MadError("subleading coefficient has positive x-degree")
    c = laurent_at_infinity(s, 0, 0)[0] if s else ZERO
    q = (s - c) * (ONE / n) if s else RationalFunction.const(0)
    new = [shift_derivation(o, q) for o in basis]
    from fcw.odo import x_symbol_and_degree

    kept = all(x_symbol_and_degree(a)[0] == x_symbol_and_degree(b)[0] for a, b in zip(basis, new) if a)
    return Framing(q, L, new, all(_first_two_constant(o) for o in new), kept)


# ---------------------------------------------------------------- codimensions

@dataclass
class CodimReport:
    order: int
    degree: int
    widened: tuple
    missing_d: list
    missing_x: list
    stable_d: bool
    stable_x: bool
    violations: list = field(default_factory=list)

    @property
    def codim_d(self):
        return len(self.missing_d)

    @property
    def codim_x(self):
        return len(self.missing_x)

    @property
    def stable(self):
        return self.stable_d and self.stable_x

    @property
    def equal(self):
        return self.stable and self.codim_d == self.codim_x

    def to_json(self):
        return {
            "box": {"order": self.order, "degree": self.degree},
            "widened": {"order": self.widened[0], "degree": self.widened[1]},
            "missing_d": [list(m) for m in self.missing_d],
            "missing_x": [list(m) for m in self.missing_x],
            "codim_d": self.codim_d,
            "codim_x": self.codim_x,
            "stable": self.stable,
            "equal": self.equal,
            "violations": self.violations,
            "note": "codimensions are measured inside the box and checked under one widening only",
        }


def leading_monomials(ops):
    """(gr_D, gr_x, violations): attained monomials (x-power, xi-power) of both gradings."""
    ops = [o for o in ops if o]
    violations = []
    space, cols, red, piv = echelon(ops, "d")
    grd = set()
    for row, p in zip(red, piv):
        op = space.op(row, cols)
        lc = op.lc()
        if not lc.is_polynomial():
            violations.append("leading coefficient %s of %s is not a polynomial" % (lc, format_op(op)))
            continue
        grd.add((lc.num.degree, op.order))
    space, cols, red, piv = echelon(ops, "x")
    grx = set()
    for p in piv:
        j, t = cols[p]
        grx.add((space.xdeg(cols[p]), j))
    return grd, grx, violations


def _missing(attained, m, d):
    return sorted((t, j) for j in range(m + 1) for t in range(d + 1) if (t, j) not in attained)


def symbol_codimensions(box, factor=1.5):
    from fcw.grassmannian import operator_space_basis

    m, d = box.m, box.d
    grd, grx, viol = leading_monomials(box.basis)
    for (t, j) in grd:
        if t < 0:
            viol.append("negative x-power in D-symbol x^%d xi^%d" % (t, j))
    M, Dd = int(math.ceil(factor * m)), int(math.ceil(factor * d))
    wide = operator_space_basis(box.V, box.W, M, Dd)
    wgrd, wgrx, wviol = leading_monomials(wide.basis)
    viol.extend(wviol)
    md, mx = _missing(grd, m, d), _missing(grx, m, d)
    return CodimReport(
        m, d, (M, Dd), md, mx,
        md == _missing(wgrd, m, d),
        mx == _missing(wgrx, m, d),
        viol,
    )


# ---------------------------------------------------------------- filtration

def _span_basis(ops):
    ops = [o for o in ops if o]
    if not ops:
        return []
    space, cols, red, piv = echelon(ops, "d")
    return [space.op(r, cols) for r in red]


def induced_degree(a, bset, kmax):
    """Least k with every (k+1)-fold commutator [b1, [b2, ... a]] zero, or None."""
    if not a:
        return -1
    level = [a]
    for k in range(kmax + 1):
        nxt = _span_basis([commutator(b, s) for b in bset for s in level])
        if not nxt:
            return k
        level = nxt
    return None


def b_set(gens, word_len=2):
    """gens plus their products up to word_len factors."""
    out = list(gens)
    cur = list(gens)
    for _ in range(word_len - 1):
        cur = [g * c for g in gens for c in cur]
        out.extend(cur)
    return _span_basis(out)


@dataclass
class FiltrationAudit:
    degrees: list
    violations: list
    kmax: int

    @property
    def ok(self):
        return not self.violations

    def to_json(self):
        return {
            "degrees": [[format_op(a), k] for a, k in self.degrees],
            "violations": self.violations,
            "kmax": self.kmax,
            "note": "B is represented by finitely many generators and their products",
        }


def mad_filtration_audit(box, bgens, kmax=8, word_len=2):
    ops = [o for o in _ops_of(box) if o]
    bs = b_set(bgens, word_len)
    for i, b in enumerate(bs):
        for c in bs[i + 1:]:
            if commutator(b, c):
                raise MadError("generators of B do not commute")
    degrees = []
    violations = []
    for a in ops:
        k = induced_degree(a, bs, kmax)
        degrees.append((a, k))
        if k is None:
            violations.append("%s not annihilated within kmax=%d" % (format_op(a), kmax))
            continue
        if k < 0:
            violations.append("%s has negative degree" % format_op(a))
            continue
        if k == 0:
            continue
        drops = []
        for b in bs:
            kb = induced_degree(commutator(b, a), bs, kmax)
            if kb is None or kb > k - 1:
                violations.append("[%s, %s] does not drop the degree" % (format_op(b), format_op(a)))
            drops.append(kb)
        if k - 1 not in drops:
            violations.append("no b lowers the degree of %s by exactly one" % format_op(a))
    return FiltrationAudit(degrees, violations, kmax)


# ---------------------------------------------------------------- valuations

@dataclass
class ValuationReport:
    r: int
    s: int
    n: int
    recursion: list
    valuations: list
    branch: object
    identity: object
    cross_check: bool
    branch_rule: bool

    @property
    def ok(self):
        return self.cross_check and self.branch_rule and self.identity is not False

    def to_json(self):
        from fcw.exact import format_rf

        return {
            "r": self.r,
            "s": self.s,
            "n": self.n,
            "p": [format_rf(p) for p in self.recursion],
            "valuations": self.valuations,
            "vanishing_index": self.branch,
            "identity_holds": self.identity,
            "cross_check": self.cross_check,
            "branch_rule": self.branch_rule,
        }


def p_recursion(a, n, p, imax):
    """p_0 = p, p_1 = n a p', p_{i+1} = n a p_i' - i (n-1) a' p_i."""
    a, p = rf(a), rf(p)
    out = [p]
    if imax >= 1:
        out.append(a * p.derivative() * n)
    da = a.derivative()
    for i in range(1, imax):
        pi = out[-1]
        out.append(a * pi.derivative() * n - da * pi * (i * (n - 1)))
    return out


def lemma_p_check(a, n, p, lam, imax=6, lower=()):
    """Run the recursion, track valuations at lam and cross-check against
    the top coefficients of (ad D)^i (p) with D = a D^n + lower terms."""
    a, p = rf(a), rf(p)
    lam = scalar(lam)
    if n <= 0:
        raise MadError("n must be positive")
    if not p or not a:
        raise MadError("a and p must be nonzero")
    r, s = a.valuation_at(lam), p.valuation_at(lam)
    if s == 0:
        raise MadError("valuation of p at %s is zero" % lam)
    ps = p_recursion(a, n, p, imax)
    vals = [q.valuation_at(lam) if q else None for q in ps]
    branch = None
    rule = True
    for i in range(1, imax + 1):
        q = vals[i]
        if q is None:
            break
        if n * q - i * r * (n - 1) == 0:
            branch = i
            break
        if i + 1 <= imax and vals[i + 1] != q + r - 1:
            rule = False
    identity = None if branch is None else (n * s == branch * (n - r))
    D = DiffOp(list(lower)[:n] + [RationalFunction.const(0)] * max(0, n - len(lower)) + [a])
    cur = DiffOp._raw([p])
    cross = True
    for i in range(1, imax + 1):
        cur = commutator(D, cur)
        if cur.coeff(i * (n - 1)) != ps[i] or cur.order > i * (n - 1):
            cross = False
            break
    return ValuationReport(r, s, n, ps, vals, branch, identity, cross, rule)
