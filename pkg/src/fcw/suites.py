"""
Verification suites.  ``core`` holds the ten acceptance checks; ``extended``
adds further structural property checks on the same examples.

Each check returns a CheckResult; nothing here raises on a failed check.
"""

import random
import time
import traceback
from dataclasses import dataclass, field

from fcw.baker import (
    beta_map,
    bispectral_dual,
    compute_baker,
    eigen_operator,
    expansion_recursion_check,
    wave_operator,
)
from fcw.calogero_moser import gamma_act_cm, random_rank_one, rank_one_check
from fcw.exact import Poly, RationalFunction, scalar
from fcw.grassmannian import (
    GrPoint,
    basis_up_to_degree,
    cusp,
    double_cusp,
    gamma_act_on_point,
    maps_into,
    membership,
    operator_space_basis,
    spectral_algebra,
    verify_on_window,
)
from fcw.mad import (
    counterexample_algebra,
    dual_subalgebra,
    echelon,
    good_framing_normalize,
    lemma_p_check,
    symbol_codimensions,
)
from fcw.odo import DiffOp, SymbolError, commutator, format_op, gamma_conjugate, principal_symbol
from fcw.psdo import PsDO, psdo_commutator, psdo_mul, psdo_nth_root

SEED = 20240601


@dataclass
class CheckResult:
    name: str
    passed: bool
    detail: str = ""
    seconds: float = 0.0
    data: dict = field(default_factory=dict)

    def line(self):
        return "%s  %-28s %6.2fs  %s" % ("PASS" if self.passed else "FAIL", self.name, self.seconds, self.detail)

    def to_json(self):
        return {
            "name": self.name,
            "passed": self.passed,
            "detail": self.detail,
            "data": self.data,
        }


def _run(name, fn):
    t = time.perf_counter()
    try:
        passed, detail, data = fn()
    except Exception as exc:  # a crash is a failed check, reported with its cause
        passed, detail, data = False, "error: %s" % exc, {"traceback": traceback.format_exc()}
    return CheckResult(name, bool(passed), detail, time.perf_counter() - t, data)


def examples():
    return {
        "weyl": GrPoint.weyl(),
        "cusp": cusp(),
        "double_cusp": double_cusp(),
        "cusp_at_1": cusp(1),
    }


def z_poly(*cs):
    return Poly(list(cs))


# ---------------------------------------------------------------- criteria

def check_weyl():
    t = time.perf_counter()
    W = GrPoint.weyl()
    psi = str(compute_baker(W))
    stair = spectral_algebra(W, 8).staircase
    box = operator_space_basis(W, W, 4, 4)
    mono = [DiffOp([RationalFunction(Poly.monomial(i)) if k == j else 0 for k in range(j + 1)]) for i in range(5) for j in range(5)]
    full = box.dim == 25 and all(box.contains(m) for m in mono)
    K = wave_operator(W).K
    rep = symbol_codimensions(box)
    secs = time.perf_counter() - t
    ok = (
        psi == "exp(x*z)"
        and stair == list(range(9))
        and full
        and K == PsDO.const(1)
        and rep.codim_d == 0
        and rep.codim_x == 0
        and secs < 1.0
    )
    detail = "psi=%s staircase=%s box dim=%d K=%s codims=(%d,%d) in %.2fs" % (
        psi, stair, box.dim, K, rep.codim_d, rep.codim_x, secs)
    return ok, detail, {}


def check_cusp():
    t = time.perf_counter()
    W = cusp()
    data = compute_baker(W)
    psi = str(data)
    L2 = eigen_operator(W, z_poly(0, 0, 1), data=data)
    L3 = eigen_operator(W, z_poly(0, 0, 0, 1), data=data)
    expect = DiffOp.parse("D^2 - 2*x^-2")
    comm = commutator(L2, L3)
    bc = L3 * L3 == L2 * L2 * L2
    secs = time.perf_counter() - t
    ok = psi == "exp(x*z)*(1 - 1/(x*z))" and L2 == expect and not comm and bc and secs < 5
    detail = "psi=%s L2=%s L3=%s [L2,L3]=%s L3^2=L2^3:%s" % (psi, L2, L3, format_op(comm), bc)
    return ok, detail, {}


def check_polynomial_symbols(m=6, d=8):
    bad = []
    count = 0
    for name, W in examples().items():
        box = operator_space_basis(W, W, m, d)
        for op in box.basis:
            count += 1
            try:
                s = principal_symbol(op)
            except SymbolError as exc:
                bad.append("%s: %s" % (name, exc))
                continue
            if not s.is_polynomial():
                bad.append("%s: symbol %s" % (name, s))
    return not bad, "%d basis elements over 4 points, %d violations" % (count, len(bad)), {"violations": bad}


def check_codims(m=6, d=8):
    out = []
    ok = True
    data = {}
    for name in ("cusp", "double_cusp"):
        W = examples()[name]
        rep = symbol_codimensions(operator_space_basis(W, W, m, d))
        ok = ok and rep.equal and not rep.violations
        out.append("%s: codim_d=%d codim_x=%d stable=%s" % (name, rep.codim_d, rep.codim_x, rep.stable))
        data[name] = rep.to_json()
    return ok, "; ".join(out), data


def uvw_check(m1=2, d1=2, m0=1, d0=1):
    pts = {"weyl": GrPoint.weyl(), "cusp": cusp(), "cusp_at_1": cusp(1)}
    bad = []
    n = 0
    for u, U in pts.items():
        for v, V in pts.items():
            for w, W in pts.items():
                n += 1
                A = operator_space_basis(V, U, m1, d1).basis
                B = operator_space_basis(W, V, m1, d1).basis
                prods = [a * b for a in A for b in B]
                target = operator_space_basis(W, U, m0, d0).basis
                _, _, red, _ = echelon(prods, "d")
                _, _, red2, _ = echelon(prods + target, "d")
                space, cols, red3, _ = echelon(prods, "d")
                spanned = [space.op(r, cols) for r in red3]
                into = all(maps_into(p, W, U) for p in spanned)
                if len(red2) != len(red) or not into:
                    bad.append((u, v, w))
    detail = "%d triples, factor boxes (%d,%d), target box (%d,%d), failures %s" % (n, m1, d1, m0, d0, bad or "none")
    return not bad, detail, {}


def check_gamma(rng=None):
    rng = rng or random.Random(SEED)
    bad = []
    for pname, p in (("z^2", z_poly(0, 0, 1)), ("z^3", z_poly(0, 0, 0, 1))):
        for wname, W in (("cusp", cusp()), ("double_cusp", double_cusp())):
            Wp = gamma_act_on_point(W, -p)  # gamma_p^-1 W
            for D in operator_space_basis(Wp, Wp, 3, 3).basis:
                if not maps_into(gamma_conjugate(D, p), W, W):
                    bad.append("%s %s forward %s" % (pname, wname, D))
            for E in operator_space_basis(W, W, 3, 3).basis:
                if not maps_into(gamma_conjugate(E, -p), Wp, Wp):
                    bad.append("%s %s backward %s" % (pname, wname, E))
    cm_bad = 0
    for _ in range(100):
        t = random_rank_one(rng.randint(1, 4), rng)
        for p in (z_poly(0, 0, 1), z_poly(0, 0, 0, 1)):
            if not rank_one_check(gamma_act_cm(t, p)):
                cm_bad += 1
    ok = not bad and not cm_bad
    return ok, "operator violations %d, CM rank-one failures %d/200" % (len(bad), cm_bad), {"violations": bad}


def check_bispectral(rng=None, pairs=20, cutoff=-8):
    rng = rng or random.Random(SEED)
    c = cusp()
    self_dual = bispectral_dual(c) == c
    inv = {}
    for name in ("weyl", "cusp", "double_cusp"):
        W = examples()[name]
        inv[name] = bispectral_dual(bispectral_dual(W)) == W
    data = compute_baker(c)
    bW = bispectral_dual(c, data)
    basis = operator_space_basis(c, c, 2, 2).basis
    anti = 0
    contained = 0
    for _ in range(pairs):
        d1 = sum((b.scale(rng.randint(-2, 2)) for b in rng.sample(basis, 2)), DiffOp())
        d2 = sum((b.scale(rng.randint(-2, 2)) for b in rng.sample(basis, 2)), DiffOp())
        b1 = beta_map(c, d1, cutoff, data)
        b2 = beta_map(c, d2, cutoff, data)
        b12 = beta_map(c, d1 * d2, cutoff, data)
        if b12 == b2 * b1:
            anti += 1
        if all(maps_into(x, bW, bW) for x in (b1, b2, b12)):
            contained += 1
    ok = self_dual and all(inv.values()) and anti == pairs and contained == pairs
    detail = "b(cusp)=cusp:%s b^2=id:%s anti-hom %d/%d contained %d/%d" % (
        self_dual, all(inv.values()), anti, pairs, contained, pairs)
    return ok, detail, {}


def check_counterexample():
    span = counterexample_algebra(6, 6)
    B = dual_subalgebra(span)
    return B.trivial, "span dim %d, x-degree <= 0 part: %s" % (len(span), [format_op(o) for o in B.basis]), {}


def check_schur(cutoff=-8):
    out = []
    ok = True
    x = RationalFunction.x()
    for name, u in (("x", x), ("1/(x+1)", (x + 1).inverse())):
        L = PsDO({2: 1, 0: u})
        R = psdo_nth_root(L, 2, cutoff - 2)
        sq = psdo_mul(R, R, cutoff).agrees_with(L, cutoff)
        cm = psdo_commutator(L, R, cutoff).is_zero_to(cutoff)
        ok = ok and sq and cm
        out.append("u=%s: R^2=L %s, [L,R]=0 %s" % (name, sq, cm))
    return ok, "; ".join(out) + " (to D^%d)" % cutoff, {}


def random_valuation_case(rng):
    lam = scalar(rng.randint(-3, 3)) / rng.randint(1, 3)
    lin = Poly([-lam, 1])
    n = rng.randint(1, 3)
    r = rng.randint(0, n - 1) if rng.random() < 0.8 else rng.randint(0, n + 1)
    s = rng.choice([-2, -1, 1, 2, 3])

    def unit():
        if rng.random() < 0.5:
            return Poly.const(rng.choice([1, 2, -1, 3]))
        c = [rng.randint(-2, 2) for _ in range(2)]
        p = Poly([rng.choice([1, -1, 2])]) + Poly([0, 1]) * Poly(c)
        # shift so the unit is evaluated near lam and stays nonzero there
        q = p.compose(Poly([-lam, 1]))
        return q if q(lam) else Poly.const(1)

    a = RationalFunction(lin ** r * unit())
    p = RationalFunction(lin ** s * unit()) if s > 0 else RationalFunction(unit(), lin ** (-s))
    lower = [RationalFunction(Poly([rng.randint(-2, 2), rng.randint(-1, 1)])) for _ in range(n)]
    return a, n, p, lam, lower


def check_valuation_identity(cases=50, rng=None, imax=4):
    rng = rng or random.Random(SEED)
    cross = 0
    vanish = 0
    identity = 0
    rule = 0
    for _ in range(cases):
        a, n, p, lam, lower = random_valuation_case(rng)
        rep = lemma_p_check(a, n, p, lam, imax, lower)
        cross += rep.cross_check
        rule += rep.branch_rule
        if rep.branch is not None:
            vanish += 1
            identity += bool(rep.identity)
    ok = cross == cases and rule == cases and identity == vanish
    detail = "%d cases: recursion=top coefficient %d, vanishing in %d, ns=i(n-r) in %d" % (
        cases, cross, vanish, identity)
    return ok, detail, {}


CORE = [
    ("1 weyl baseline", check_weyl),
    ("2 cusp baker", check_cusp),
    ("3 polynomial symbols", check_polynomial_symbols),
    ("4 codimension equality", check_codims),
    ("5 composition", uvw_check),
    ("6 gamma equivariance", check_gamma),
    ("7 bispectral involution", check_bispectral),
    ("8 dual subalgebra trivial", check_counterexample),
    ("9 schur root", check_schur),
    ("10 valuation identity", check_valuation_identity),
]


# ---------------------------------------------------------------- extended

def check_ch2(m=2, d=2, width=4):
    """D(C[z], V) applied to C[z] fills the low-degree part of V."""
    bad = []
    for name, V in examples().items():
        box = operator_space_basis(GrPoint.weyl(), V, m, d)
        images = [op.apply(RationalFunction(Poly.monomial(k))) for op in box.basis for k in range(width + 1)]
        if not all(membership(V, h) for h in images):
            bad.append(name + " (image outside V)")
            continue
        want = basis_up_to_degree(V, width)
        q = V.q
        polys = [(h * RationalFunction(q)).num for h in images + want if h]
        top = max(p.degree for p in polys)
        from fcw.linalg import rref

        rows = [[p[t] for t in range(top, -1, -1)] for p in polys[: len(images)]]
        red, _ = rref(rows) if rows else ([], [])
        rows2 = rows + [[p[t] for t in range(top, -1, -1)] for p in polys[len(images):]]
        red2, _ = rref(rows2)
        if len(red2) != len(red):
            bad.append(name)
    return not bad, "failures: %s" % (bad or "none"), {}


def check_fracd(m=2, d=2):
    bad = []
    for name, W in examples().items():
        p = Poly.const(1)
        for lam in W.support:
            p = p * Poly.linear_power(lam, W.N(lam) - W.k(lam))
        q = W.q
        for i in range(d + 1):
            for j in range(m + 1):
                mono = DiffOp([RationalFunction(Poly.monomial(i)) if k == j else 0 for k in range(j + 1)])
                op = DiffOp([RationalFunction(p)]) * mono * DiffOp([RationalFunction(q)])
                if not maps_into(op, W, W):
                    bad.append("%s z^%d D^%d" % (name, i, j))
    return not bad, "failures: %s" % (bad or "none"), {}


def check_windows(m=3, d=3, width=10):
    bad = []
    for a in examples().values():
        for b in examples().values():
            box = operator_space_basis(a, b, m, d)
            bad.extend(verify_on_window(box, width))
    return not bad, "%d basis elements failed the global window check" % len(bad), {}


def check_homomorphism():
    out = []
    ok = True
    for name in ("cusp", "double_cusp", "cusp_at_1"):
        W = examples()[name]
        data = compute_baker(W)
        stair = [k for k in spectral_algebra(W, 7).staircase if k > 0]
        basis = {p.degree: p for p in spectral_algebra(W, 7).basis if p.degree > 0}
        ops = {k: eigen_operator(W, basis[k], data=data) for k in stair[:3]}
        ks = sorted(ops)
        comm = all(not commutator(ops[a], ops[b]) for a in ks for b in ks)
        f, g = basis[ks[0]], basis[ks[1]]
        prod = eigen_operator(W, f * g, data=data) == ops[ks[0]] * ops[ks[1]]
        rec = not expansion_recursion_check(ops[ks[0]], f, data, 6)
        ok = ok and comm and prod and rec
        out.append("%s: commute %s, L_fg=L_f L_g %s, expansion %s" % (name, comm, prod, rec))
    return ok, "; ".join(out), {}


def check_framing():
    c = cusp()
    B = dual_subalgebra(operator_space_basis(c, c, 3, 3))
    f0 = good_framing_normalize(B)
    shifted = [DiffOp(o.coeffs) for o in B.basis]
    from fcw.odo import shift_derivation

    shifted = [shift_derivation(o, RationalFunction.x().inverse()) for o in B.basis]
    f1 = good_framing_normalize(shifted)
    ok = not f0.q and f1.q == -RationalFunction.x().inverse() and f1.normalized and f1.degrees_kept
    return ok, "q on cusp = %s, after shifting by 1/x: q = %s" % (f0.q, f1.q), {}


def check_uvw_wide():
    return uvw_check(3, 3, 2, 2)


EXTENDED = CORE + [
    ("CH2 image fills V", check_ch2),
    ("fracd containment", check_fracd),
    ("window re-check", check_windows),
    ("L_f homomorphism", check_homomorphism),
    ("good framing", check_framing),
    ("composition wide", check_uvw_wide),
]

SUITES = {"core": CORE, "extended": EXTENDED}


def run_suite(name="core"):
    if name not in SUITES:
        raise KeyError("unknown suite %r (choose from %s)" % (name, ", ".join(sorted(SUITES))))
    return [_run(label, fn) for label, fn in SUITES[name]]
