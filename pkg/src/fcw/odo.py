"""
Ordinary differential operators  sum a_i(x) D^i  with rational coefficients.

Coefficients always sit to the left of the powers of ``D``; products are
normal-ordered with  D f = f D + f'.
"""

from dataclasses import dataclass, field

from fcw.exact import (
    NEG_INF,
    ONE,
    ZERO,
    Poly,
    RationalFunction,
    binom,
    format_rf,
    parse_expr,
    rf,
    scalar,
)

DEFAULT_KMAX = 16


class SymbolError(ValueError):
    """Leading coefficient is not a polynomial, so there is no symbol in C[x, xi]."""

    def __init__(self, coefficient, order):
        self.coefficient = coefficient
        self.order = order
        super().__init__("leading coefficient %s of D^%d is not a polynomial" % (coefficient, order))


def _derivatives(f, n):
    out = [f]
    for _ in range(n):
        out.append(out[-1].derivative())
    return out


class DiffOp:
    __slots__ = ("coeffs",)

    def __init__(self, coeffs=()):
        cs = [rf(c) for c in coeffs]
        while cs and not cs[-1]:
            cs.pop()
        self.coeffs = tuple(cs)

    @classmethod
    def _raw(cls, cs):
        cs = list(cs)
        while cs and not cs[-1]:
            cs.pop()
        op = object.__new__(cls)
        op.coeffs = tuple(cs)
        return op

    @classmethod
    def d(cls):
        return cls._raw([RationalFunction.const(0), RationalFunction.const(1)])

    @classmethod
    def x(cls):
        return cls._raw([RationalFunction.x()])

    @classmethod
    def const(cls, c):
        return cls._raw([RationalFunction.const(c)])

    @classmethod
    def parse(cls, text, var="x", dvar="D"):
        """Parse e.g. ``"x^2*D^2 + 4*x*D + 2"``; products are taken in order."""
        return parse_expr(text, {var: cls.x(), dvar: cls.d()}, cls.const(1))

    @property
    def order(self):
        """Order in D; -1 for the zero operator."""
        return len(self.coeffs) - 1

    def is_zero(self):
        return not self.coeffs

    def __bool__(self):
        return bool(self.coeffs)

    def coeff(self, i):
        if 0 <= i < len(self.coeffs):
            return self.coeffs[i]
        return RationalFunction.const(0)

    def lc(self):
        if not self.coeffs:
            raise ValueError("zero operator has no leading coefficient")
        return self.coeffs[-1]

    def x_degree(self):
        if not self.coeffs:
            return NEG_INF
        return max(c.degree for c in self.coeffs)

    def __eq__(self, other):
        o = _as_op(other)
        if o is None:
            return NotImplemented
        return self.coeffs == o.coeffs

    def __hash__(self):
        return hash(self.coeffs)

    def __repr__(self):
        return "DiffOp(%s)" % format_op(self)

    def __str__(self):
        return format_op(self)

    def __neg__(self):
        return DiffOp._raw([-c for c in self.coeffs])

    def __add__(self, other):
        o = _as_op(other)
        if o is None:
            return NotImplemented
        a, b = self.coeffs, o.coeffs
        if len(a) < len(b):
            a, b = b, a
        out = list(a)
        for i, c in enumerate(b):
            out[i] = out[i] + c
        return DiffOp._raw(out)

    __radd__ = __add__

    def __sub__(self, other):
        o = _as_op(other)
        if o is None:
            return NotImplemented
        return self + (-o)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        o = _as_op(other)
        if o is None:
            return NotImplemented
        return odo_mul(self, o)

    def __rmul__(self, other):
        o = _as_op(other)
        if o is None:
            return NotImplemented
        return odo_mul(o, self)

    def __pow__(self, k):
        if k < 0:
            if self.order == 0:
                return DiffOp._raw([self.coeffs[0] ** k])
            raise ValueError("negative power of a differential operator")
        result = DiffOp.const(1)
        for _ in range(k):
            result = result * self
        return result

    def scale(self, c):
        c = rf(c)
        return DiffOp._raw([c * a for a in self.coeffs])

    def apply(self, f):
        """Action on a rational function."""
        f = rf(f)
        total = RationalFunction.const(0)
        g = f
        for i, a in enumerate(self.coeffs):
            if i:
                g = g.derivative()
            if a:
                total = total + a * g
        return total

    def to_json(self):
        return [format_rf(c) for c in self.coeffs]


def _as_op(v):
    if isinstance(v, DiffOp):
        return v
    if isinstance(v, RationalFunction):
        return DiffOp._raw([v])
    try:
        return DiffOp._raw([rf(v)])
    except TypeError:
        return None


def odo_mul(a, b):
    """Product in C(x)[D]."""
    if not a.coeffs or not b.coeffs:
        return DiffOp._raw([])
    n = a.order
    derivs = [_derivatives(bj, n) for bj in b.coeffs]
    out = [RationalFunction.const(0)] * (a.order + b.order + 1)
    for i, ai in enumerate(a.coeffs):
        if not ai:
            continue
        for j, dj in enumerate(derivs):
            for k in range(i + 1):
                d = dj[k]
                if not d:
                    continue
                c = binom(i, k)
                out[i + j - k] = out[i + j - k] + ai * d * c
    return DiffOp._raw(out)


def commutator(a, b):
    return a * b - b * a


@dataclass
class AdNilpotencyReport:
    """Least k with (ad b)^k (a) = 0, or None if not reached within kmax."""

    degree: object
    chain: list = field(default_factory=list)
    kmax: int = DEFAULT_KMAX

    @property
    def nilpotent(self):
        return self.degree is not None

    def to_json(self):
        return {
            "degree": self.degree,
            "nilpotent": self.nilpotent,
            "kmax": self.kmax,
            "chain": [op.to_json() for op in self.chain],
        }


def ad_nilpotency_degree(b, a, kmax=DEFAULT_KMAX):
    if kmax < 1:
        raise ValueError("kmax must be at least 1")
    if not a:
        return AdNilpotencyReport(0, [], kmax)
    chain = []
    cur = a
    for k in range(1, kmax + 1):
        cur = commutator(b, cur)
        chain.append(cur)
        if not cur:
            return AdNilpotencyReport(k, chain, kmax)
    return AdNilpotencyReport(None, chain, kmax)


class BiSymbol:
    """Finitely supported sum of c * x^i xi^k, keyed by (i, k)."""

    __slots__ = ("terms",)

    def __init__(self, terms=None):
        self.terms = {k: scalar(v) for k, v in (terms or {}).items() if v}

    def __eq__(self, other):
        return isinstance(other, BiSymbol) and self.terms == other.terms

    def __hash__(self):
        return hash(frozenset(self.terms.items()))

    def __bool__(self):
        return bool(self.terms)

    def __mul__(self, other):
        out = {}
        for (i1, k1), c1 in self.terms.items():
            for (i2, k2), c2 in other.terms.items():
                key = (i1 + i2, k1 + k2)
                out[key] = out.get(key, ZERO) + c1 * c2
        return BiSymbol(out)

    def monomials(self):
        return sorted(self.terms)

    def is_polynomial(self):
        return all(i >= 0 and k >= 0 for i, k in self.terms)

    def __repr__(self):
        return "BiSymbol(%s)" % self

    def __str__(self):
        if not self.terms:
            return "0"
        parts = []
        for (i, k) in sorted(self.terms, key=lambda t: (-t[1], -t[0])):
            c = self.terms[(i, k)]
            mono = []
            if i:
                mono.append("x" if i == 1 else "x^%d" % i)
            if k:
                mono.append("xi" if k == 1 else "xi^%d" % k)
            body = "*".join(mono)
            if not body:
                body = str(abs(c))
            elif abs(c) != 1:
                body = "%s*%s" % (abs(c), body)
            parts.append(("-" if c < 0 else "+", body))
        out = ("-" if parts[0][0] == "-" else "") + parts[0][1]
        for s, b in parts[1:]:
            out += " %s %s" % (s, b)
        return out

    def to_json(self):
        return [[i, k, str(self.terms[(i, k)])] for (i, k) in sorted(self.terms)]


def principal_symbol(a):
    """a(x) xi^k for leading term a(x) D^k; a must be a polynomial."""
    if not a:
        raise ValueError("zero operator has no principal symbol")
    lead = a.lc()
    if not lead.is_polynomial():
        raise SymbolError(lead, a.order)
    k = a.order
    p = lead.num.scale(ONE / lead.den.lc())
    return BiSymbol({(i, k): c for i, c in enumerate(p.cs) if c})


def x_symbol_and_degree(a):
    """(k, x-symbol): k = max deg_x of the coefficients, symbol = their top parts."""
    if not a:
        raise ValueError("x-degree of the zero operator is -infinity")
    k = a.x_degree()
    terms = {}
    for i, c in enumerate(a.coeffs):
        if c and c.degree == k:
            terms[(k, i)] = c.num.lc() / c.den.lc()
    return k, BiSymbol(terms)


def substitute_derivation(a, repl):
    """sum a_i repl^i, for repl a first-order operator D + q."""
    result = DiffOp._raw([])
    power = DiffOp.const(1)
    for i, c in enumerate(a.coeffs):
        if i:
            power = power * repl
        if c:
            result = result + DiffOp._raw([c]) * power
    return result


def gamma_conjugate(a, p):
    """Image under x -> x, D -> D - p'(x): formal conjugation by exp(p)."""
    p = p if isinstance(p, Poly) else Poly(p)
    dp = rf(p.derivative())
    return substitute_derivation(a, DiffOp._raw([-dp, RationalFunction.const(1)]))


def shift_derivation(a, q):
    """Rewrite a in the generator D' = D + q (substitute D = D' - q)."""
    q = rf(q)
    return substitute_derivation(a, DiffOp._raw([-q, RationalFunction.const(1)]))


def format_op(a, var="x", dvar="D"):
    if not a:
        return "0"
    parts = []
    for i in range(a.order, -1, -1):
        c = a.coeffs[i]
        if not c:
            continue
        dpart = "" if i == 0 else (dvar if i == 1 else "%s^%d" % (dvar, i))
        cs = format_rf(c, var)
        neg = False
        if c.is_constant():
            v = c.constant_value()
            neg = v < 0
            mag = str(abs(v))
            body = dpart if (dpart and mag == "1") else (mag + ("*" + dpart if dpart else ""))
        else:
            if cs.startswith("-") and " " not in cs:
                neg, cs = True, cs[1:]
            elif " " in cs and not cs.startswith("("):
                cs = "(%s)" % cs
            body = cs + ("*" + dpart if dpart else "")
        parts.append(("-" if neg else "+", body))
    out = ("-" if parts[0][0] == "-" else "") + parts[0][1]
    for s, b in parts[1:]:
        out += " %s %s" % (s, b)
    return out
