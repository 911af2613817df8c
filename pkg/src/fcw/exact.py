"""
Exact univariate arithmetic over the rationals.

Scalars are ``gmpy2.mpq``.  Polynomials are dense and immutable, stored low
degree first.  Rational functions are kept reduced with a monic denominator,
so two equal functions compare equal syntactically.
"""

import math
from fractions import Fraction
from functools import lru_cache

from gmpy2 import mpq

Q = mpq
ZERO = mpq(0)
ONE = mpq(1)

#: degree of the zero rational function
NEG_INF = -math.inf


def scalar(v):
    """Coerce ints, Fractions, mpq and "p/q" strings to an exact scalar."""
    if isinstance(v, type(ZERO)):
        return v
    if isinstance(v, (int, Fraction)):
        return mpq(v)
    if isinstance(v, str):
        s = v.strip()
        if not s:
            raise ValueError("empty scalar string")
        try:
            return mpq(Fraction(s))
        except (ValueError, ZeroDivisionError) as exc:
            raise ValueError("not an exact rational: %r" % v) from exc
    raise TypeError("cannot make a scalar from %r" % (v,))


def scalar_str(v):
    return str(scalar(v))


@lru_cache(maxsize=None)
def binom(n, k):
    """Generalized binomial coefficient C(n, k) for integer n (possibly negative), k >= 0."""
    if k < 0:
        return 0
    r = Fraction(1)
    for i in range(k):
        r = r * (n - i) / (i + 1)
    assert r.denominator == 1
    return int(r)


def _trim(cs):
    n = len(cs)
    while n and not cs[n - 1]:
        n -= 1
    return tuple(cs[:n])


class Poly:
    """Dense univariate polynomial with rational coefficients."""

    __slots__ = ("cs",)

    def __init__(self, cs=()):
        self.cs = _trim([scalar(c) for c in cs])

    @classmethod
    def _raw(cls, cs):
        p = object.__new__(cls)
        p.cs = _trim(cs)
        return p

    @classmethod
    def const(cls, c):
        return cls._raw([scalar(c)])

    @classmethod
    def x(cls):
        return cls._raw([ZERO, ONE])

    @classmethod
    def monomial(cls, k, c=1):
        return cls._raw([ZERO] * k + [scalar(c)])

    @classmethod
    def linear_power(cls, lam, k):
        """(x - lam)**k"""
        base = cls._raw([-scalar(lam), ONE])
        return base ** k

    @property
    def degree(self):
        return len(self.cs) - 1

    def is_zero(self):
        return not self.cs

    def __bool__(self):
        return bool(self.cs)

    def lc(self):
        return self.cs[-1] if self.cs else ZERO

    def __getitem__(self, i):
        return self.cs[i] if 0 <= i < len(self.cs) else ZERO

    def __eq__(self, other):
        if isinstance(other, Poly):
            return self.cs == other.cs
        if isinstance(other, (int, Fraction, type(ZERO))):
            return self.cs == _trim([scalar(other)])
        return NotImplemented

    def __hash__(self):
        return hash(self.cs)

    def __repr__(self):
        return "Poly(%s)" % format_poly(self)

    def __str__(self):
        return format_poly(self)

    def __neg__(self):
        return Poly._raw([-c for c in self.cs])

    def __add__(self, other):
        other = _as_poly(other)
        if other is None:
            return NotImplemented
        a, b = self.cs, other.cs
        if len(a) < len(b):
            a, b = b, a
        out = list(a)
        for i, c in enumerate(b):
            out[i] = out[i] + c
        return Poly._raw(out)

    __radd__ = __add__

    def __sub__(self, other):
        other = _as_poly(other)
        if other is None:
            return NotImplemented
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        other = _as_poly(other)
        if other is None:
            return NotImplemented
        a, b = self.cs, other.cs
        if not a or not b:
            return Poly._raw([])
        out = [ZERO] * (len(a) + len(b) - 1)
        for i, ca in enumerate(a):
            if not ca:
                continue
            for j, cb in enumerate(b):
                out[i + j] += ca * cb
        return Poly._raw(out)

    __rmul__ = __mul__

    def __pow__(self, k):
        if k < 0:
            raise ValueError("negative power of a polynomial")
        result = Poly._raw([ONE])
        base = self
        while k:
            if k & 1:
                result = result * base
            base = base * base
            k >>= 1
        return result

    def scale(self, c):
        c = scalar(c)
        return Poly._raw([c * v for v in self.cs])

    def divmod(self, other):
        if not other:
            raise ZeroDivisionError("polynomial division by zero")
        r = list(self.cs)
        db = other.degree
        inv = ONE / other.lc()
        if len(r) - 1 < db:
            return Poly._raw([]), self
        q = [ZERO] * (len(r) - db)
        bcs = other.cs
        for k in range(len(r) - 1 - db, -1, -1):
            c = r[k + db] * inv
            q[k] = c
            if c:
                for j in range(db + 1):
                    r[k + j] -= c * bcs[j]
        return Poly._raw(q), Poly._raw(r[:db])

    def __floordiv__(self, other):
        return self.divmod(_as_poly(other))[0]

    def __mod__(self, other):
        return self.divmod(_as_poly(other))[1]

    def monic(self):
        if not self.cs:
            return self
        return self.scale(ONE / self.lc())

    def derivative(self, k=1):
        cs = self.cs
        for _ in range(k):
            cs = [i * cs[i] for i in range(1, len(cs))]
        return Poly._raw(list(cs))

    def __call__(self, x):
        acc = ZERO if not isinstance(x, Poly) else Poly._raw([])
        for c in reversed(self.cs):
            acc = acc * x + c
        return acc

    def compose(self, other):
        acc = Poly._raw([])
        for c in reversed(self.cs):
            acc = acc * other + Poly.const(c)
        return acc

    def taylor(self, lam):
        """Coefficients of self in powers of (x - lam)."""
        lam = scalar(lam)
        cs = list(self.cs)
        n = len(cs)
        # repeated synthetic division
        for i in range(n):
            for j in range(n - 2, i - 1, -1):
                cs[j] += lam * cs[j + 1]
        return cs

    def valuation_at(self, lam):
        if not self.cs:
            raise ValueError("valuation of the zero polynomial")
        t = self.taylor(lam)
        for i, c in enumerate(t):
            if c:
                return i
        raise AssertionError("unreachable")

    def to_json(self):
        return [str(c) for c in self.cs]

    @classmethod
    def from_json(cls, data):
        if not isinstance(data, list):
            raise ValueError("polynomial must be a list of coefficient strings")
        return cls([scalar(c) for c in data])


def _as_poly(v):
    if isinstance(v, Poly):
        return v
    if isinstance(v, (int, Fraction, type(ZERO))):
        return Poly._raw([scalar(v)])
    return None


def poly_gcd(a, b):
    """Monic gcd."""
    while b:
        a, b = b, a % b
    return a.monic()


def poly_lcm(a, b):
    if not a or not b:
        return Poly._raw([])
    return (a * b // poly_gcd(a, b)).monic()


class RationalFunction:
    """Reduced quotient of polynomials with monic denominator."""

    __slots__ = ("num", "den")

    def __init__(self, num, den=None):
        num = _as_poly(num) if not isinstance(num, Poly) else num
        if num is None:
            raise TypeError("bad numerator")
        den = Poly._raw([ONE]) if den is None else (_as_poly(den) if not isinstance(den, Poly) else den)
        if den is None or not den:
            raise ZeroDivisionError("zero denominator")
        if not num:
            self.num, self.den = num, Poly._raw([ONE])
            return
        if den.degree > 0:
            g = poly_gcd(num, den)
            if g.degree > 0:
                num = num // g
                den = den // g
        lc = den.lc()
        if lc != 1:
            inv = ONE / lc
            num, den = num.scale(inv), den.scale(inv)
        self.num, self.den = num, den

    @classmethod
    def _raw(cls, num, den):
        r = object.__new__(cls)
        r.num, r.den = num, den
        return r

    @classmethod
    def x(cls):
        return cls._raw(Poly.x(), Poly.const(1))

    @classmethod
    def const(cls, c):
        return cls._raw(Poly.const(c), Poly.const(1))

    def is_zero(self):
        return not self.num

    def __bool__(self):
        return bool(self.num)

    def is_polynomial(self):
        return self.den.degree == 0

    def is_constant(self):
        return self.den.degree == 0 and self.num.degree <= 0

    def constant_value(self):
        if not self.is_constant():
            raise ValueError("not a constant: %s" % self)
        return self.num[0]

    @property
    def degree(self):
        """deg num - deg den; NEG_INF for zero."""
        if not self.num:
            return NEG_INF
        return self.num.degree - self.den.degree

    def __eq__(self, other):
        if isinstance(other, RationalFunction):
            return self.num == other.num and self.den == other.den
        o = _as_rf(other)
        if o is None:
            return NotImplemented
        return self == o

    def __hash__(self):
        return hash((self.num, self.den))

    def __repr__(self):
        return "RationalFunction(%s)" % format_rf(self)

    def __str__(self):
        return format_rf(self)

    def __neg__(self):
        return RationalFunction._raw(-self.num, self.den)

    def __add__(self, other):
        other = _as_rf(other)
        if other is None:
            return NotImplemented
        if not other.num:
            return self
        if not self.num:
            return other
        if self.den == other.den:
            if self.den.degree == 0:
                return RationalFunction._raw(self.num + other.num, self.den)
            return RationalFunction(self.num + other.num, self.den)
        return RationalFunction(self.num * other.den + other.num * self.den, self.den * other.den)

    __radd__ = __add__

    def __sub__(self, other):
        other = _as_rf(other)
        if other is None:
            return NotImplemented
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        other = _as_rf(other)
        if other is None:
            return NotImplemented
        if not self.num or not other.num:
            return RationalFunction._raw(Poly._raw([]), Poly.const(1))
        if self.den.degree == 0 and other.den.degree == 0:
            return RationalFunction._raw(self.num * other.num, self.den)
        return RationalFunction(self.num * other.num, self.den * other.den)

    __rmul__ = __mul__

    def inverse(self):
        if not self.num:
            raise ZeroDivisionError("inverse of zero rational function")
        return RationalFunction(self.den, self.num)

    def __truediv__(self, other):
        other = _as_rf(other)
        if other is None:
            return NotImplemented
        return self * other.inverse()

    def __rtruediv__(self, other):
        return _as_rf(other) * self.inverse()

    def __pow__(self, k):
        if k < 0:
            return self.inverse() ** (-k)
        return RationalFunction._raw(self.num ** k, self.den ** k)

    def derivative(self, k=1):
        r = self
        for _ in range(k):
            if r.den.degree == 0:
                r = RationalFunction._raw(r.num.derivative(), r.den)
            else:
                r = RationalFunction(r.num.derivative() * r.den - r.num * r.den.derivative(), r.den * r.den)
        return r

    def __call__(self, x):
        d = self.den(x)
        if not d:
            raise ZeroDivisionError("pole at %s" % x)
        return self.num(x) / d

    def compose_poly(self, p):
        """self(p(x)) for a polynomial p."""
        return RationalFunction(self.num.compose(p), self.den.compose(p))

    def valuation_at(self, lam):
        return valuation_at(self, lam)

    def to_json(self):
        return {"num": self.num.to_json(), "den": self.den.to_json()}


def _as_rf(v):
    if isinstance(v, RationalFunction):
        return v
    if isinstance(v, Poly):
        return RationalFunction._raw(v, Poly.const(1))
    if isinstance(v, (int, Fraction, type(ZERO))):
        return RationalFunction._raw(Poly._raw([scalar(v)]), Poly.const(1))
    return None


def rf(v):
    """Coerce to RationalFunction."""
    r = _as_rf(v)
    if r is None:
        if isinstance(v, str):
            return RationalFunction.const(scalar(v))
        raise TypeError("cannot make a rational function from %r" % (v,))
    return r


def reduce_ratfunc(n, d):
    """Canonical reduced form of n/d (monic denominator, coprime pair)."""
    n, d = _as_poly(n), _as_poly(d)
    if d is None or not d:
        raise ZeroDivisionError("zero denominator")
    return RationalFunction(n, d)


def valuation_at(f, lam):
    """Order of vanishing of f at lam (negative for a pole)."""
    f = rf(f)
    if not f:
        raise ValueError("valuation of the zero function is undefined")
    lam = scalar(lam)
    return f.num.valuation_at(lam) - f.den.valuation_at(lam)


def _series_inverse(cs, n):
    """First n coefficients of 1/(power series cs), cs[0] != 0."""
    inv0 = ONE / cs[0]
    out = [inv0]
    for k in range(1, n):
        s = ZERO
        for j in range(1, min(k, len(cs) - 1) + 1):
            s += cs[j] * out[k - j]
        out.append(-s * inv0)
    return out


def _series_mul(a, b, n):
    out = [ZERO] * n
    for i, ca in enumerate(a[:n]):
        if not ca:
            continue
        for j in range(min(len(b), n - i)):
            out[i + j] += ca * b[j]
    return out


def laurent_coeffs(f, lam, lo, hi):
    """Coefficients of (x-lam)^i for lo <= i <= hi in the Laurent expansion of f at lam."""
    f = rf(f)
    if hi < lo:
        return []
    if not f:
        return [ZERO] * (hi - lo + 1)
    lam = scalar(lam)
    tn = f.num.taylor(lam)
    td = f.den.taylor(lam)
    vn = next(i for i, c in enumerate(tn) if c)
    vd = next(i for i, c in enumerate(td) if c)
    k = vn - vd
    if hi < k:
        return [ZERO] * (hi - lo + 1)
    n = hi - k + 1
    s = _series_mul(tn[vn:], _series_inverse(td[vd:], n), n)
    out = []
    for i in range(lo, hi + 1):
        j = i - k
        out.append(s[j] if 0 <= j < n else ZERO)
    return out


def laurent_expand(f, lam, terms):
    """(k, [c_k, ..., c_{k+terms-1}]) with k the valuation of f at lam."""
    f = rf(f)
    if not f:
        raise ValueError("Laurent expansion of zero has no leading order")
    k = valuation_at(f, lam)
    return k, laurent_coeffs(f, lam, k, k + terms - 1)


def laurent_at_infinity(f, lo, hi):
    """Coefficients c_i of x^i, lo <= i <= hi, in the expansion of f at infinity
    (f = sum_{i <= deg f} c_i x^i)."""
    f = rf(f)
    if hi < lo:
        return []
    if not f:
        return [ZERO] * (hi - lo + 1)
    # f(1/w) = w^(dd - dn) * rev(num)(w) / rev(den)(w)
    rn = list(reversed(f.num.cs))
    rd = list(reversed(f.den.cs))
    top = f.degree
    n = top - lo + 1
    if n <= 0:
        return [ZERO] * (hi - lo + 1)
    s = _series_mul(rn, _series_inverse(rd, n), n)
    out = []
    for i in range(lo, hi + 1):
        j = top - i
        out.append(s[j] if 0 <= j < n else ZERO)
    return out


def partial_fractions(f, poles):
    """Split f = poly + sum c[(lam, j)] (x - lam)^(-j).

    Every pole of f must be in ``poles``; otherwise ValueError naming the pole.
    """
    f = rf(f)
    poles = [scalar(p) for p in poles]
    den = f.den
    mult = {}
    for lam in poles:
        if lam in mult:
            continue
        m = 0
        while den.degree > 0 and not den(lam):
            den = den // Poly.linear_power(lam, 1)
            m += 1
        mult[lam] = m
    if den.degree > 0:
        roots = rational_roots(den)
        bad = roots[0] if roots else "a root of %s" % den
        raise ValueError("pole outside the given list: %s" % bad)
    poly_part = f.num.divmod(f.den)[0]
    coeffs = {}
    for lam, m in mult.items():
        if m == 0:
            continue
        cs = laurent_coeffs(f, lam, -m, -1)
        for i, c in enumerate(cs):
            j = m - i
            if c:
                coeffs[(lam, j)] = c
    return poly_part, coeffs


def from_partial_fractions(poly_part, coeffs):
    total = rf(poly_part)
    for (lam, j), c in coeffs.items():
        total = total + RationalFunction(Poly.const(c), Poly.linear_power(lam, j))
    return total


def _divisors(n):
    n = abs(n)
    small, large = [], []
    i = 1
    while i * i <= n:
        if n % i == 0:
            small.append(i)
            if i * i != n:
                large.append(n // i)
        i += 1
    return small + large[::-1]


def rational_roots(p):
    """Distinct rational roots of p, sorted ascending."""
    if not p:
        raise ValueError("roots of the zero polynomial")
    roots = []
    cs = list(p.cs)
    shift = 0
    while cs and not cs[0]:
        cs.pop(0)
        shift += 1
    if shift:
        roots.append(ZERO)
    if len(cs) <= 1:
        return sorted(roots)
    den = 1
    for c in cs:
        den = den * c.denominator // math.gcd(den, c.denominator)
    ints = [int(c * den) for c in cs]
    g = 0
    for c in ints:
        g = math.gcd(g, c)
    ints = [c // g for c in ints]
    q = Poly._raw([mpq(c) for c in ints])
    for a in _divisors(ints[0]):
        for b in _divisors(ints[-1]):
            for cand in (mpq(a, b), mpq(-a, b)):
                if cand not in roots and not q(cand):
                    roots.append(cand)
    return sorted(roots)


# ---------------------------------------------------------------- printing

def _coef_str(c):
    c = scalar(c)
    return str(c)


def _atom(v):
    s = str(v)
    if "/" in s or s.startswith("-"):
        return "(%s)" % s
    return s


def format_poly(p, var="x"):
    if not p:
        return "0"
    parts = []
    for k in range(p.degree, -1, -1):
        c = p[k]
        if not c:
            continue
        if k == 0:
            mon = ""
        elif k == 1:
            mon = var
        else:
            mon = "%s^%d" % (var, k)
        mag = abs(c)
        if mon and mag == 1:
            body = mon
        elif mon:
            body = "%s*%s" % (_coef_str(mag), mon)
        else:
            body = _coef_str(mag)
        sign = "-" if c < 0 else "+"
        parts.append((sign, body))
    out = ("-" if parts[0][0] == "-" else "") + parts[0][1]
    for sign, body in parts[1:]:
        out += " %s %s" % (sign, body)
    return out


def format_rf(f, var="x"):
    if f.is_polynomial():
        return format_poly(f.num.scale(ONE / f.den.lc()), var)
    num = format_poly(f.num, var)
    den = format_factored(f.den, var)
    if " " in num:
        num = "(%s)" % num
    return "%s/%s" % (num, den)


def factor_strings(den, var="x"):
    """Rational linear factors of a monic polynomial as strings, plus any remainder."""
    rest = den
    factors = []
    for lam in rational_roots(den):
        m = 0
        while rest.degree > 0 and not rest(lam):
            rest = rest // Poly.linear_power(lam, 1)
            m += 1
        if lam == 0:
            base = var
        elif lam > 0:
            base = "(%s - %s)" % (var, lam)
        else:
            base = "(%s + %s)" % (var, -lam)
        factors.append(base if m == 1 else "%s^%d" % (base, m))
    if rest.degree > 0:
        factors.append("(%s)" % format_poly(rest, var))
    return factors


def format_factored(den, var="x"):
    """Render a monic polynomial, factoring out rational linear factors."""
    factors = factor_strings(den, var)
    if len(factors) == 1:
        return factors[0]
    return "(%s)" % "*".join(factors)


# ---------------------------------------------------------------- parsing

def parse_expr(text, atoms, one):
    """Evaluate a small arithmetic expression over a ring.

    ``atoms`` maps names to ring elements, ``one`` is the ring's unit.
    Integers and ``+ - * / ^`` with parentheses are understood; ``a/b``
    means ``a * b**-1`` and needs an invertible ``b``.
    """
    import ast

    try:
        tree = ast.parse(text.replace("^", "**"), mode="eval")
    except SyntaxError as exc:
        raise ValueError("cannot parse %r" % text) from exc

    def ev(node):
        if isinstance(node, ast.Expression):
            return ev(node.body)
        if isinstance(node, ast.Constant) and isinstance(node.value, int):
            return one * mpq(node.value)
        if isinstance(node, ast.Name):
            if node.id not in atoms:
                raise ValueError("unknown symbol %r in %r" % (node.id, text))
            return atoms[node.id]
        if isinstance(node, ast.UnaryOp) and isinstance(node.op, (ast.USub, ast.UAdd)):
            v = ev(node.operand)
            return -v if isinstance(node.op, ast.USub) else v
        if isinstance(node, ast.BinOp):
            if isinstance(node.op, ast.Pow):
                e = node.right
                sign = 1
                if isinstance(e, ast.UnaryOp) and isinstance(e.op, ast.USub):
                    sign, e = -1, e.operand
                if not (isinstance(e, ast.Constant) and isinstance(e.value, int)):
                    raise ValueError("exponents must be integers in %r" % text)
                return ev(node.left) ** (sign * e.value)
            a, b = ev(node.left), ev(node.right)
            if isinstance(node.op, ast.Add):
                return a + b
            if isinstance(node.op, ast.Sub):
                return a - b
            if isinstance(node.op, ast.Mult):
                return a * b
            if isinstance(node.op, ast.Div):
                return a * b ** -1
        raise ValueError("unsupported syntax in %r" % text)

    return ev(tree)


def parse_rf(text, var="x"):
    """Parse a rational function such as ``"(x^2 + 1)/(x - 3)^2"``."""
    one = RationalFunction.const(1)
    return parse_expr(text, {var: RationalFunction.x()}, one)
