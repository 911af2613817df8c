"""
Truncated pseudo-differential operators  sum_{i <= n} a_i(x) D^i.

Every PsDO carries ``low``: the lowest power of D whose coefficient is
trusted.  Terms below ``low`` are unknown, not zero.  ``low is None`` means
the series is exact (finitely many terms, nothing discarded).

Products use the generalized Leibniz rule

    D^i f = sum_{k >= 0} C(i, k) f^(k) D^(i - k),

valid for negative i as well.
"""

import math

from fcw.exact import ONE, RationalFunction, binom, format_rf, laurent_at_infinity, rf
from fcw.odo import DiffOp

DEFAULT_DEPTH = 8


class InsufficientDepth(ValueError):
    def __init__(self, required, requested):
        self.required = required
        self.requested = requested
        super().__init__(
            "inputs are only determined down to D^%s; cannot compute to D^%s (need deeper inputs)"
            % (required, requested)
        )


def _win(low):
    return -math.inf if low is None else low


class PsDO:
    __slots__ = ("terms", "low")

    def __init__(self, terms=None, low=None):
        out = {}
        for i, c in (terms or {}).items():
            c = rf(c)
            if c and (low is None or i >= low):
                out[int(i)] = c
        self.terms = out
        self.low = low

    @classmethod
    def _raw(cls, terms, low):
        p = object.__new__(cls)
        p.terms = {i: c for i, c in terms.items() if c and (low is None or i >= low)}
        p.low = low
        return p

    @classmethod
    def from_diffop(cls, op):
        return cls._raw({i: c for i, c in enumerate(op.coeffs)}, None)

    @classmethod
    def d(cls, k=1):
        return cls._raw({k: RationalFunction.const(1)}, None)

    @classmethod
    def const(cls, c):
        return cls._raw({0: rf(c)}, None)

    @property
    def top(self):
        """Highest power with nonzero coefficient; -inf for zero."""
        return max(self.terms) if self.terms else -math.inf

    @property
    def exact(self):
        return self.low is None

    def __bool__(self):
        return bool(self.terms)

    def coeff(self, i):
        if self.low is not None and i < self.low:
            raise InsufficientDepth(self.low, i)
        return self.terms.get(i, RationalFunction.const(0))

    def lc(self):
        if not self.terms:
            raise ValueError("zero series has no leading coefficient")
        return self.terms[self.top]

    def truncate(self, cutoff):
        low = cutoff if self.low is None else max(self.low, cutoff)
        return PsDO._raw(self.terms, low)

    def has_negative_part(self):
        return any(i < 0 for i in self.terms)

    def is_differential(self):
        return self.low is None and not self.has_negative_part()

    def __neg__(self):
        return PsDO._raw({i: -c for i, c in self.terms.items()}, self.low)

    def __add__(self, other):
        other = _as_psdo(other)
        if self.low is None:
            low = other.low
        elif other.low is None:
            low = self.low
        else:
            low = max(self.low, other.low)
        out = dict(self.terms)
        for i, c in other.terms.items():
            out[i] = out[i] + c if i in out else c
        return PsDO._raw(out, low)

    __radd__ = __add__

    def __sub__(self, other):
        return self + (-_as_psdo(other))

    def __rsub__(self, other):
        return _as_psdo(other) - self

    def __mul__(self, other):
        return psdo_mul(self, _as_psdo(other))

    def __rmul__(self, other):
        return psdo_mul(_as_psdo(other), self)

    def agrees_with(self, other, cutoff):
        """Coefficients agree for every power >= cutoff (both must be known there)."""
        other = _as_psdo(other)
        for s in (self, other):
            if s.low is not None and s.low > cutoff:
                raise InsufficientDepth(s.low, cutoff)
        keys = {i for i in self.terms if i >= cutoff} | {i for i in other.terms if i >= cutoff}
        return all(self.coeff(i) == other.coeff(i) for i in keys)

    def is_zero_to(self, cutoff):
        return self.agrees_with(PsDO._raw({}, None), cutoff)

    def __eq__(self, other):
        if not isinstance(other, PsDO):
            try:
                other = _as_psdo(other)
            except TypeError:
                return NotImplemented
        return self.low == other.low and self.terms == other.terms

    def __hash__(self):
        return hash((self.low, frozenset(self.terms.items())))

    def __repr__(self):
        return "PsDO(%s)" % format_psdo(self)

    def __str__(self):
        return format_psdo(self)

    def to_json(self):
        return {
            "terms": [[i, format_rf(self.terms[i])] for i in sorted(self.terms, reverse=True)],
            "cutoff": self.low,
        }


def _as_psdo(v):
    if isinstance(v, PsDO):
        return v
    if isinstance(v, DiffOp):
        return PsDO.from_diffop(v)
    return PsDO._raw({0: rf(v)}, None)


def _product_is_finite(a, b):
    if not any(i < 0 for i in a.terms):
        return True
    return all(c.is_constant() for c in b.terms.values())


def psdo_mul(a, b, cutoff=None):
    """a*b, correct for every power >= cutoff.

    Raises InsufficientDepth when the inputs' windows cannot determine the
    product that deep.  With ``cutoff=None`` the deepest determined window
    is used (an exact result when the product is a finite series).
    """
    if not a.terms or not b.terms:
        lows = [s.low for s in (a, b) if s.low is not None]
        low = cutoff if cutoff is not None else (max(lows) if lows else None)
        return PsDO._raw({}, low)
    required = max(_win(a.low) + b.top, a.top + _win(b.low))
    if cutoff is None:
        if required == -math.inf:
            if not _product_is_finite(a, b):
                raise ValueError("product of exact series is infinite; a cutoff is required")
            low = None
        else:
            low = int(required)
    else:
        if cutoff < required:
            raise InsufficientDepth(required, cutoff)
        low = cutoff
    floor = -math.inf if low is None else low
    out = {}
    dcache = {}
    for i, ai in a.terms.items():
        for j, bj in b.terms.items():
            if i + j < floor:
                continue
            kmax = i if i >= 0 else (math.inf if floor == -math.inf else int(i + j - floor))
            if floor != -math.inf:
                kmax = min(kmax, i + j - floor)
            k = 0
            while k <= kmax:
                key = (j, k)
                d = dcache.get(key)
                if d is None:
                    d = bj if k == 0 else dcache[(j, k - 1)].derivative()
                    dcache[key] = d
                if not d:
                    break
                c = binom(i, k)
                if c:
                    e = i + j - k
                    t = ai * d * c
                    out[e] = out[e] + t if e in out else t
                k += 1
    return PsDO._raw(out, low)


def mul_many(factors, cutoff):
    """Left-to-right product of several series, correct down to cutoff."""
    factors = [_as_psdo(f) for f in factors]
    if len(factors) == 1:
        f = factors[0]
        if f.low is not None and f.low > cutoff:
            raise InsufficientDepth(f.low, cutoff)
        return f.truncate(cutoff)
    last = factors[-1]
    left = mul_many(factors[:-1], cutoff - last.top)
    return psdo_mul(left, last, cutoff)


def psdo_invert(a, cutoff):
    """a^{-1} correct for powers >= cutoff."""
    if not a.terms:
        raise ZeroDivisionError("zero series is not invertible")
    n = a.top
    lead = a.terms[n]
    top = -n
    if a.low is not None:
        required = a.low - 2 * n
        if cutoff < required:
            raise InsufficientDepth(required, cutoff)
    inv_lead = lead.inverse()
    # exact single-term case: (f D^n)^{-1} = D^{-n} f^{-1}
    b = {top: inv_lead}
    dcache = {}

    def deriv(j, k):
        key = (j, k)
        if key not in dcache:
            dcache[key] = b[j] if k == 0 else deriv(j, k - 1).derivative()
        return dcache[key]

    for m in range(-1, cutoff - top - 1, -1):
        # coefficient of D^m in a*b must vanish; solve for b[m - n]
        target = m - n
        s = RationalFunction.const(0)
        for i, ai in a.terms.items():
            # b_j with top >= j > target, where j = m - i + k
            for k in range(max(0, i - n + 1), i - m - n + 1):
                j = m - i + k
                bj = b.get(j)
                if not bj:
                    continue
                c = binom(i, k)
                if c:
                    d = deriv(j, k)
                    if d:
                        s = s + ai * d * c
        b[target] = -(inv_lead * s)
    out = {i: c for i, c in b.items() if i >= cutoff}
    exact = a.low is None and len(a.terms) == 1 and inv_lead.is_constant()
    return PsDO._raw(out, None if exact else cutoff)


def psdo_nth_root(L, n, cutoff):
    """R = D + ... with R^n = L, correct for powers >= cutoff.  L must lead with D^n."""
    if n < 1:
        raise ValueError("root index must be positive")
    if not L.terms or L.top != n:
        raise ValueError("expected an operator of order %d, got order %s" % (n, L.top))
    if L.lc() != 1:
        raise ValueError("leading coefficient must be 1, got %s" % L.lc())
    if L.low is not None:
        required = L.low - n + 1
        if cutoff < required:
            raise InsufficientDepth(required, cutoff)
    r = {1: RationalFunction.const(1)}
    for t in range(0, 1 - cutoff):
        deg = n - 1 - t
        partial = PsDO._raw(r, None)
        power = partial
        for _ in range(n - 1):
            power = psdo_mul(power, partial, deg)
        have = power.terms.get(deg, RationalFunction.const(0))
        want = L.coeff(deg)
        r[-t] = (want - have) * RationalFunction.const(ONE / n)
    return PsDO._raw(r, cutoff)


def psdo_decompose(a):
    """(differential part as a DiffOp, strictly negative part)."""
    pos = [a.terms.get(i, RationalFunction.const(0)) for i in range(0, max(-1, int(a.top)) + 1)] if a.terms else []
    if a.low is not None and a.low > 0:
        raise InsufficientDepth(a.low, 0)
    neg = {i: c for i, c in a.terms.items() if i < 0}
    return DiffOp(pos), PsDO._raw(neg, a.low)


def expand_rational_in_inverse_derivation(g, cutoff):
    """g(D) as a series in D^{-1}, for g vanishing at infinity."""
    g = rf(g)
    if g and g.degree >= 0:
        raise ValueError("%s does not vanish at infinity" % g)
    return rational_symbol(g, cutoff)


def rational_symbol(g, cutoff):
    """g(D) for any rational g: polynomial part plus expansion at infinity."""
    g = rf(g)
    if not g:
        return PsDO._raw({}, None)
    top = int(g.degree)
    finite = len([c for c in g.den.cs if c]) == 1  # denominator is a monomial
    lo = cutoff
    if finite:
        lo = -g.den.degree
    cs = laurent_at_infinity(g, min(lo, top), top)
    terms = {min(lo, top) + i: RationalFunction.const(c) for i, c in enumerate(cs) if c}
    if finite:
        return PsDO._raw(terms, None)
    return PsDO._raw(terms, cutoff)


def psdo_conjugate(K, D, cutoff):
    """K D K^{-1}, correct for powers >= cutoff."""
    K, D = _as_psdo(K), _as_psdo(D)
    if not D.terms:
        return PsDO._raw({}, cutoff)
    kinv = psdo_invert(K, cutoff - K.top - D.top)
    return mul_many([K, D, kinv], cutoff)


def psdo_commutator(a, b, cutoff):
    return psdo_mul(a, b, cutoff) - psdo_mul(b, a, cutoff)


def centralizer_order_zero(L, p, cutoff):
    """The unique P = p + p_1 D^{-1} + ... with [P, L] = 0 (L of order 0 with
    nonconstant leading coefficient), correct for powers >= cutoff."""
    L = _as_psdo(L)
    if L.top != 0:
        raise ValueError("L must have order 0")
    a = L.lc()
    da = a.derivative()
    if not da:
        raise ValueError("leading coefficient of L must be nonconstant")
    P = {0: rf(p)}
    for t in range(1, 1 - cutoff):
        partial = PsDO._raw(P, None)
        c = psdo_commutator(partial, L, -t - 1)
        # [p_t D^{-t}, a] contributes -t a' p_t at D^{-t-1}
        P[-t] = c.coeff(-t - 1) / (da * t)
    return PsDO._raw(P, cutoff)


def express_in_powers(P, R, cutoff):
    """Constants c_k with P = sum c_k R^k down to cutoff, R of order 1 with
    leading coefficient 1.  Raises ValueError if some step needs a
    nonconstant coefficient."""
    out = {}
    rest = P
    while True:
        live = {i: c for i, c in rest.terms.items() if i >= cutoff}
        if not live:
            return out
        t = max(live)
        c = live[t]
        if not c.is_constant():
            raise ValueError("coefficient %s of D^%d is not constant" % (c, t))
        out[t] = c.constant_value()
        if t >= 0:
            power = PsDO.d(0)
            for _ in range(t):
                power = psdo_mul(power, R, cutoff)
        else:
            rinv = psdo_invert(R, cutoff)
            power = PsDO.d(0)
            for _ in range(-t):
                power = psdo_mul(power, rinv, cutoff)
        rest = rest - power.truncate(cutoff) * RationalFunction.const(c.constant_value())
        rest = rest.truncate(cutoff)


def _coef_text(c, var):
    if c.num.degree <= 0 or len([v for v in c.num.cs if v]) == 1:
        if len([v for v in c.den.cs if v]) == 1:
            k = c.num.degree - c.den.degree
            val = c.num.lc() / c.den.lc()
            if k == 0:
                return str(val)
            mono = var if k == 1 else "%s^%d" % (var, k)
            if val == 1:
                return mono
            if val == -1:
                return "-" + mono
            return "%s*%s" % (val, mono)
    s = format_rf(c, var)
    return "(%s)" % s if " " in s else s


def format_psdo(a, var="x", dvar="D"):
    parts = []
    for i in sorted(a.terms, reverse=True):
        c = a.terms[i]
        txt = _coef_text(c, var)
        neg = txt.startswith("-")
        if neg:
            txt = txt[1:]
        dpart = "" if i == 0 else (dvar if i == 1 else "%s^%d" % (dvar, i))
        if dpart and txt == "1":
            body = dpart
        elif dpart:
            body = "%s*%s" % (txt, dpart)
        else:
            body = txt
        parts.append(("-" if neg else "+", body))
    if a.low is not None:
        parts.append(("+", "O(%s^%d)" % (dvar, a.low - 1)))
    if not parts:
        return "0"
    out = ("-" if parts[0][0] == "-" else "") + parts[0][1]
    for s, b in parts[1:]:
        out += " %s %s" % (s, b)
    return out
