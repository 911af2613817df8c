"""
Calogero-Moser pairs (X, Y) with [X, Y] + I of rank one, and the action
(X, Y) -> (X + p'(Y), Y) of polynomials p.
"""

import itertools
import random
from dataclasses import dataclass

from fcw.exact import ONE, ZERO, Poly, scalar
from fcw.linalg import rank, solve


class CMError(ValueError):
    pass


def _mat(rows):
    return tuple(tuple(scalar(v) for v in r) for r in rows)


def identity(n):
    return tuple(tuple(ONE if i == j else ZERO for j in range(n)) for i in range(n))


def mat_mul(a, b):
    n = len(a)
    if not n:
        return ()
    m = len(b[0])
    return tuple(
        tuple(sum((a[i][k] * b[k][j] for k in range(len(b))), ZERO) for j in range(m)) for i in range(n)
    )


def mat_add(a, b):
    return tuple(tuple(x + y for x, y in zip(r, s)) for r, s in zip(a, b))


def mat_sub(a, b):
    return tuple(tuple(x - y for x, y in zip(r, s)) for r, s in zip(a, b))


def mat_scale(a, c):
    return tuple(tuple(c * x for x in r) for r in a)


def mat_inverse(a):
    n = len(a)
    cols = []
    for j in range(n):
        e = [ONE if i == j else ZERO for i in range(n)]
        cols.append(solve([list(r) for r in a], e))
    return tuple(tuple(cols[j][i] for j in range(n)) for i in range(n))


def trace(a):
    return sum((a[i][i] for i in range(len(a))), ZERO)


def poly_of_matrix(p, a):
    """p(a) by Horner."""
    n = len(a)
    out = tuple(tuple(ZERO for _ in range(n)) for _ in range(n))
    for c in reversed(p.cs):
        out = mat_add(mat_mul(out, a), mat_scale(identity(n), c))
    return out


@dataclass(frozen=True)
class CMTriple:
    X: tuple
    Y: tuple

    def __post_init__(self):
        X, Y = _mat(self.X), _mat(self.Y)
        n = len(X)
        if len(Y) != n or any(len(r) != n for r in X + Y):
            raise CMError("X and Y must be square matrices of the same size")
        object.__setattr__(self, "X", X)
        object.__setattr__(self, "Y", Y)

    @property
    def n(self):
        return len(self.X)

    def defect(self):
        """[X, Y] + I."""
        X, Y = self.X, self.Y
        return mat_add(mat_sub(mat_mul(X, Y), mat_mul(Y, X)), identity(self.n))

    def conjugate(self, g):
        g = _mat(g)
        gi = mat_inverse(g)
        return CMTriple(mat_mul(mat_mul(g, self.X), gi), mat_mul(mat_mul(g, self.Y), gi))

    def to_json(self):
        return {
            "X": [[str(v) for v in r] for r in self.X],
            "Y": [[str(v) for v in r] for r in self.Y],
        }

    @classmethod
    def from_json(cls, data):
        return cls(data.get("X", []), data.get("Y", []))


def rank_one_check(t):
    if t.n == 0:
        return True
    d = t.defect()
    if trace(d) != t.n:
        return False
    return rank([list(r) for r in d]) == 1


def gamma_act_cm(t, p):
    """(X + p'(Y), Y)."""
    if not rank_one_check(t):
        raise CMError("input pair does not satisfy the rank-one condition")
    p = p if isinstance(p, Poly) else Poly(p)
    if t.n == 0:
        return t
    return CMTriple(mat_add(t.X, poly_of_matrix(p.derivative(), t.Y)), t.Y)


def random_rank_one(n, rng, spread=10):
    """A random pair on the rank-one locus: diagonal X with distinct entries,
    Y_ij = 1/(x_i - x_j) off the diagonal, then a random conjugation."""
    if n == 0:
        return CMTriple((), ())
    xs = rng.sample(range(-spread * n, spread * n + 1), n)
    X = [[scalar(xs[i]) if i == j else ZERO for j in range(n)] for i in range(n)]
    Y = [
        [scalar(rng.randint(-5, 5)) if i == j else ONE / (xs[i] - xs[j]) for j in range(n)]
        for i in range(n)
    ]
    t = CMTriple(X, Y)
    while True:
        g = [[scalar(rng.randint(-3, 3)) for _ in range(n)] for _ in range(n)]
        if rank(g) == n:
            return t.conjugate(tuple(tuple(r) for r in g))


def words(length):
    """All words in 'X', 'Y' of length 1..length."""
    for k in range(1, length + 1):
        for w in itertools.product("XY", repeat=k):
            yield "".join(w)


def trace_words(t, length):
    """tr(w(X, Y)) for every word up to the given length: a necessary
    condition for two pairs to be simultaneously conjugate."""
    out = {}
    for w in words(length):
        m = identity(t.n)
        for ch in w:
            m = mat_mul(m, t.X if ch == "X" else t.Y)
        out[w] = trace(m)
    return out


def same_trace_words(s, t, length):
    return s.n == t.n and trace_words(s, length) == trace_words(t, length)


def default_rng(seed=0):
    return random.Random(seed)
