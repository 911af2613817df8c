"""
Exact Gaussian elimination over any field whose elements support
``+ - * /`` and truthiness (``mpq`` scalars, ``RationalFunction``).
"""


def rref(rows):
    """Reduced row echelon form.  Returns (rows, pivot_columns); input untouched."""
    m = [list(r) for r in rows]
    if not m:
        return [], []
    ncols = len(m[0])
    pivots = []
    r = 0
    for c in range(ncols):
        piv = None
        for i in range(r, len(m)):
            if m[i][c]:
                piv = i
                break
        if piv is None:
            continue
        m[r], m[piv] = m[piv], m[r]
        row = m[r]
        inv = 1 / row[c]
        if inv != 1:
            for j in range(c, ncols):
                if row[j]:
                    row[j] = row[j] * inv
        for i in range(len(m)):
            if i != r:
                f = m[i][c]
                if f:
                    mi = m[i]
                    for j in range(c, ncols):
                        if row[j]:
                            mi[j] = mi[j] - f * row[j]
        pivots.append(c)
        r += 1
        if r == len(m):
            break
    return m[:r], pivots


def rank(rows):
    return len(rref(rows)[1])


def nullspace(rows, ncols=None, zero=0, one=1):
    """Basis of {v : rows . v = 0}."""
    if ncols is None:
        ncols = len(rows[0]) if rows else 0
    red, pivots = rref(rows) if rows else ([], [])
    free = [c for c in range(ncols) if c not in set(pivots)]
    basis = []
    for f in free:
        v = [zero] * ncols
        v[f] = one
        for row, p in zip(red, pivots):
            if row[f]:
                v[p] = -row[f]
        basis.append(v)
    return basis


def solve(a, b):
    """Solve the square system a.v = b; raises ValueError naming a singular column."""
    n = len(a)
    aug = [list(a[i]) + [b[i]] for i in range(n)]
    red, pivots = rref(aug)
    if len(pivots) < n or pivots[:n] != list(range(n)):
        missing = next((c for c in range(n) if c not in pivots), n)
        raise ValueError("singular system (no pivot in column %d)" % missing)
    return [red[i][n] for i in range(n)]


def row_space_contains(red, pivots, v):
    """True iff v lies in the span of an RREF basis."""
    w = list(v)
    for row, p in zip(red, pivots):
        f = w[p]
        if f:
            for j in range(len(w)):
                if row[j]:
                    w[j] = w[j] - f * row[j]
    return not any(w)
