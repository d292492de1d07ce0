"""Independent reference computations on plain dicts.

Nothing here touches the library's arithmetic: values are Fractions or
Python ints, reduced mod p only at the end.  Matrices are dicts
``{(i, j): value}`` with zeros dropped.
"""

from fractions import Fraction


def reduce(d, p=None):
    if p is None:
        return {k: Fraction(v) for k, v in d.items() if v != 0}
    return {k: v % p for k, v in d.items() if v % p}


def dense_product(a, b, p=None):
    out = {}
    for (i, k), v in a.items():
        for (k2, j), w in b.items():
            if k == k2:
                out[(i, j)] = out.get((i, j), 0) + v * w
    return reduce(out, p)


def commutator(a, b, p=None):
    ab = dense_product(a, b)
    ba = dense_product(b, a)
    out = dict(ab)
    for k, v in ba.items():
        out[k] = out.get(k, 0) - v
    return reduce(out, p)


def shift(lo, hi, m=1):
    return {(i, i + m): 1 for i in range(lo, hi - m + 1)}


def tilde_naturals(a, i, j, m=1):
    """Blockwise sum of a[i - m(k+1), j - m·k] over k >= 0, positive indices only."""
    total, k = 0, 0
    while i - m * (k + 1) >= 1 and j - m * k >= 1:
        total += a.get((i - m * (k + 1), j - m * k), 0)
        k += 1
    return total


def tilde_integers(a, i, j):
    """The three-case formula for Z-indexed matrices."""
    if i >= 2:
        return sum(a.get((i - 1 - s, j - s), 0) for s in range(i - 1))
    if i == 1:
        return 0
    return -sum(a.get((i + s, j + 1 + s), 0) for s in range(1 - i))


def unit_commutator(y, i, j, p=None):
    """[y, e_ij] from the unit rule: column j gets column i of y, row i loses row j."""
    out = {}
    for (r, c), v in y.items():
        if c == i:
            out[(r, j)] = out.get((r, j), 0) + v
        if r == j:
            out[(i, c)] = out.get((i, c), 0) - v
    return reduce(out, p)


def transpose(a):
    return {(j, i): v for (i, j), v in a.items()}


def symplectic_form(lo, hi):
    out = {}
    for i in range(lo, hi + 1, 2):
        out[(i, i + 1)] = 1
        out[(i + 1, i)] = -1
    return out


def symplectic(a, lo, hi):
    """J⁻¹ aᵗ J with J⁻¹ = -J for the pair form."""
    J = symplectic_form(lo, hi)
    Jinv = {k: -v for k, v in J.items()}
    return reduce(dense_product(dense_product(Jinv, transpose(a)), J))


def rank(rows, p=None):
    """Rank of a list of dict-rows by textbook elimination."""
    rows = [dict(r) for r in rows]
    if p is None:
        rows = [{k: Fraction(v) for k, v in r.items() if v} for r in rows]
    else:
        rows = [{k: v % p for k, v in r.items() if v % p} for r in rows]
    r = 0
    cols = sorted({c for row in rows for c in row})
    for c in cols:
        piv = next((n for n in range(r, len(rows)) if rows[n].get(c)), None)
        if piv is None:
            continue
        rows[r], rows[piv] = rows[piv], rows[r]
        pv = rows[r][c]
        for n in range(len(rows)):
            if n != r and rows[n].get(c):
                f = rows[n][c] * (pow(pv, -1, p) if p else 1 / pv)
                new = dict(rows[n])
                for k, v in rows[r].items():
                    new[k] = new.get(k, 0) - f * v
                    if p:
                        new[k] %= p
                rows[n] = {k: v for k, v in new.items() if v}
        r += 1
    return r
