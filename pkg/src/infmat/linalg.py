"""Exact Gaussian elimination over a :class:`~infmat.scalars.Field`.

Sparse rows are ``dict[int, value]`` with no stored zeros.  Dense matrices
are lists of lists of raw field values.
"""

from __future__ import annotations

from .errors import SingularMatrix


class Eliminator:
    """Incremental reduced row echelon form.

    Pivot rows are kept mutually reduced, so reducing a new row needs a
    single pass over the pivot columns it touches.
    """

    def __init__(self, field):
        self.field = field
        self.pivots: dict[int, dict] = {}

    @property
    def rank(self):
        return len(self.pivots)

    def reduce(self, row):
        f = self.field
        row = dict(row)
        for col in [c for c in row if c in self.pivots]:
            coef = row.get(col)
            if coef is None:
                continue
            for c, v in self.pivots[col].items():
                nv = f.sub(row.get(c, f.zero()), f.mul(coef, v))
                if nv == 0:
                    row.pop(c, None)
                else:
                    row[c] = nv
        return row

    def add(self, row) -> bool:
        """Insert ``row``; return True when it increased the rank."""
        f = self.field
        row = self.reduce(row)
        if not row:
            return False
        col = min(row)
        scale = f.inv(row[col])
        row = {c: f.mul(v, scale) for c, v in row.items()}
        for other in self.pivots.values():
            coef = other.get(col)
            if coef is None:
                continue
            for c, v in row.items():
                nv = f.sub(other.get(c, f.zero()), f.mul(coef, v))
                if nv == 0:
                    other.pop(c, None)
                else:
                    other[c] = nv
        self.pivots[col] = row
        return True


def rank(rows, field) -> int:
    el = Eliminator(field)
    for r in rows:
        el.add(r)
    return el.rank


def solve(rows, rhs, ncols, field, check_all=True):
    """Solve ``rows · x = rhs`` exactly.

    ``rows`` are sparse equations over unknowns ``0..ncols-1``.  Returns
    ``(solution, free)`` with free unknowns set to zero, or ``None`` when the
    system is inconsistent.  With ``check_all=False`` elimination stops once
    every unknown is pinned; the remaining equations are then not checked
    and the caller must verify the solution itself.
    """
    return solve_stream(zip(rows, rhs), ncols, field, check_all)


def solve_stream(equations, ncols, field, check_all=True):
    """:func:`solve` over an iterable of ``(row, rhs)`` pairs, read lazily."""
    el = Eliminator(field)
    for r, b in equations:
        aug = dict(r)
        if b != 0:
            aug[ncols] = b
        el.add(aug)
        if not check_all and el.rank == ncols and ncols not in el.pivots:
            break
    if ncols in el.pivots:
        return None
    sol = {}
    for col, prow in el.pivots.items():
        v = prow.get(ncols)
        if v is not None:
            sol[col] = v
    free = [c for c in range(ncols) if c not in el.pivots]
    return sol, free


def identity(n, field):
    return [[field.one() if i == j else field.zero() for j in range(n)] for i in range(n)]


def matmul(a, b, field):
    n, m = len(a), len(b[0]) if b else 0
    out = [[field.zero()] * m for _ in range(n)]
    for i in range(n):
        row = out[i]
        for k, aik in enumerate(a[i]):
            if aik == 0:
                continue
            for j, bkj in enumerate(b[k]):
                if bkj != 0:
                    row[j] = field.add(row[j], field.mul(aik, bkj))
    return out


def inverse(a, field):
    """Gauss-Jordan inverse of a square dense matrix."""
    n = len(a)
    f = field
    work = [list(row) + [f.one() if i == j else f.zero() for j in range(n)]
            for i, row in enumerate(a)]
    for col in range(n):
        piv = next((r for r in range(col, n) if work[r][col] != 0), None)
        if piv is None:
            raise SingularMatrix(f"matrix is singular (no pivot in column {col})")
        work[col], work[piv] = work[piv], work[col]
        s = f.inv(work[col][col])
        work[col] = [f.mul(v, s) for v in work[col]]
        for r in range(n):
            if r != col and work[r][col] != 0:
                c = work[r][col]
                prow = work[col]
                work[r] = [f.sub(v, f.mul(c, pv)) for v, pv in zip(work[r], prow)]
    return [row[n:] for row in work]
