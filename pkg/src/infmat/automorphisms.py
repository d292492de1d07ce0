"""Conjugators for automorphism tables, Lie automorphism types, and
anti-automorphisms.

Tables hold the images of the matrix units of a finite window.  The
conjugator is recovered from a frame: pick a nonzero vector ``u`` in the
image of the first diagonal idempotent, push it around with the images of
``e_{i,i1}``, and read the frame ``B = [b_1 ... b_n]``.  Then
``images[e_ij] = B e_ij B⁻¹``, so ``x = B⁻¹``.  Conjugators are unique up to
a nonzero scalar.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass

from . import linalg
from .bases import label_str
from .errors import (
    FieldMismatch,
    InconsistentTable,
    SingularFrame,
    SingularMatrix,
    VerificationFailure,
    ZeroIdempotentImage,
)
from .matrix import FinitaryMatrix, IndexWindow, Involution, _promote, involute
from .scalars import Scalar


class Flavor(str, enum.Enum):
    ASSOC = "assoc"
    LIE = "lie"
    ANTI = "anti"


# ------------------------------------------------------------------ helpers


def to_dense(a: FinitaryMatrix, window: IndexWindow):
    return a.dense(window)


def from_dense(rows, window: IndexWindow, field) -> FinitaryMatrix:
    idx = window.indices
    return FinitaryMatrix._raw(field, {(idx[r], idx[c]): v
                                       for r, row in enumerate(rows)
                                       for c, v in enumerate(row) if v != 0})


def _conjugate_unit(xinv, x, i, j, window, field, sign=1):
    """``sign · x⁻¹ e_ij x`` from dense ``x⁻¹`` and ``x``."""
    f = field
    idx = window.indices
    r, c = idx.index(i), idx.index(j)
    col = [row[r] for row in xinv]
    rowx = x[c]
    out = {}
    for p, a in enumerate(col):
        if a == 0:
            continue
        if sign == -1:
            a = f.neg(a)
        for q, b in enumerate(rowx):
            if b != 0:
                out[(idx[p], idx[q])] = f.mul(a, b)
    return FinitaryMatrix._raw(f, out)


def projective_scalar(x: FinitaryMatrix, y: FinitaryMatrix):
    """``λ`` with ``x = λ·y``, or ``None`` if there is none (or ``y = 0``)."""
    if x.field != y.field:
        raise FieldMismatch(f"{x.field!r} vs {y.field!r}")
    if set(x.support) != set(y.support) or not y:
        return None
    f = x.field
    p = min(y.support)
    lam = f.div(x.probe(*p), y.probe(*p))
    for q, v in y.entries.items():
        if f.mul(lam, v) != x.probe(*q):
            return None
    return lam


# ------------------------------------------------------------------- types


@dataclass(frozen=True)
class AutomorphismTable:
    """Images ``images[("e", i, j)]`` of the window units under a map.

    Lie tables may carry ``("h", j)`` labels (``e_jj - e_{i0 i0}``) in place
    of the diagonal units.
    """

    field: object
    window: IndexWindow
    images: dict
    flavor: Flavor = Flavor.ASSOC
    validate: bool = True

    def __post_init__(self):
        object.__setattr__(self, "flavor", Flavor(self.flavor))
        idx = self.window.indices
        for label, img in self.images.items():
            if img.field != self.field:
                raise FieldMismatch(f"image of {label_str(label)} is over {img.field!r}")
            if any(not self.window.holds(*p) for p in img.support):
                raise ValueError(f"image of {label_str(label)} leaves the window")
            if label[0] == "h" and self.flavor is not Flavor.LIE:
                raise ValueError("h labels are only meaningful in Lie tables")
        off = {("e", i, j) for i in idx for j in idx if i != j}
        missing = off - set(self.images)
        if missing:
            raise ValueError(f"missing image of {label_str(min(missing))}")
        if self.flavor is not Flavor.LIE:
            diag = {("e", i, i) for i in idx} - set(self.images)
            if diag:
                raise ValueError(f"missing image of {label_str(min(diag))}")
        if self.validate and self.flavor is Flavor.ASSOC:
            check_idempotents(self)

    def unit(self, i, j) -> FinitaryMatrix:
        return self.images[("e", i, j)]

    @property
    def n(self):
        return self.window.size


def check_idempotents(table: AutomorphismTable):
    """Diagonal images must be pairwise orthogonal idempotents."""
    idx = table.window.indices
    zero = FinitaryMatrix.zero(table.field)
    for i in idx:
        ei = table.unit(i, i)
        for j in idx:
            want = ei if i == j else zero
            if ei @ table.unit(j, j) != want:
                what = "idempotent" if i == j else "orthogonal to e_{j}_{j}".format(j=j)
                raise InconsistentTable(f"image of e_{i}_{i} is not {what}")


@dataclass(frozen=True)
class ConjugatorWitness:
    """``x`` and ``x⁻¹`` with ``images[e_ij] = x⁻¹ e_ij x`` (or the anti form)."""

    x: FinitaryMatrix
    x_inverse: FinitaryMatrix
    scale_note: str = "projective"
    checked: int = 0


@dataclass(frozen=True)
class LieAutClassification:
    verdict: str
    witness: ConjugatorWitness | None
    details: tuple = ()

    @property
    def ok(self):
        return self.verdict != "Unknown"


# ------------------------------------------------------------- construction


def conjugation_table(x: FinitaryMatrix, flavor=Flavor.ASSOC, window: IndexWindow | None = None,
                      negate_transpose: bool = False) -> AutomorphismTable:
    """Table of ``a -> x⁻¹ a x`` (anti flavor: ``a -> x⁻¹ aᵗ x``).

    ``negate_transpose`` gives the second Lie type ``a -> -x⁻¹ aᵗ x``.
    """
    x = _promote(x)
    flavor = Flavor(flavor)
    f = x.field
    if window is None:
        lo, hi = x.index_bounds() if x else (1, 1)
        window = IndexWindow(lo, hi) if lo != 1 else IndexWindow.naturals(hi)
    dx = to_dense(x, window)
    dxinv = linalg.inverse(dx, f)
    transpose = flavor is Flavor.ANTI or negate_transpose
    sign = -1 if negate_transpose else 1
    images = {}
    for i in window.indices:
        for j in window.indices:
            p, q = (j, i) if transpose else (i, j)
            images[("e", i, j)] = _conjugate_unit(dxinv, dx, p, q, window, f, sign)
    return AutomorphismTable(f, window, images, flavor, validate=False)


# ---------------------------------------------------------------- recovery


def _frame(unit, window: IndexWindow, field):
    """Frame matrix ``B`` (dense, columns ``b_i``) from unit images."""
    f = field
    idx = window.indices
    i1 = idx[0]
    e11 = to_dense(unit(i1, i1), window)
    cols = [c for c in range(len(idx)) if any(row[c] != 0 for row in e11)]
    if not cols:
        raise ZeroIdempotentImage(f"image of e_{i1}_{i1} is zero")
    u = [row[cols[0]] for row in e11]
    B = [[f.zero()] * len(idx) for _ in idx]
    for c, i in enumerate(idx):
        img = unit(i, i1)
        for (p, q), v in img.entries.items():
            uq = u[idx.index(q)]
            if uq != 0:
                r = idx.index(p)
                B[r][c] = f.add(B[r][c], f.mul(v, uq))
    return B


def _verify(unit, window, x_dense, xinv_dense, field, transpose=False, sign=1):
    """Labels whose image differs from ``sign·x⁻¹ e x`` (``e`` transposed if asked)."""
    bad = []
    for i in window.indices:
        for j in window.indices:
            p, q = (j, i) if transpose else (i, j)
            want = _conjugate_unit(xinv_dense, x_dense, p, q, window, field, sign)
            if unit(i, j) != want:
                bad.append(("e", i, j))
    return bad


def _recover(unit, window: IndexWindow, field, what="table") -> ConjugatorWitness:
    B = _frame(unit, window, field)
    try:
        X = linalg.inverse(B, field)
    except SingularMatrix as exc:
        raise SingularFrame(f"{what} is not an inner automorphism on this window: {exc}") from exc
    bad = _verify(unit, window, X, B, field)
    if bad:
        raise VerificationFailure(f"{what}: conjugation by the recovered x misses "
                                  f"{len(bad)} unit images, first {label_str(bad[0])}", bad)
    return ConjugatorWitness(from_dense(X, window, field), from_dense(B, window, field),
                             checked=window.size ** 2)


def recover_conjugator(table: AutomorphismTable) -> ConjugatorWitness:
    """``x`` with ``images[e_ij] = x⁻¹ e_ij x`` for every window unit."""
    if table.flavor is Flavor.ANTI:
        raise ValueError("use decompose_anti_automorphism for anti tables")
    if table.flavor is Flavor.LIE:
        unit = _reconstructed_units(table, 1)
    else:
        unit = table.unit
    return _recover(unit, table.window, table.field)


def _reconstructed_units(table: AutomorphismTable, kind: int):
    """Unit images of the associative map a Lie table would come from.

    ``kind = 1``: ``T(e_ij) = α(e_ij)``; ``kind = 2``: ``T(e_ij) = -α(e_ji)``.
    Diagonal images are rebuilt as ``T(e_ij)·T(e_ji)`` from the off-diagonal
    ones, which removes the central ambiguity of ``h``-labelled tables.
    """
    idx = table.window.indices
    if len(idx) < 2:
        raise InconsistentTable("Lie classification needs a window of size at least 2")
    cache = {}

    def unit(i, j):
        key = (i, j)
        if key not in cache:
            if i != j:
                cache[key] = table.unit(i, j) if kind == 1 else -table.unit(j, i)
            else:
                k = idx[1] if i == idx[0] else idx[0]
                cache[key] = unit(i, k) @ unit(k, i)
        return cache[key]

    return unit


def _lie_image(x_dense, xinv_dense, window, field, label, pivot, kind):
    """``α(b)`` for a basis label under type ``kind`` with conjugator ``x``."""
    sign = 1 if kind == 1 else -1
    transpose = kind == 2
    if label[0] == "e":
        _, i, j = label
        p, q = (j, i) if transpose else (i, j)
        return _conjugate_unit(xinv_dense, x_dense, p, q, window, field, sign)
    j = label[1]
    a = _conjugate_unit(xinv_dense, x_dense, j, j, window, field, sign)
    b = _conjugate_unit(xinv_dense, x_dense, pivot, pivot, window, field, sign)
    return a - b


def _h_pivot(table):
    """The ``i0`` in ``h_j = e_jj - e_{i0 i0}``: the one index without an h label."""
    hs = {label[1] for label in table.images if label[0] == "h"}
    rest = [i for i in table.window.indices if i not in hs]
    return rest[0] if hs and len(rest) == 1 else None


def _try_type(table, kind):
    unit = _reconstructed_units(table, kind)
    w, f = table.window, table.field
    B = _frame(unit, w, f)
    try:
        X = linalg.inverse(B, f)
    except SingularMatrix as exc:
        raise SingularFrame(str(exc)) from exc
    pivot = _h_pivot(table)
    bad = [label for label in sorted(table.images)
           if table.images[label] != _lie_image(X, B, w, f, label, pivot, kind)]
    if bad:
        raise VerificationFailure(f"type {'I' * kind} conjugator misses {len(bad)} images, "
                                  f"first {label_str(bad[0])}", bad)
    return ConjugatorWitness(from_dense(X, w, f), from_dense(B, w, f), checked=len(table.images))


def classify_lie_automorphism(table: AutomorphismTable) -> LieAutClassification:
    """Type I (``x⁻¹ a x``), type II (``-x⁻¹ aᵗ x``) or Unknown.

    Type I is tried first; type II only after type I fails verification.
    """
    details = []
    for kind, name in ((1, "TypeI"), (2, "TypeII")):
        try:
            return LieAutClassification(name, _try_type(table, kind), tuple(details))
        except InconsistentTable as exc:
            details.append(f"{name}: {type(exc).__name__}: {exc}")
    return LieAutClassification("Unknown", None, tuple(details))


def decompose_anti_automorphism(table: AutomorphismTable) -> ConjugatorWitness:
    """``x`` with ``ψ(a) = x⁻¹ aᵗ x``, i.e. ``ψ`` = (conjugation by x) ∘ transpose."""
    def unit(i, j):
        return table.unit(j, i)
    return _recover(unit, table.window, table.field, "anti table")


# --------------------------------------------------------- involution scalar


@dataclass(frozen=True)
class ScalarCheck:
    ok: bool
    alpha: Scalar | None
    violation: tuple | None = None

    def __bool__(self):
        return self.ok


def check_involution_scalar(x: FinitaryMatrix, inv: Involution,
                            window: IndexWindow | None = None) -> ScalarCheck:
    """Whether ``x·x*`` is a nonzero scalar matrix ``α·Id`` on the window."""
    x = _promote(x)
    f = x.field
    if window is None:
        lo, hi = x.index_bounds() if x else (1, 1)
        window = IndexWindow(lo, hi) if lo != 1 else IndexWindow.naturals(hi)
    inv.check_window(window)
    prod = x @ involute(x, inv)
    alpha = prod.probe(window.lo, window.lo)
    if alpha == 0:
        return ScalarCheck(False, None, (window.lo, window.lo))
    for p in window.positions():
        want = alpha if p[0] == p[1] else f.zero()
        if prod.probe(*p) != want:
            return ScalarCheck(False, None, p)
    for p in prod.support:
        if not window.holds(*p):
            return ScalarCheck(False, None, p)
    return ScalarCheck(True, Scalar(f, alpha))
