"""Recovering the inner witness ``y`` of a derivation ``d = ad(y)``.

A derivation is given by its values on a labelled basis of a finite
window.  Witnesses are unique modulo scalar matrices; the canonical one
has ``y[i0, i0] = 0`` for the table's pivot ``i0``.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass

from . import linalg
from .bases import BasisKind, basis_for, label_str, skew_basis
from .errors import (
    FieldMismatch,
    GuaranteeTooSmall,
    InconsistentTable,
    UnderdeterminedWarning,
)
from .matrix import (
    ClassTag,
    FinitaryMatrix,
    IndexWindow,
    Involution,
    Matrix,
    WindowedMatrix,
    _promote,
    bracket,
    involute,
)


@dataclass(frozen=True)
class DerivationTable:
    """Values ``images[label]`` of a derivation on a window basis."""

    field: object
    window: IndexWindow
    basis_kind: BasisKind
    images: dict
    pivot: int

    def __post_init__(self):
        object.__setattr__(self, "basis_kind", BasisKind(self.basis_kind))
        object.__setattr__(self, "_basis", None)
        if self.pivot not in self.window:
            raise ValueError(f"pivot {self.pivot} outside the window")
        expected = set(self.basis())
        got = set(self.images)
        if got != expected:
            extra = sorted(label_str(x) for x in got - expected)
            missing = sorted(label_str(x) for x in expected - got)
            raise ValueError(f"labels do not match the {self.basis_kind.value} basis "
                             f"(missing {missing[:3]}, unexpected {extra[:3]})")
        for label, img in self.images.items():
            if img.field != self.field:
                raise FieldMismatch(f"image of {label_str(label)} is over {img.field!r}")
            for p in img.support:
                if not self.window.holds(*p):
                    raise ValueError(f"image of {label_str(label)} has entry {p} "
                                     "outside the window")

    def basis(self):
        # built once per table; callers only read it
        cached = self.__dict__.get("_basis")
        if cached is None:
            cached = basis_for(self.basis_kind, self.window, self.pivot, self.field)
            object.__setattr__(self, "_basis", cached)
        return cached

    @property
    def involution(self):
        return self.basis_kind.involution


@dataclass(frozen=True)
class Residual:
    """Per-label comparison of ``[y, b]`` with the table."""

    checked: tuple
    failures: tuple = ()

    @property
    def ok(self):
        return not self.failures

    def summary(self):
        if self.ok:
            return f"{len(self.checked)} basis images match"
        label, pos, got, want = self.failures[0]
        return (f"{len(self.failures)} of {len(self.checked)} images differ; first at "
                f"{label_str(label)} position {pos}: [y,b]={got}, table={want}")


@dataclass(frozen=True)
class DerivationWitness:
    y: WindowedMatrix
    normalization: int
    residual_report: Residual

    @property
    def matrix(self) -> FinitaryMatrix:
        return self.y.to_finitary()


def _witness_window(y: FinitaryMatrix, window: IndexWindow) -> WindowedMatrix:
    return WindowedMatrix(y.field, window, ClassTag.rcf(), dict(y.entries))


def residual(table: DerivationTable, y: FinitaryMatrix) -> Residual:
    f = table.field
    fails = []
    basis = table.basis()
    for label in sorted(basis):
        got = bracket(y, basis[label])
        want = table.images[label]
        if got != want:
            for p in sorted(set(got.support) | set(want.support)):
                g, w = got.probe(*p), want.probe(*p)
                if g != w:
                    fails.append((label, p, f.format(g), f.format(w)))
                    break
    return Residual(tuple(sorted(basis)), tuple(fails))


def _finalize(table: DerivationTable, y: FinitaryMatrix) -> DerivationWitness:
    rep = residual(table, y)
    if not rep.ok:
        raise InconsistentTable("table is not ad(y) on its window: " + rep.summary(), rep)
    return DerivationWitness(_witness_window(y, table.window), table.pivot, rep)


def inner_derivation_table(y: Matrix, basis_kind, window: IndexWindow, pivot: int) -> DerivationTable:
    """The table of ``ad(y)`` on the chosen window basis.

    ``y`` must be finitary (or a complete window) with support inside
    ``window``; otherwise some brackets have entries the window cannot hold.
    """
    y = _promote(y)
    if not isinstance(y, FinitaryMatrix):
        raise GuaranteeTooSmall("brackets of a non-finitary y cannot be certified on a window")
    for p in y.support:
        if not window.holds(*p):
            raise GuaranteeTooSmall(f"y has entry {p} outside the window")
    kind = BasisKind(basis_kind)
    basis = basis_for(kind, window, pivot, y.field)
    images = {label: bracket(y, b) for label, b in basis.items()}
    return DerivationTable(y.field, window, kind, images, pivot)


def recover_witness_full(table: DerivationTable) -> DerivationWitness:
    """Closed-form recovery from the images of all matrix units.

    Off the diagonal ``y[i, j] = [y, e_jj][i, j]``; on it
    ``y[i, i] = y[i0, i0] - [y, e_{i0 i}][i0, i]`` with ``y[i0, i0] = 0``.
    """
    if table.basis_kind is not BasisKind.FULL:
        raise ValueError("closed-form recovery needs the full unit basis")
    f = table.field
    w, i0 = table.window, table.pivot
    img = table.images
    y = {}
    for j in w.indices:
        col = img[("e", j, j)]
        for i in w.indices:
            if i != j:
                v = col.probe(i, j)
                if v != 0:
                    y[(i, j)] = v
    for i in w.indices:
        if i != i0:
            v = f.neg(img[("e", i0, i)].probe(i0, i))
            if v != 0:
                y[(i, i)] = v
    return _finalize(table, FinitaryMatrix._raw(f, y))


def _equations(table: DerivationTable, coords):
    """Equations ``[y, b] = images[b]``, one label at a time.

    ``coords[(i, j)]`` lists ``(unknown, coefficient)`` pairs expressing
    ``y[i, j]``; positions without coordinates are zero.
    """
    f = table.field
    w = table.window
    for label, b in sorted(table.basis().items()):
        eq = {}
        for (k, j), v in b.entries.items():
            # (y b)[i, j] gets y[i, k]·v
            for i in w.indices:
                for c, cv in coords.get((i, k), ()):
                    row = eq.setdefault((i, j), {})
                    row[c] = f.add(row.get(c, f.zero()), f.mul(cv, v))
        for (i, k), v in b.entries.items():
            # (b y)[i, j] gets v·y[k, j]
            for j in w.indices:
                for c, cv in coords.get((k, j), ()):
                    row = eq.setdefault((i, j), {})
                    row[c] = f.sub(row.get(c, f.zero()), f.mul(v, cv))
        target = table.images[label]
        for p in target.support:
            eq.setdefault(p, {})
        for p in sorted(eq):
            yield {c: v for c, v in eq[p].items() if v != 0}, target.probe(*p)


def _solve(table: DerivationTable, coords, ncols, warn=True):
    # every caller verifies the result, so unread equations cost nothing
    solved = linalg.solve_stream(_equations(table, coords), ncols, table.field, check_all=False)
    if solved is None:
        raise InconsistentTable("no y on the window satisfies [y, b] = images[b]")
    sol, free = solved
    if free and warn:
        warnings.warn(f"{len(free)} unknowns of y are not determined by the table; set to zero",
                      UnderdeterminedWarning, stacklevel=4)
    f = table.field
    y = {}
    for p, terms in coords.items():
        acc = f.zero()
        for c, cv in terms:
            v = sol.get(c)
            if v is not None:
                acc = f.add(acc, f.mul(cv, v))
        if acc != 0:
            y[p] = acc
    return FinitaryMatrix._raw(f, y)


def _solve_linear(table: DerivationTable, constraints=None, warn=True) -> FinitaryMatrix:
    w, i0 = table.window, table.pivot
    one = table.field.one()
    unknowns = [p for p in w.positions()
                if p != (i0, i0) and not (constraints and constraints.excludes(*p))]
    coords = {p: ((n, one),) for n, p in enumerate(unknowns)}
    return _solve(table, coords, len(unknowns), warn)


def _solve_skew(table: DerivationTable, inv: Involution) -> FinitaryMatrix:
    """Solve with ``y`` restricted to the skew elements, one unknown per
    skew basis element."""
    coords = {}
    basis = skew_basis(table.window, inv, table.field)
    for n, label in enumerate(sorted(basis)):
        for p, v in basis[label].entries.items():
            coords.setdefault(p, []).append((n, v))
    return _solve(table, coords, len(basis), warn=False)


def recover_witness_linear(table: DerivationTable, constraints: ClassTag | None = None) -> DerivationWitness:
    """Solve ``[y, b] = images[b]`` for the window entries of ``y``.

    ``y[i0, i0]`` is pinned to zero; ``constraints`` (e.g. a band tag)
    removes the unknowns it excludes.  Remaining free unknowns are set to
    zero with an :class:`UnderdeterminedWarning`.
    """
    return _finalize(table, _solve_linear(table, constraints))


def recover_witness_skew(table: DerivationTable, inv: Involution | None = None) -> DerivationWitness:
    """Skew witness ``k`` with ``ad(k)`` equal to the table on the skew basis.

    Any solution ``y`` splits as ``h + k``; the symmetric part ``h``
    commutes with every skew element, so ``k`` alone is a witness.
    """
    expected = table.basis_kind.involution
    if expected is None:
        raise ValueError("skew recovery needs a skew basis table")
    if inv is not None and inv != expected:
        raise ValueError(f"table basis {table.basis_kind.value} does not match involution {inv.kind.value}")
    inv = expected
    # a solution over all of gl splits as symmetric + skew and only the skew
    # part acts, so solving among skew y directly gives the same witness
    y = _solve_skew(table, inv)
    f = table.field
    half = f.inv(f.coerce(2))
    k = (y - involute(y, inv)) * half
    rep = residual(table, k)
    if not rep.ok:
        raise InconsistentTable("skew part does not reproduce the table: " + rep.summary(), rep)
    if involute(k, inv) != -k:
        raise InconsistentTable("recovered witness is not skew")
    return DerivationWitness(_witness_window(k, table.window), table.pivot, rep)


def recover_witness(table: DerivationTable, skew: Involution | None = None) -> DerivationWitness:
    """Dispatch on the basis kind: closed form, linear solve, or skew."""
    if table.basis_kind.involution is not None:
        return recover_witness_skew(table, skew)
    if table.basis_kind is BasisKind.FULL:
        return recover_witness_full(table)
    return recover_witness_linear(table)
