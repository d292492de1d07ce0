"""Labelled bases of gl, sl and the skew Lie algebras on a finite window.

Labels are tuples: ``("e", i, j)`` for a matrix unit, ``("h", j)`` for
``e_jj - e_{i0 i0}``, ``("k", i, j)`` for the skew part ``e_ij - e_ij*``.
Their text form (``"e_1_2"``, ``"h_3"``, ``"k_1_2"``) is used in files.
"""

from __future__ import annotations

import enum

from .errors import ParseError
from .matrix import FinitaryMatrix, IndexWindow, Involution, InvolutionKind
from .scalars import QQ


class BasisKind(str, enum.Enum):
    FULL = "full"
    SL = "sl"
    SKEW_T = "skew_t"
    SKEW_S = "skew_s"

    @property
    def involution(self):
        if self is BasisKind.SKEW_T:
            return Involution.transpose()
        if self is BasisKind.SKEW_S:
            return Involution.symplectic()
        return None

    @classmethod
    def for_involution(cls, inv: Involution):
        return cls.SKEW_T if inv.kind is InvolutionKind.TRANSPOSE else cls.SKEW_S


def label_str(label) -> str:
    return "_".join(str(x) for x in label)


def parse_label(text: str):
    parts = text.split("_")
    try:
        if parts[0] in ("e", "k") and len(parts) == 3:
            return (parts[0], int(parts[1]), int(parts[2]))
        if parts[0] == "h" and len(parts) == 2:
            return ("h", int(parts[1]))
    except ValueError:
        pass
    raise ParseError(f"bad basis label {text!r}")


def unit_basis(window: IndexWindow, field=QQ):
    one = field.one()
    return {("e", i, j): FinitaryMatrix._raw(field, {(i, j): one})
            for i in window.indices for j in window.indices}


def sl_basis(window: IndexWindow, pivot: int, field=QQ):
    if pivot not in window:
        raise ValueError(f"pivot {pivot} outside the window")
    one, mone = field.one(), field.neg(field.one())
    out = {}
    for i in window.indices:
        for j in window.indices:
            if i != j:
                out[("e", i, j)] = FinitaryMatrix._raw(field, {(i, j): one})
    for j in window.indices:
        if j != pivot:
            out[("h", j)] = FinitaryMatrix._raw(field, {(j, j): one, (pivot, pivot): mone})
    return out


def skew_basis(window: IndexWindow, inv: Involution, field=QQ):
    """Skew parts of the matrix units, one per orbit of the involution.

    For an orbit ``{u, u*}`` with ``u < u*`` the element is ``e_u - e_u*``;
    a unit with ``e_u* = -e_u`` is itself skew; units fixed with sign
    ``+1`` contribute nothing.
    """
    inv.check_window(window)
    one = field.one()
    out = {}
    for i in window.indices:
        for j in window.indices:
            sign, (p, q) = inv.map_unit(i, j)
            if (p, q) == (i, j):
                if sign == -1:
                    out[("k", i, j)] = FinitaryMatrix._raw(field, {(i, j): one})
                continue
            if (i, j) < (p, q):
                # e_u - sign·e_u*
                out[("k", i, j)] = FinitaryMatrix._raw(
                    field, {(i, j): one, (p, q): field.neg(field.coerce(sign))})
    return out


def basis_for(kind: BasisKind, window: IndexWindow, pivot: int, field=QQ):
    kind = BasisKind(kind)
    if kind is BasisKind.FULL:
        return unit_basis(window, field)
    if kind is BasisKind.SL:
        return sl_basis(window, pivot, field)
    return skew_basis(window, kind.involution, field)
