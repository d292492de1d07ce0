"""Finitary core plus eventually constant diagonal tails.

A tail ``(d, start, v)`` puts ``v`` at ``(i, i - d)`` for every row ``i`` on
the ray ``start, start + P, start + 2P, ...`` (``NATURALS`` mode) or
``start, start - P, ...`` (``INTEGERS_LOWER`` mode), where ``P`` is the
matrix period.  With ``P = 1`` these are ordinary constant diagonals; the
shift by a block of size ``m`` produces rays of step ``m``, hence the
period.

Each row and each column meets a tail at most once, so every such matrix
is row-and-column finite.  The class is closed under linear combinations,
products with finitary matrices, the involutions, and brackets with the
shift -- not under general products, where two constant tails produce
linearly growing diagonals.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass

from .errors import FieldMismatch, ModeMismatch
from .matrix import (
    ClassTag,
    FinitaryMatrix,
    IndexMode,
    Involution,
    InvolutionKind,
    Matrix,
    _add_entry,
    _exact_product,
    involute,
    partner,
    _parity_sign,
)
from .scalars import QQ


class TailMode(str, enum.Enum):
    NATURALS = "N"
    INTEGERS_LOWER = "Zlower"


@dataclass(frozen=True)
class Tail:
    offset: int
    start: int
    value: object


class TailMatrix(Matrix):
    """Finitary core plus diagonal tails, kept in canonical form.

    The constructor reads ``core`` and ``tails`` additively (overlaps sum),
    then normalizes: one tail per (offset, residue) class, every tail
    started as early as the entries allow, and a core disjoint from the
    tail regions.  Equal entry functions therefore have equal
    representations at equal period.
    """

    def __init__(self, field=QQ, core=None, tails=(), mode=TailMode.NATURALS, period=1):
        self.field = field
        self.mode = TailMode(mode)
        self._naturals = self.mode is TailMode.NATURALS
        if period < 1:
            raise ValueError("period must be positive")
        self.period = int(period)
        if isinstance(core, FinitaryMatrix):
            if core.field != field:
                raise FieldMismatch(f"{core.field!r} core in {field!r} tail matrix")
            core = dict(core.entries)
        else:
            core = {(int(i), int(j)): field.coerce(v) for (i, j), v in (core or {}).items()}
            core = {p: v for p, v in core.items() if v != 0}
        if self.mode is TailMode.NATURALS:
            for i, j in core:
                if i < 1 or j < 1:
                    raise ValueError(f"core entry ({i},{j}) outside the naturals")
        rays = []
        for t in tails:
            d, s, v = (t.offset, t.start, t.value) if isinstance(t, Tail) else t
            rays.append((int(d), int(s), field.coerce(v)))
        self._normalize(core, rays)

    # ---------------------------------------------------------------- layout

    @property
    def _dir(self):
        return 1 if self.mode is TailMode.NATURALS else -1

    @property
    def lower(self):
        return 1 if self.mode is TailMode.NATURALS else None

    def _first_valid(self, d, s):
        """First row on the ray from ``s`` whose position is a legal index."""
        if self.mode is TailMode.NATURALS:
            need = max(1, d + 1)
            if s < need:
                s += -(-(need - s) // self.period) * self.period
        return s

    def _valid_row(self, d, i):
        return self.mode is not TailMode.NATURALS or (i >= 1 and i - d >= 1)

    def _beyond(self, i, s):
        """Row ``i`` is on the far side of (or at) ``s``."""
        return i >= s if self._dir == 1 else i <= s

    def _normalize(self, core, rays):
        f, P, step = self.field, self.period, self.period * self._dir
        groups = {}
        for d, s, v in rays:
            if v == 0:
                continue
            s = self._first_valid(d, s)
            groups.setdefault((d, s % P), []).append((s, v))

        by_class = {}
        for (i, j), v in core.items():
            by_class.setdefault((i - j, i % P), []).append(i)

        tails = {}
        for key, members in groups.items():
            d = key[0]
            far = max(s for s, _ in members) if step > 0 else min(s for s, _ in members)
            total = f.zero()
            for s, v in members:
                total = f.add(total, v)
                i = s
                while i != far:
                    _add_entry(core, (i, i - d), v, f)
                    by_class.setdefault(key, []).append(i)
                    i += step
            s = far
            # core entries inside the region force the tail to start later
            hits = [i for i in by_class.get(key, ()) if self._beyond(i, s) and (i, i - d) in core]
            if hits and total != 0:
                last = max(hits) if step > 0 else min(hits)
                i = s
                while True:
                    _add_entry(core, (i, i - d), total, f)
                    if i == last:
                        break
                    i += step
                s = last + step
            if total == 0:
                continue
            # start as early as the core allows
            while True:
                prev = s - step
                if not self._valid_row(d, prev) or core.get((prev, prev - d)) != total:
                    break
                del core[(prev, prev - d)]
                s = prev
            tails[key] = Tail(d, s, total)
        self._core = FinitaryMatrix._raw(self.field, {p: v for p, v in core.items() if v != 0})
        self._tails = tails
        self._tail_list = tuple(sorted(tails.values(), key=lambda t: (t.offset, t.start)))

    # -------------------------------------------------------------- protocol

    @property
    def core(self) -> FinitaryMatrix:
        return self._core

    @property
    def tails(self):
        return self._tail_list

    @property
    def is_complete(self):
        return True

    @property
    def tag(self):
        return ClassTag.band(self.effective_bandwidth())

    def effective_bandwidth(self):
        return max([self._core.effective_bandwidth()] + [abs(t.offset) for t in self._tail_list])

    def is_zero(self):
        return not self._tail_list and not self._core

    def entry(self, i, j):
        """Constant-time evaluation of entry ``(i, j)``."""
        v = self._core._entries.get((i, j))
        if v is not None:
            return v
        if self._naturals and (i < 1 or j < 1):
            return self.field.zero()
        t = self._tails.get((i - j, i % self.period))
        if t is not None and self._beyond(i, t.start):
            return t.value
        return self.field.zero()

    probe = entry
    value = entry

    def _on_ray(self, t, i):
        return (i - t.start) % self.period == 0 and self._beyond(i, t.start)

    def row_items(self, i):
        out = dict(self._core.row_items(i))
        for t in self._tail_list:
            if self._on_ray(t, i):
                out[i - t.offset] = t.value
        return out

    def col_items(self, j):
        out = dict(self._core.col_items(j))
        for t in self._tail_list:
            i = j + t.offset
            if self._on_ray(t, i):
                out[i] = t.value
        return out

    def row_candidates(self, i):
        return self.row_items(i).keys()

    def col_candidates(self, j):
        return self.col_items(j).keys()

    def dense(self, window):
        return [[self.entry(i, j) for j in window.indices] for i in window.indices]

    def rays(self):
        return [(t.offset, t.start, t.value) for t in self._tail_list]

    def with_period(self, period) -> TailMatrix:
        """Same entry function, tails split into residue classes mod ``period``."""
        if period % self.period:
            raise ValueError(f"{period} is not a multiple of {self.period}")
        k = period // self.period
        step = self.period * self._dir
        rays = [(t.offset, t.start + r * step, t.value) for t in self._tail_list for r in range(k)]
        return TailMatrix(self.field, self._core, rays, self.mode, period)

    def __eq__(self, other):
        if isinstance(other, FinitaryMatrix):
            return not self._tail_list and self._core == other
        if not isinstance(other, TailMatrix):
            return NotImplemented
        if self.field != other.field or self.mode is not other.mode:
            return False
        L = math.lcm(self.period, other.period)
        a, b = self.with_period(L), other.with_period(L)
        return a._core == b._core and a._tails == b._tails

    __hash__ = None

    def __repr__(self):
        f = self.field
        tails = ", ".join(f"({t.offset},{t.start},{f.format(t.value)})" for t in self._tail_list)
        return (f"TailMatrix({f!r}, mode={self.mode.value}, period={self.period}, "
                f"core_nnz={len(self._core)}, tails=[{tails}])")


# ------------------------------------------------------------- operations


def tail_entry(m: TailMatrix, i, j):
    return m.entry(i, j)


def tail_linear(a: TailMatrix, b: TailMatrix, alpha=1, beta=1) -> TailMatrix:
    """Exact ``alpha·a + beta·b``; merged tails start where both agree."""
    if a.field != b.field:
        raise FieldMismatch(f"{a.field!r} vs {b.field!r}")
    if a.mode is not b.mode:
        raise ModeMismatch(f"{a.mode.value} vs {b.mode.value}")
    f = a.field
    alpha, beta = f.coerce(alpha), f.coerce(beta)
    L = math.lcm(a.period, b.period)
    if a.period != L:
        a = a.with_period(L)
    if b.period != L:
        b = b.with_period(L)
    core = {}
    rays = []
    for m, c in ((a, alpha), (b, beta)):
        if c == 0:
            continue
        for p, v in m.core.entries.items():
            _add_entry(core, p, f.mul(c, v), f)
        rays.extend((t.offset, t.start, f.mul(c, t.value)) for t in m.tails)
    return TailMatrix(f, core, rays, a.mode, L)


def tail_mul_finitary(side: str, fin: FinitaryMatrix, m: TailMatrix) -> FinitaryMatrix:
    """``fin·m`` (``side="left"``) or ``m·fin`` (``side="right"``), exactly."""
    if fin.field != m.field:
        raise FieldMismatch(f"{fin.field!r} vs {m.field!r}")
    side = side.lower()
    if side == "left":
        return _exact_product(fin, m, m.field)
    if side == "right":
        return _exact_product(m, fin, m.field)
    raise ValueError(f"side must be 'left' or 'right', not {side!r}")


def _shift_parts(m: TailMatrix, s):
    """``(E·m, m·E)`` for the shift with ones at ``(p, p + s)``."""
    f = m.field
    up = {}
    right = {}
    for (i, j), v in m.core.entries.items():
        if m.mode is not TailMode.NATURALS or i - s >= 1:
            up[(i - s, j)] = v
        right[(i, j + s)] = v
    up_rays = [(t.offset - s, t.start - s, t.value) for t in m.tails]
    right_rays = [(t.offset - s, t.start, t.value) for t in m.tails]
    return (TailMatrix(f, up, up_rays, m.mode, m.period),
            TailMatrix(f, right, right_rays, m.mode, m.period))


def tail_shift_bracket(m: TailMatrix, mode=IndexMode.NATURALS, shift: int = 1) -> TailMatrix:
    """``[E, m]`` where ``E`` is the shift by ``shift`` on the matching index set."""
    mode = IndexMode(mode)
    expected = TailMode.NATURALS if mode is IndexMode.NATURALS else TailMode.INTEGERS_LOWER
    if m.mode is not expected:
        raise ModeMismatch(f"shift over {mode.value} applied to a {m.mode.value} tail matrix")
    em, me = _shift_parts(m, shift)
    return tail_linear(em, me, 1, -1)


def involute_tail(m: TailMatrix, inv: Involution) -> TailMatrix:
    f = m.field
    if inv.kind is InvolutionKind.TRANSPOSE:
        rays = [(-t.offset, t.start - t.offset, t.value) for t in m.tails]
        return TailMatrix(f, involute(m.core, inv), rays, m.mode, m.period)
    L = math.lcm(m.period, 2)
    m2 = m.with_period(L)
    # re-splitting may move core entries onto rays, so take both from m2
    core = involute(m2.core, inv)
    rays = []
    for t in m2.tails:
        i, j = t.start, t.start - t.offset
        sign = _parity_sign(i) * _parity_sign(j)
        p, q = partner(j), partner(i)
        rays.append((p - q, p, t.value if sign == 1 else f.neg(t.value)))
    return TailMatrix(f, core, rays, m.mode, L)
