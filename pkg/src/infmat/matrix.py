"""Finite windows onto infinite matrices.

Three concrete representations share the :class:`Matrix` protocol:

* :class:`FinitaryMatrix` -- finite support, every entry known exactly;
* :class:`WindowedMatrix` -- a square window of an infinite matrix together
  with a class tag and a *guarantee region*, the window positions whose
  stored values are certified;
* :class:`~infmat.tails.TailMatrix` -- finitary core plus eventually
  constant diagonals (see :mod:`infmat.tails`).

The protocol is small.  ``probe(i, j)`` returns the exact value at
``(i, j)`` or ``None`` when it is not certified.  ``row_candidates(i)``
returns the set of columns that may hold a nonzero entry of row ``i`` (or
``None`` when that set is not bounded by anything the matrix knows), and
``col_candidates`` is its transpose.  Products and brackets are built on
these three calls, which is what makes the per-entry guarantee sound.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass
from types import MappingProxyType

from .errors import (
    BlockMisalignment,
    FieldMismatch,
    ModeMismatch,
    NotFinitary,
    UndefinedProduct,
    UnpairedWindow,
    WindowTooSmall,
)
from .scalars import QQ, Field, Scalar


class IndexMode(str, enum.Enum):
    NATURALS = "N"
    INTEGERS = "Z"


@dataclass(frozen=True)
class IndexWindow:
    """Inclusive index range ``lo..hi``; rows and columns share it."""

    lo: int
    hi: int
    mode: IndexMode = IndexMode.INTEGERS

    def __post_init__(self):
        object.__setattr__(self, "mode", IndexMode(self.mode))
        if self.lo > self.hi:
            raise ValueError(f"empty window [{self.lo}, {self.hi}]")
        if self.mode is IndexMode.NATURALS and self.lo != 1:
            raise ValueError("windows over the naturals start at 1")

    @classmethod
    def naturals(cls, hi):
        return cls(1, hi, IndexMode.NATURALS)

    @property
    def indices(self):
        return range(self.lo, self.hi + 1)

    @property
    def size(self):
        return self.hi - self.lo + 1

    @property
    def lower(self):
        return 1 if self.mode is IndexMode.NATURALS else None

    def __contains__(self, i):
        return self.lo <= i <= self.hi

    def holds(self, i, j):
        return self.lo <= i <= self.hi and self.lo <= j <= self.hi

    def positions(self):
        idx = self.indices
        return ((i, j) for i in idx for j in idx)

    def intersect(self, other: IndexWindow) -> IndexWindow:
        if self.mode is not other.mode:
            raise ModeMismatch(f"{self.mode.value} window with {other.mode.value} window")
        lo, hi = max(self.lo, other.lo), min(self.hi, other.hi)
        if lo > hi:
            raise ValueError("windows do not overlap")
        return IndexWindow(lo, hi, self.mode)

    def hull(self, other: IndexWindow) -> IndexWindow:
        if self.mode is not other.mode:
            raise ModeMismatch(f"{self.mode.value} window with {other.mode.value} window")
        return IndexWindow(min(self.lo, other.lo), max(self.hi, other.hi), self.mode)

    def shrink(self, margin):
        return IndexWindow(self.lo if self.mode is IndexMode.NATURALS else self.lo + margin,
                           self.hi - margin, self.mode)


class TagKind(str, enum.Enum):
    FINITARY = "finitary"
    BAND = "band"
    RCF = "rcf"
    ROW_FINITE = "row_finite"
    COLUMN_FINITE = "column_finite"


_RCF_LIKE = {TagKind.BAND, TagKind.RCF}


@dataclass(frozen=True)
class ClassTag:
    """Claimed class of the underlying infinite matrix.

    ``ROW_FINITE`` is the class of column-finite matrices with finitely many
    nonzero rows (finite-range endomorphisms), not "each row finite".
    """

    kind: TagKind
    bandwidth: int | None = None

    def __post_init__(self):
        object.__setattr__(self, "kind", TagKind(self.kind))
        if self.kind is TagKind.BAND:
            if self.bandwidth is None or self.bandwidth < 0:
                raise ValueError("band tags need a nonnegative bandwidth")
        elif self.bandwidth is not None:
            raise ValueError("only band tags carry a bandwidth")

    @classmethod
    def finitary(cls):
        return cls(TagKind.FINITARY)

    @classmethod
    def band(cls, k):
        return cls(TagKind.BAND, int(k))

    @classmethod
    def rcf(cls):
        return cls(TagKind.RCF)

    @classmethod
    def column_finite(cls):
        return cls(TagKind.COLUMN_FINITE)

    @classmethod
    def row_finite(cls):
        return cls(TagKind.ROW_FINITE)

    def __str__(self):
        if self.kind is TagKind.BAND:
            return f"band({self.bandwidth})"
        return self.kind.value

    @classmethod
    def parse(cls, text: str) -> ClassTag:
        text = text.strip().lower()
        if text.startswith("band"):
            inner = text[4:].strip("():= ")
            return cls.band(int(inner))
        aliases = {"finitary": TagKind.FINITARY, "rcf": TagKind.RCF,
                   "row_column_finite": TagKind.RCF, "column_finite": TagKind.COLUMN_FINITE,
                   "row_finite": TagKind.ROW_FINITE}
        if text not in aliases:
            raise ValueError(f"unknown class tag {text!r}")
        return cls(aliases[text])

    def excludes(self, i, j) -> bool:
        """True when the tag forces entry ``(i, j)`` to vanish."""
        return self.kind is TagKind.BAND and abs(i - j) > self.bandwidth

    def join(self, other: ClassTag) -> ClassTag:
        """Weakest class containing both."""
        a, b = self.kind, other.kind
        if a is TagKind.BAND and b is TagKind.BAND:
            return ClassTag.band(max(self.bandwidth, other.bandwidth))
        if a is b:
            return self
        if TagKind.FINITARY in (a, b):
            rest = other if a is TagKind.FINITARY else self
            return ClassTag.rcf() if rest.kind is TagKind.BAND else rest
        if a in _RCF_LIKE and b in _RCF_LIKE:
            return ClassTag.rcf()
        return ClassTag.column_finite()

    def product(self, other: ClassTag) -> ClassTag:
        """Class of ``x·y`` for ``x`` in ``self`` and ``y`` in ``other``."""
        a, b = self.kind, other.kind
        if a is TagKind.BAND and b is TagKind.BAND:
            return ClassTag.band(self.bandwidth + other.bandwidth)
        if b is TagKind.FINITARY:
            return ClassTag.finitary()
        if a is TagKind.FINITARY:
            return ClassTag.finitary() if b in _RCF_LIKE else ClassTag.row_finite()
        if TagKind.ROW_FINITE in (a, b):
            return ClassTag.row_finite()
        if a in _RCF_LIKE and b in _RCF_LIKE:
            return ClassTag.rcf()
        return ClassTag.column_finite()


def _add_entry(store, key, v, field):
    cur = store.get(key)
    nv = v if cur is None else field.add(cur, v)
    if nv == 0:
        store.pop(key, None)
    else:
        store[key] = nv


class Matrix:
    """Common protocol; see the module docstring."""

    field: Field
    lower: int | None = None

    @property
    def is_complete(self) -> bool:
        """Every entry of the underlying matrix is known exactly."""
        return False

    @property
    def window(self) -> IndexWindow | None:
        return None

    def probe(self, i, j):
        raise NotImplementedError

    def value(self, i, j):
        raise NotImplementedError

    def row_candidates(self, i):
        raise NotImplementedError

    def col_candidates(self, j):
        raise NotImplementedError

    def effective_bandwidth(self) -> int | None:
        return None

    @property
    def tag(self) -> ClassTag:
        raise NotImplementedError

    def __getitem__(self, pos):
        i, j = pos
        return self.value(i, j)

    def __add__(self, other):
        return elementwise_linear(self, other, 1, 1)

    def __sub__(self, other):
        return elementwise_linear(self, other, 1, -1)

    def __neg__(self):
        return scale(self, -1)

    def __mul__(self, c):
        if isinstance(c, Matrix):
            return NotImplemented
        return scale(self, c)

    __rmul__ = __mul__

    def __matmul__(self, other):
        return multiply(self, other)


class FinitaryMatrix(Matrix):
    """Finite-support matrix; omitted entries are zero."""

    def __init__(self, field: Field, entries=None):
        self.field = field
        store = {}
        for (i, j), v in (entries or {}).items():
            v = field.coerce(v)
            if v != 0:
                store[(int(i), int(j))] = v
        self._entries = store
        self._rows = {}
        self._cols = {}
        for (i, j), v in store.items():
            self._rows.setdefault(i, {})[j] = v
            self._cols.setdefault(j, {})[i] = v

    @classmethod
    def _raw(cls, field, store):
        # store already holds coerced nonzero values
        self = cls.__new__(cls)
        self.field = field
        self._entries = store
        self._rows, self._cols = {}, {}
        for (i, j), v in store.items():
            self._rows.setdefault(i, {})[j] = v
            self._cols.setdefault(j, {})[i] = v
        return self

    @classmethod
    def zero(cls, field=QQ):
        return cls._raw(field, {})

    @classmethod
    def identity(cls, indices, field=QQ):
        return cls._raw(field, {(i, i): field.one() for i in indices})

    @classmethod
    def from_dense(cls, rows, field=QQ, lo=1):
        return cls(field, {(lo + r, lo + c): v for r, row in enumerate(rows)
                           for c, v in enumerate(row)})

    @property
    def entries(self):
        return MappingProxyType(self._entries)

    @property
    def support(self):
        return frozenset(self._entries)

    @property
    def is_complete(self):
        return True

    @property
    def tag(self):
        return ClassTag.finitary()

    def __len__(self):
        return len(self._entries)

    def __bool__(self):
        return bool(self._entries)

    def __eq__(self, other):
        if isinstance(other, FinitaryMatrix):
            return self.field == other.field and self._entries == other._entries
        return NotImplemented

    def __hash__(self):
        return hash((self.field, frozenset(self._entries.items())))

    def __repr__(self):
        f = self.field
        body = ", ".join(f"({i},{j}): {f.format(v)}" for (i, j), v in sorted(self._entries.items()))
        return f"FinitaryMatrix({f!r}, {{{body}}})"

    def probe(self, i, j):
        return self._entries.get((i, j), self.field.zero())

    value = probe

    def row_items(self, i):
        return self._rows.get(i, {})

    def col_items(self, j):
        return self._cols.get(j, {})

    def row_candidates(self, i):
        return self._rows.get(i, {}).keys()

    def col_candidates(self, j):
        return self._cols.get(j, {}).keys()

    def effective_bandwidth(self):
        return max((abs(i - j) for i, j in self._entries), default=0)

    bandwidth = property(effective_bandwidth)

    def index_bounds(self):
        """``(min, max)`` over all row and column indices of the support."""
        if not self._entries:
            return None
        idx = [k for pos in self._entries for k in pos]
        return min(idx), max(idx)

    def dense(self, window: IndexWindow):
        z = self.field.zero()
        return [[self._entries.get((i, j), z) for j in window.indices] for i in window.indices]

    def scalar(self, i, j) -> Scalar:
        return Scalar(self.field, self.probe(i, j))


class WindowedMatrix(Matrix):
    """A window of an infinite matrix with a class tag and guarantee region.

    ``guarantee=None`` means every window position is certified.
    """

    def __init__(self, field: Field, window: IndexWindow, tag: ClassTag, entries=None,
                 guarantee=None):
        self.field = field
        self._window = window
        self._tag = tag
        store = {}
        for (i, j), v in (entries or {}).items():
            if not window.holds(i, j):
                raise ValueError(f"entry ({i},{j}) outside window [{window.lo},{window.hi}]")
            v = field.coerce(v)
            if v == 0:
                continue
            if tag.excludes(i, j):
                raise ValueError(f"entry ({i},{j}) violates {tag}")
            store[(i, j)] = v
        self._entries = store
        lo, hi = window.lo, window.hi
        if guarantee is not None:
            guarantee = frozenset(p for p in guarantee if lo <= p[0] <= hi and lo <= p[1] <= hi)
            if len(guarantee) == window.size ** 2:
                guarantee = None
        self._guarantee = guarantee
        self._all = None
        # flattened for probe, the hot path
        self._lo, self._hi, self._low = lo, hi, window.lower
        self._bw = tag.bandwidth if tag.kind is TagKind.BAND else None
        self._finitary = tag.kind is TagKind.FINITARY
        self._zero = field.zero()
        self._rows = {}
        for (i, j), v in store.items():
            self._rows.setdefault(i, {})[j] = v
        self._cols = {}
        for (i, j), v in store.items():
            self._cols.setdefault(j, {})[i] = v
        self._open_rows = {}
        self._open_cols = {}
        if guarantee is not None:
            bw = self._bw
            for i, j in window.positions():
                if (i, j) not in guarantee and (bw is None or abs(i - j) <= bw):
                    self._open_rows.setdefault(i, set()).add(j)
                    self._open_cols.setdefault(j, set()).add(i)

    @classmethod
    def from_finitary(cls, f: FinitaryMatrix, window: IndexWindow, tag: ClassTag | None = None):
        entries = {p: v for p, v in f.entries.items() if window.holds(*p)}
        if tag is None:
            tag = ClassTag.finitary() if len(entries) == len(f) else ClassTag.band(f.bandwidth)
        return cls(f.field, window, tag, entries)

    @property
    def window(self):
        return self._window

    @property
    def tag(self):
        return self._tag

    @property
    def lower(self):
        return self._window.lower

    @property
    def entries(self):
        return MappingProxyType(self._entries)

    @property
    def guarantee(self) -> frozenset:
        if self._guarantee is None:
            if self._all is None:
                self._all = frozenset(self._window.positions())
            return self._all
        return self._guarantee

    @property
    def fully_guaranteed(self):
        return self._guarantee is None

    def is_guaranteed(self, i, j):
        if not self._window.holds(i, j):
            return False
        return self._guarantee is None or (i, j) in self._guarantee

    @property
    def is_complete(self):
        return self._tag.kind is TagKind.FINITARY and self._guarantee is None

    def __eq__(self, other):
        if isinstance(other, WindowedMatrix):
            return (self.field == other.field and self._window == other._window
                    and self._tag == other._tag and self._entries == other._entries
                    and self.guarantee == other.guarantee)
        return NotImplemented

    __hash__ = None

    def __repr__(self):
        w = self._window
        return (f"WindowedMatrix({self.field!r}, [{w.lo},{w.hi}]/{w.mode.value}, {self._tag}, "
                f"nnz={len(self._entries)}, guaranteed={len(self.guarantee)}/{w.size ** 2})")

    def value(self, i, j):
        return self._entries.get((i, j), self.field.zero())

    def probe(self, i, j):
        z = self._zero
        bw = self._bw
        if bw is not None and abs(i - j) > bw:
            return z
        lo, hi = self._lo, self._hi
        if lo <= i <= hi and lo <= j <= hi:
            g = self._guarantee
            if g is None or (i, j) in g:
                return self._entries.get((i, j), z)
            return None
        low = self._low
        if low is not None and (i < low or j < low):
            return z
        return z if self._finitary else None

    def _offwindow(self, i):
        """Off-window indices that may pair with ``i`` (``None``: unbounded)."""
        w, tag = self._window, self._tag
        if tag.kind is TagKind.FINITARY:
            return set()
        if tag.kind is not TagKind.BAND:
            return None
        lo = i - tag.bandwidth
        if w.lower is not None:
            lo = max(lo, w.lower)
        return {k for k in range(lo, i + tag.bandwidth + 1) if k not in w}

    def row_candidates(self, i):
        off = self._offwindow(i)
        if off is None:
            return None
        if i not in self._window:
            return off
        return off | self._rows.get(i, {}).keys() | self._open_rows.get(i, set())

    def col_candidates(self, j):
        off = self._offwindow(j)
        if off is None:
            return None
        if j not in self._window:
            return off
        return off | self._cols.get(j, {}).keys() | self._open_cols.get(j, set())

    def effective_bandwidth(self):
        if self._tag.kind is TagKind.BAND:
            return self._tag.bandwidth
        if self.is_complete:
            return max((abs(i - j) for i, j in self._entries), default=0)
        return None

    def to_finitary(self) -> FinitaryMatrix:
        """The stored window entries as a finitary matrix."""
        return FinitaryMatrix._raw(self.field, dict(self._entries))

    def restrict(self, window: IndexWindow) -> WindowedMatrix:
        w = self._window.intersect(window)
        g = None if self._guarantee is None else {p for p in self._guarantee if w.holds(*p)}
        return WindowedMatrix(self.field, w, self._tag,
                              {p: v for p, v in self._entries.items() if w.holds(*p)}, g)

    def dense(self, window: IndexWindow | None = None):
        window = window or self._window
        z = self.field.zero()
        return [[self._entries.get((i, j), z) for j in window.indices] for i in window.indices]


# ---------------------------------------------------------------- construction


def matrix_unit(i, j, field: Field = QQ) -> FinitaryMatrix:
    return FinitaryMatrix._raw(field, {(i, j): field.one()})


@dataclass(frozen=True)
class BlockIndexMap:
    """Flatten block coordinates ``(n, alpha)`` to ``(n - 1)·m + alpha``."""

    block_size: int

    def __post_init__(self):
        if self.block_size < 1:
            raise ValueError("block size must be positive")

    def to_flat(self, n, alpha):
        if n < 1 or not 1 <= alpha <= self.block_size:
            raise IndexError(f"block coordinate ({n}, {alpha}) out of range")
        return (n - 1) * self.block_size + alpha

    def from_flat(self, p):
        if p < 1:
            raise IndexError(f"flat index {p} is not positive")
        n, r = divmod(p - 1, self.block_size)
        return n + 1, r + 1

    def from_blocks(self, blocks, field=QQ) -> FinitaryMatrix:
        """Assemble ``{(n, n'): dense m×m block}`` into a flat finitary matrix."""
        m = self.block_size
        out = {}
        for (n, n2), blk in blocks.items():
            for a in range(m):
                for b in range(m):
                    v = field.coerce(blk[a][b])
                    if v != 0:
                        out[(self.to_flat(n, a + 1), self.to_flat(n2, b + 1))] = v
        return FinitaryMatrix._raw(field, out)

    def block(self, mat: Matrix, n, n2):
        m = self.block_size
        return [[mat.value(self.to_flat(n, a), self.to_flat(n2, b)) for b in range(1, m + 1)]
                for a in range(1, m + 1)]


def shift_matrix(window: IndexWindow, block_size: int = 1, field: Field = QQ) -> WindowedMatrix:
    """Window of the blockwise upper shift ``sum_i e_{i,i+1}(Id)``.

    In flat indexing the shift has ones at ``(p, p + m)``.  Over the integers
    only ``m = 1`` is meaningful.
    """
    m = block_size
    if window.mode is IndexMode.INTEGERS and m != 1:
        raise BlockMisalignment("the integer shift has block size 1")
    if window.mode is IndexMode.NATURALS and window.size % m:
        raise BlockMisalignment(f"window length {window.size} not divisible by {m}")
    if window.size < 2 * m:
        raise WindowTooSmall("the shift needs at least two blocks in the window")
    one = field.one()
    entries = {(p, p + m): one for p in range(window.lo, window.hi - m + 1)}
    return WindowedMatrix(field, window, ClassTag.band(m), entries)


# ----------------------------------------------------------------- arithmetic


def _check_fields(*mats):
    f = mats[0].field
    for m in mats[1:]:
        if m.field != f:
            raise FieldMismatch(f"{f!r} vs {m.field!r}")
    return f


def _lower_of(*mats):
    lows = {m.lower for m in mats if m.lower is not None}
    modes = {m.window.mode for m in mats if m.window is not None}
    if len(modes) > 1 or (lows and IndexMode.INTEGERS in modes):
        raise ModeMismatch("operands live on different index sets")
    return lows.pop() if lows else None


def _is_tail(m):
    from .tails import TailMatrix
    return isinstance(m, TailMatrix)


def _as_tail(m, like):
    from .tails import TailMatrix
    if isinstance(m, TailMatrix):
        return m
    return TailMatrix(m.field, core=m, mode=like.mode, period=like.period)


def scale(a: Matrix, c) -> Matrix:
    f = a.field
    c = f.coerce(c)
    if isinstance(a, FinitaryMatrix):
        if c == 0:
            return FinitaryMatrix.zero(f)
        return FinitaryMatrix._raw(f, {p: f.mul(c, v) for p, v in a.entries.items()})
    return elementwise_linear(a, a, c, 0)


def elementwise_linear(a: Matrix, b: Matrix, alpha=1, beta=1) -> Matrix:
    """``alpha·a + beta·b``.

    Exact operands give exact results.  Otherwise the result lives on the
    intersection of the windows of the inexact operands; a position is
    certified when both operands are certified there.
    """
    f = _check_fields(a, b)
    alpha, beta = f.coerce(alpha), f.coerce(beta)
    _lower_of(a, b)
    if a.is_complete and b.is_complete:
        if isinstance(a, FinitaryMatrix) and isinstance(b, FinitaryMatrix):
            out = {}
            for p, v in a.entries.items():
                _add_entry(out, p, f.mul(alpha, v), f)
            for p, v in b.entries.items():
                _add_entry(out, p, f.mul(beta, v), f)
            return FinitaryMatrix._raw(f, out)
        if _is_tail(a) or _is_tail(b):
            from .tails import tail_linear
            like = a if _is_tail(a) else b
            return tail_linear(_as_tail(a, like), _as_tail(b, like), alpha, beta)
        a = _promote(a)
        b = _promote(b)
        return elementwise_linear(a, b, alpha, beta)

    wins = [m for m in (a, b) if not m.is_complete and m.window is not None]
    if all(m.tag.kind is TagKind.FINITARY for m in wins):
        window = wins[0].window if len(wins) == 1 else wins[0].window.hull(wins[1].window)
    else:
        window = wins[0].window if len(wins) == 1 else wins[0].window.intersect(wins[1].window)

    ba, bb = a.effective_bandwidth(), b.effective_bandwidth()
    if ba is not None and bb is not None and not (a.tag.kind is b.tag.kind is TagKind.FINITARY):
        tag = ClassTag.band(max(ba, bb))
    else:
        tag = a.tag.join(b.tag)

    one = f.one()
    sa = (lambda v: v) if alpha == one else (lambda v: f.mul(alpha, v))
    if beta == one:
        def combine(va, vb):
            return f.add(sa(va), vb)
    elif beta == f.neg(one):
        def combine(va, vb):
            return f.sub(sa(va), vb)
    else:
        def combine(va, vb):
            return f.add(sa(va), f.mul(beta, vb))

    entries, guarantee = {}, set()
    for i, j in window.positions():
        pa, pb = a.probe(i, j), b.probe(i, j)
        if pa is not None and pb is not None:
            guarantee.add((i, j))
            va, vb = pa, pb
        else:
            va, vb = a.value(i, j), b.value(i, j)
        v = combine(va, vb)
        if v != 0:
            entries[(i, j)] = v
    return WindowedMatrix(f, window, tag, entries, guarantee)


def _promote(m):
    """Complete windowed matrices become finitary ones."""
    if isinstance(m, WindowedMatrix) and m.is_complete:
        return m.to_finitary()
    return m


def _exact_product(a, b, f):
    out = {}
    if isinstance(a, FinitaryMatrix):
        for (i, k), v in a.entries.items():
            for j, w in b.row_items(k).items():
                _add_entry(out, (i, j), f.mul(v, w), f)
    else:
        for (k, j), w in b.entries.items():
            for i, v in a.col_items(k).items():
                _add_entry(out, (i, j), f.mul(v, w), f)
    return FinitaryMatrix._raw(f, out)


def multiply(a: Matrix, b: Matrix, window: IndexWindow | None = None) -> Matrix:
    """Product with per-entry certification.

    Position ``(i, j)`` is certified when every index ``k`` that could
    contribute ``a[i,k]·b[k,j] != 0`` is bounded by what the operands know
    (complete support or band structure) and both factors are certified at
    every such ``k``.  The stored value sums the in-window contributions.
    """
    f = _check_fields(a, b)
    lower = _lower_of(a, b)
    a, b = _promote(a), _promote(b)
    if a.is_complete and b.is_complete and window is None:
        if isinstance(a, FinitaryMatrix) or isinstance(b, FinitaryMatrix):
            return _exact_product(a, b, f)
        raise UndefinedProduct("product of two tail matrices needs an explicit window")

    wins = [m.window for m in (a, b) if not m.is_complete and m.window is not None]
    if window is None:
        if not wins:
            raise UndefinedProduct("no window to evaluate the product on")
        window = wins[0] if len(wins) == 1 else wins[0].intersect(wins[1])

    ba, bb = a.effective_bandwidth(), b.effective_bandwidth()
    if ba is not None and bb is not None:
        tag = ClassTag.band(ba + bb)
    else:
        tag = a.tag.product(b.tag)
        if tag.kind is TagKind.FINITARY:
            tag = ClassTag.rcf()

    zero = f.zero()
    entries, guarantee = {}, set()
    col_cands = {j: b.col_candidates(j) for j in window.indices}
    # reach[k]: the columns j whose candidate set contains k
    reach = None
    if all(c is not None for c in col_cands.values()):
        reach = {}
        for j, kb in col_cands.items():
            for k in kb:
                reach.setdefault(k, []).append(j)
    for i in window.indices:
        if lower is not None and i < lower:
            continue
        ka = a.row_candidates(i)
        cols = window.indices
        if ka is not None and reach is not None:
            hit = set()
            for k in ka:
                hit.update(reach.get(k, ()))
            # no shared candidate: the entry is a certified zero
            guarantee.update((i, j) for j in window.indices if j not in hit)
            cols = sorted(hit)
        for j in cols:
            kb = col_cands[j]
            if ka is None and kb is None:
                acc = zero
                for k in window.indices:
                    acc = f.add(acc, f.mul(a.value(i, k), b.value(k, j)))
                if acc != 0:
                    entries[(i, j)] = acc
                continue
            if ka is None:
                cands = kb
            elif kb is None:
                cands = ka
            else:
                cands = ka & kb if len(ka) > len(kb) else [k for k in ka if k in kb]
            acc = zero
            certain = True
            for k in cands:
                pa = a.probe(i, k)
                if pa is not None and pa == 0:
                    continue
                pb = b.probe(k, j)
                if pb is not None and pb == 0:
                    continue
                if pa is None or pb is None:
                    certain = False
                    if k in window:
                        acc = f.add(acc, f.mul(a.value(i, k), b.value(k, j)))
                else:
                    acc = f.add(acc, f.mul(pa, pb))
            if acc != 0:
                entries[(i, j)] = acc
            if certain:
                guarantee.add((i, j))
    return WindowedMatrix(f, window, tag, entries, guarantee)


def bracket(a: Matrix, b: Matrix, window: IndexWindow | None = None) -> Matrix:
    """Commutator ``ab - ba``."""
    if isinstance(a, FinitaryMatrix) and isinstance(b, FinitaryMatrix) and window is None:
        f = _check_fields(a, b)
        out = {}
        for (i, k), v in a.entries.items():
            for j, w in b.row_items(k).items():
                _add_entry(out, (i, j), f.mul(v, w), f)
        for (i, k), v in b.entries.items():
            for j, w in a.row_items(k).items():
                _add_entry(out, (i, j), f.neg(f.mul(v, w)), f)
        return FinitaryMatrix._raw(f, out)
    return elementwise_linear(multiply(a, b, window), multiply(b, a, window), 1, -1)


# ---------------------------------------------------------------- involutions


class InvolutionKind(str, enum.Enum):
    TRANSPOSE = "t"
    SYMPLECTIC = "s"


def partner(i):
    """Symplectic pairing ``2r-1 <-> 2r``."""
    return i + 1 if i % 2 else i - 1


def _parity_sign(i):
    return 1 if i % 2 == 0 else -1


@dataclass(frozen=True)
class Involution:
    """Transpose, or the symplectic involution ``a -> J⁻¹ aᵗ J``.

    ``J`` is block diagonal with blocks ``[[0, 1], [-1, 0]]`` on the index
    pairs ``(2r-1, 2r)``.  On matrix units this is
    ``e_ij -> s(i)s(j) e_{σ(j)σ(i)}`` with ``s(k) = +1`` for even ``k`` and
    ``-1`` for odd ``k``, and ``σ`` the pairing.
    """

    kind: InvolutionKind

    def __post_init__(self):
        object.__setattr__(self, "kind", InvolutionKind(self.kind))

    @classmethod
    def transpose(cls):
        return cls(InvolutionKind.TRANSPOSE)

    @classmethod
    def symplectic(cls):
        return cls(InvolutionKind.SYMPLECTIC)

    def map_unit(self, i, j):
        """``(sign, (p, q))`` with ``e_ij* = sign·e_pq``."""
        if self.kind is InvolutionKind.TRANSPOSE:
            return 1, (j, i)
        return _parity_sign(i) * _parity_sign(j), (partner(j), partner(i))

    def check_window(self, window: IndexWindow):
        if self.kind is InvolutionKind.SYMPLECTIC and (window.lo % 2 == 0 or window.hi % 2):
            raise UnpairedWindow(f"window [{window.lo},{window.hi}] is not aligned to pairs")

    def form(self, window: IndexWindow, field: Field = QQ) -> FinitaryMatrix:
        """The Gram matrix ``J`` (identity for the transpose) on ``window``."""
        self.check_window(window)
        one = field.one()
        if self.kind is InvolutionKind.TRANSPOSE:
            return FinitaryMatrix.identity(window.indices, field)
        out = {}
        for i in range(window.lo, window.hi + 1, 2):
            out[(i, i + 1)] = one
            out[(i + 1, i)] = field.neg(one)
        return FinitaryMatrix._raw(field, out)


def involute(a: Matrix, inv: Involution) -> Matrix:
    f = a.field
    if _is_tail(a):
        from .tails import involute_tail
        return involute_tail(a, inv)
    if isinstance(a, FinitaryMatrix):
        out = {}
        for (i, j), v in a.entries.items():
            s, q = inv.map_unit(i, j)
            out[q] = v if s == 1 else f.neg(v)
        return FinitaryMatrix._raw(f, out)
    if a.tag.kind not in (TagKind.FINITARY, TagKind.BAND, TagKind.RCF):
        raise UndefinedProduct(f"involutions are defined on rcf matrices, not {a.tag}")
    inv.check_window(a.window)
    out = {}
    for (i, j), v in a.entries.items():
        s, q = inv.map_unit(i, j)
        out[q] = v if s == 1 else f.neg(v)
    g = None
    if not a.fully_guaranteed:
        g = {inv.map_unit(i, j)[1] for i, j in a.guarantee}
    return WindowedMatrix(f, a.window, a.tag, out, g)


def skew_project(a: Matrix, inv: Involution):
    """Split ``a = h + k`` with ``h* = h`` and ``k* = -k``."""
    f = a.field
    half = f.inv(f.coerce(2))
    star = involute(a, inv)
    return (elementwise_linear(a, star, half, half),
            elementwise_linear(a, star, half, f.neg(half)))


def is_zero(a: Matrix) -> bool:
    if isinstance(a, FinitaryMatrix):
        return not a.entries
    if _is_tail(a):
        return a.is_zero()
    return not a.entries


# ------------------------------------------------------------------- reports


@dataclass(frozen=True)
class ClassCheck:
    """Outcome of :func:`check_class`."""

    ok: bool
    tag: ClassTag
    violation: tuple | None = None
    vacuous: bool = False
    note: str = ""

    def __bool__(self):
        return self.ok


def check_class(a: Matrix, tag: ClassTag) -> ClassCheck:
    """Check every constraint of ``tag`` that is observable on ``a``.

    Band and finitary claims are decidable for exact representations and
    for the stored part of a window.  The remaining classes impose nothing
    a finite window can refute, so such checks pass as vacuous.
    """
    if tag.kind is TagKind.BAND:
        k = tag.bandwidth
        if _is_tail(a):
            for (i, j) in sorted(a.core.entries):
                if abs(i - j) > k:
                    return ClassCheck(False, tag, (i, j))
            for t in a.tails:
                if abs(t.offset) > k:
                    return ClassCheck(False, tag, (t.start, t.start - t.offset),
                                      note="diagonal tail outside the band")
            return ClassCheck(True, tag)
        for (i, j) in sorted(a.entries):
            if abs(i - j) > k:
                return ClassCheck(False, tag, (i, j))
        if isinstance(a, WindowedMatrix) and a.effective_bandwidth() is None:
            return ClassCheck(True, tag, vacuous=True, note="off-window entries unconstrained")
        return ClassCheck(True, tag)
    if tag.kind is TagKind.FINITARY or tag.kind is TagKind.ROW_FINITE:
        if _is_tail(a):
            if a.tails:
                t = a.tails[0]
                return ClassCheck(False, tag, (t.start, t.start - t.offset),
                                  note="nonzero diagonal tail has infinite support")
            return ClassCheck(True, tag)
        if isinstance(a, WindowedMatrix) and not a.is_complete:
            return ClassCheck(True, tag, vacuous=True, note="window cannot certify completeness")
        return ClassCheck(True, tag)
    if isinstance(a, WindowedMatrix):
        return ClassCheck(True, tag, vacuous=True, note="not decidable on a window")
    return ClassCheck(True, tag)


def trace(a: Matrix) -> Scalar:
    a = _promote(a)
    if not isinstance(a, FinitaryMatrix):
        raise NotFinitary("trace needs a finitary matrix")
    f = a.field
    acc = f.zero()
    for (i, j), v in a.entries.items():
        if i == j:
            acc = f.add(acc, v)
    return Scalar(f, acc)
