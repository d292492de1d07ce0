"""Inverting ``ad(E)`` for the shift ``E``, and bracket-span decompositions.

Over the naturals with block size ``m`` (flat indices, ``E`` has ones at
``(p, p + m)``) the preimage of ``a`` is

    ã[p, q] = sum_{t >= 0} a[p - m(t + 1), q - m·t]

with entries at nonpositive indices read as zero, so that
``ã[p + m, q] - ã[p, q - m] = a[p, q]``.  Over the integers (``m = 1``)

    ã[i, j] =  a[i-1, j] + a[i-2, j-1] + ... + a[1, j-i+2]     (i >= 2)
    ã[1, j] =  0
    ã[i, j] = -(a[i, j+1] + a[i+1, j+2] + ... + a[0, j-i+1])   (i <= 0)

and ``ã[i+1, j] - ã[i, j-1] = a[i, j]``.  Finitary inputs have exact tail
images (each nonzero entry of ``a`` spawns one diagonal ray); windowed
inputs give windowed images with per-entry guarantees.  Verification never
reuses these formulas: it multiplies by a window of ``E`` through
:func:`~infmat.matrix.multiply`.
"""

from __future__ import annotations

from dataclasses import dataclass, field as dc_field
from itertools import combinations

from . import linalg
from .errors import BlockMisalignment, FieldMismatch, ModeMismatch, NotBand
from .matrix import (
    ClassCheck,
    ClassTag,
    FinitaryMatrix,
    IndexMode,
    IndexWindow,
    Matrix,
    TagKind,
    WindowedMatrix,
    bracket,
    check_class,
    shift_matrix,
)
from .tails import TailMatrix, TailMode


@dataclass(frozen=True)
class AdInverseReport:
    """Where ``[E, ã]`` and ``a`` were compared, and what was found."""

    window: IndexWindow
    agreed: frozenset
    mismatches: tuple = ()
    unverified: frozenset = frozenset()

    @property
    def ok(self):
        return not self.mismatches

    @property
    def full(self):
        """No mismatch and every window position certified."""
        return self.ok and not self.unverified

    @property
    def first_mismatch(self):
        return self.mismatches[0] if self.mismatches else None

    def covers(self, window: IndexWindow) -> bool:
        return all(p in self.agreed for p in window.positions())


@dataclass(frozen=True)
class PreservationReport:
    checks: dict = dc_field(default_factory=dict)

    @property
    def ok(self):
        return all(c.ok for c in self.checks.values())


@dataclass(frozen=True)
class TildeResult:
    image: Matrix
    verified_region: frozenset
    report: AdInverseReport
    class_report: PreservationReport

    @property
    def ok(self):
        return self.report.ok and bool(self.verified_region) and self.class_report.ok


# -------------------------------------------------------------- tilde images


def _check_naturals(a: Matrix):
    if isinstance(a, FinitaryMatrix):
        bounds = a.index_bounds()
        if bounds and bounds[0] < 1:
            raise ModeMismatch("finitary input has indices outside the naturals")
    elif a.window is not None and a.window.mode is not IndexMode.NATURALS:
        raise ModeMismatch("tilde over the naturals needs an N-mode window")
    elif isinstance(a, TailMatrix) and a.mode is not TailMode.NATURALS:
        raise ModeMismatch("tilde over the naturals needs an N-mode tail matrix")


def tilde_rays(a: FinitaryMatrix, block_size: int = 1) -> TailMatrix:
    """Exact image of a finitary matrix over the naturals."""
    m = block_size
    rays = [(r - c + m, r + m, v) for (r, c), v in a.entries.items()]
    return TailMatrix(a.field, None, rays, TailMode.NATURALS, m)


def tilde_window_n(a: WindowedMatrix, block_size: int = 1) -> WindowedMatrix:
    """Windowed image over the naturals with per-entry guarantees."""
    m = block_size
    w = a.window
    if w.size % m:
        raise BlockMisalignment(f"window length {w.size} not divisible by block size {m}")
    f = a.field
    entries, guarantee = {}, set()
    bw = a.effective_bandwidth()
    for p in w.indices:
        for q in w.indices:
            if bw is not None and abs(p - q - m) > bw:
                guarantee.add((p, q))
                continue
            acc, certain = f.zero(), True
            r, c = p - m, q
            while r >= 1 and c >= 1:
                v = a.probe(r, c)
                if v is None:
                    certain = False
                    v = a.value(r, c)
                if v != 0:
                    acc = f.add(acc, v)
                r -= m
                c -= m
            if acc != 0:
                entries[(p, q)] = acc
            if certain:
                guarantee.add((p, q))
    if bw is not None:
        tag = ClassTag.band(bw + m)
    elif a.tag.kind in (TagKind.RCF, TagKind.FINITARY):
        tag = ClassTag.rcf()
    else:
        tag = ClassTag.column_finite()
    return WindowedMatrix(f, w, tag, entries, guarantee)


def _shift_for(window: IndexWindow, m: int, field):
    """A window of ``E`` wide enough to certify ``[E, ã]`` on ``window``."""
    if window.mode is IndexMode.NATURALS:
        hi = window.hi + m
        hi += (-hi) % m
        return shift_matrix(IndexWindow.naturals(hi), m, field)
    return shift_matrix(IndexWindow(window.lo - 1, window.hi + 1), 1, field)


def default_probe_window(a: Matrix, block_size: int = 1) -> IndexWindow:
    """``[1, 3·B]`` with ``B`` the largest support index, rounded to blocks."""
    m = block_size
    if isinstance(a, FinitaryMatrix):
        bounds = a.index_bounds()
        top = max(3 * (bounds[1] if bounds else 1), 2 * m)
    else:
        top = a.window.hi
    top += (-top) % m
    return IndexWindow.naturals(top)


def tilde_n(a: Matrix, block_size: int = 1, verify_window: IndexWindow | None = None) -> TildeResult:
    """Preimage of ``a`` under ``ad(E)`` over the naturals, verified.

    Finitary input yields a :class:`TailMatrix` (period ``block_size``);
    windowed input yields a :class:`WindowedMatrix` on the same window.
    """
    _check_naturals(a)
    m = block_size
    if m < 1:
        raise BlockMisalignment("block size must be positive")
    if isinstance(a, WindowedMatrix) and a.is_complete:
        a = a.to_finitary()
    if isinstance(a, FinitaryMatrix):
        image = tilde_rays(a, m)
    elif isinstance(a, WindowedMatrix):
        image = tilde_window_n(a, m)
    else:
        raise TypeError(f"cannot take tilde of {type(a).__name__}")
    window = verify_window or (default_probe_window(a, m) if image.window is None else image.window)
    E = _shift_for(window, m, a.field)
    report = verify_ad_inverse(E, image, a, window)
    cls = class_preservation_report(a, image, m, window)
    return TildeResult(image, report.agreed, report, cls)


def _z_references(i, j):
    """``(sign, [(row, col), ...])`` read by the integer formula at ``(i, j)``."""
    if i >= 2:
        return 1, [(i - 1 - s, j - s) for s in range(i - 1)]
    if i == 1:
        return 1, []
    return -1, [(i + s, j + 1 + s) for s in range(1 - i)]


def tilde_z(a: Matrix, window: IndexWindow | None = None,
            verify_window: IndexWindow | None = None) -> TildeResult:
    """Preimage of a band matrix under ``ad(E)`` over the integers, verified.

    A windowed band input gives a windowed ``band(k + 1)`` image on the same
    window.  A finitary input is placed on ``window`` as ``band(k)``; without
    a window it must be supported in rows ``<= 0``, and the exact image is
    a lower tail matrix, checked on ``verify_window`` (default: a margin
    around the support).
    """
    if isinstance(a, WindowedMatrix) and a.is_complete and window is None:
        a = a.to_finitary()
    if isinstance(a, FinitaryMatrix):
        if window is None:
            return _tilde_z_lower(a, verify_window)
        if not all(window.holds(*p) for p in a.support):
            raise ValueError("finitary input is not supported inside the window")
        a = WindowedMatrix(a.field, window, ClassTag.band(a.bandwidth), dict(a.entries))
    if not isinstance(a, WindowedMatrix):
        raise TypeError(f"cannot take tilde of {type(a).__name__}")
    if a.window.mode is not IndexMode.INTEGERS:
        raise ModeMismatch("tilde over the integers needs a Z-mode window")
    if a.tag.kind is not TagKind.BAND:
        raise NotBand(f"input is tagged {a.tag}, not band")
    k = a.tag.bandwidth
    f = a.field
    w = a.window
    entries, guarantee = {}, set()
    for i, j in w.positions():
        if abs(j - i + 1) > k:
            guarantee.add((i, j))
    # walk each diagonal i - j = d outward from row 1, keeping the running
    # sum of the references (see _z_references) and whether all were certain
    for d in range(1 - k, k + 2):
        for rows, ref in ((range(2, w.hi + 1), lambda r: (r - 1, r - d)),
                          (range(0, w.lo - 1, -1), lambda r: (r, r - d + 1))):
            acc, certain = f.zero(), True
            sign = 1 if rows.step > 0 else -1
            for i in rows:
                v = a.probe(*ref(i))
                if v is None:
                    certain = False
                    v = a.value(*ref(i))
                if v != 0:
                    acc = f.add(acc, v)
                j = i - d
                if i in w and j in w:
                    val = acc if sign > 0 else f.neg(acc)
                    if val != 0:
                        entries[(i, j)] = val
                    if certain:
                        guarantee.add((i, j))
        if 1 in w and 1 - d in w:
            guarantee.add((1, 1 - d))
    image = WindowedMatrix(f, w, ClassTag.band(k + 1), entries, guarantee)
    E = shift_matrix(w, 1, f)
    vw = w if verify_window is None else w.intersect(verify_window)
    report = verify_ad_inverse(E, image, a, vw)
    cls = class_preservation_report(a, image, 1, w)
    return TildeResult(image, report.agreed, report, cls)


def _tilde_z_lower(a: FinitaryMatrix, window: IndexWindow | None = None) -> TildeResult:
    bounds = a.index_bounds()
    if a and max(i for i, _ in a.support) > 0:
        raise ValueError("exact integer tilde needs support in rows <= 0; pass a window")
    f = a.field
    rays = [(r - c + 1, r, f.neg(v)) for (r, c), v in a.entries.items()]
    image = TailMatrix(f, None, rays, TailMode.INTEGERS_LOWER, 1)
    if window is None:
        lo = (bounds[0] if bounds else 0) - 3 * max(1, a.bandwidth + 1)
        hi = (bounds[1] if bounds else 0) + 3 * max(1, a.bandwidth + 1)
        window = IndexWindow(min(lo, -2), max(hi, 2))
    E = shift_matrix(IndexWindow(window.lo - 1, window.hi + 1), 1, f)
    report = verify_ad_inverse(E, image, a, window)
    cls = class_preservation_report(a, image, 1, window)
    return TildeResult(image, report.agreed, report, cls)


# ------------------------------------------------------------- verification


def verify_ad_inverse(E: Matrix, atilde: Matrix, a: Matrix,
                      window: IndexWindow | None = None) -> AdInverseReport:
    """Compare ``[E, ã]`` with ``a`` position by position on ``window``."""
    if len({E.field, atilde.field, a.field}) != 1:
        raise FieldMismatch("E, ã and a must share a field")
    if window is None:
        window = E.window or atilde.window or a.window
        if window is None:
            raise ValueError("no window to verify on")
    c = bracket(E, atilde, window)
    agreed, bad, open_ = set(), [], set()
    for i, j in window.positions():
        got = c.probe(i, j)
        want = a.probe(i, j)
        if got is None or want is None:
            open_.add((i, j))
        elif got == want:
            agreed.add((i, j))
        else:
            bad.append(((i, j), got, want))
    return AdInverseReport(window, frozenset(agreed), tuple(bad), frozenset(open_))


def _support_of(a: Matrix, window: IndexWindow):
    if isinstance(a, FinitaryMatrix):
        return set(a.support)
    if isinstance(a, TailMatrix):
        return {(i, j) for i, j in window.positions() if a.entry(i, j) != 0}
    return set(a.entries)


def _nonzero_certified(x: Matrix, window: IndexWindow):
    out = set()
    for i, j in window.positions():
        v = x.probe(i, j)
        if v is not None and v != 0:
            out.add((i, j))
    return out


def class_preservation_report(a: Matrix, atilde: Matrix, block_size: int = 1,
                              window: IndexWindow | None = None) -> PreservationReport:
    """Window-scale evidence that the tilde image stays in the input's class.

    * ``band`` -- bandwidth grows by at most the shift;
    * ``row_support`` -- each row of ã lies in the union of shifted rows of
      ``a`` it is built from;
    * ``column_bound`` -- each column of ã is bounded below by the sources
      feeding it, so it stays finite;
    * ``rcf`` -- for tail images, every probed row and column agrees with the
      finite structural support.
    """
    m = block_size
    window = window or atilde.window or default_probe_window(a, m)
    checks = {}
    bw = a.effective_bandwidth()
    if bw is not None:
        checks["band"] = check_class(atilde, ClassTag.band(bw + m))

    integer = window.mode is IndexMode.INTEGERS
    src = _support_of(a, window if a.window is None else a.window)
    nz = _nonzero_certified(atilde, window)

    if integer:
        def explained(i, j):
            return any(s in src for s in _z_references(i, j)[1])
    else:
        # ã[p, q] draws on a[r, c] with r - c = p - q - m, r ≡ p (mod m), r <= p - m
        first_row = {}
        for r, c in src:
            key = (r - c, r % m)
            first_row[key] = min(r, first_row.get(key, r))

        def explained(p, q):
            r = first_row.get((p - q - m, p % m))
            return r is not None and r <= p - m

    unexplained = sorted(p for p in nz if not explained(*p))
    checks["row_support"] = ClassCheck(not unexplained, atilde.tag,
                                       unexplained[0] if unexplained else None,
                                       note="rows of ã are sums of shifted rows of a")

    if not integer:
        # column q of ã stops at the lowest row any source can reach
        col_violation = None
        lowest = {}
        for p, q in nz:
            lowest[q] = max(p, lowest.get(q, p))
        for q in sorted(lowest):
            bound = max((r + q - c + m for r, c in src if c <= q and (q - c) % m == 0),
                        default=0)
            if lowest[q] > bound:
                col_violation = (lowest[q], q)
                break
        checks["column_bound"] = ClassCheck(col_violation is None, atilde.tag, col_violation,
                                            note="column supports bounded by their sources")

    if isinstance(atilde, TailMatrix):
        bad = None
        cap = len(atilde.tails)
        for i in window.indices:
            row = {j for j in window.indices if atilde.entry(i, j) != 0}
            structural = set(atilde.row_items(i))
            col = {r for r in window.indices if atilde.entry(r, i) != 0}
            if (not row <= structural or not col <= set(atilde.col_items(i))
                    or len(structural) > len(atilde.core.row_items(i)) + cap):
                bad = (i, i)
                break
        checks["rcf"] = ClassCheck(bad is None, ClassTag.rcf(), bad,
                                   note="finite row and column supports")
    return PreservationReport(checks)


# ----------------------------------------------------------- bracket spans


@dataclass(frozen=True)
class SpanDecomposition:
    target: FinitaryMatrix
    basis: tuple
    rank: int
    coefficients: dict | None

    @property
    def ok(self):
        return self.coefficients is not None

    def combination(self) -> FinitaryMatrix:
        """``sum λ_uv [b_u, b_v]`` rebuilt from the coefficients."""
        f = self.target.field
        out = FinitaryMatrix.zero(f)
        for (u, v), lam in (self.coefficients or {}).items():
            out = out + bracket(self.basis[u], self.basis[v]) * lam
        return out


def bracket_span_decompose(basis, target: FinitaryMatrix) -> SpanDecomposition:
    """Write ``target`` as a combination of pairwise brackets of ``basis``.

    Solves one exact linear system; free coefficients are set to zero.  On
    failure the rank of the bracket span is still reported.
    """
    basis = tuple(basis)
    f = target.field
    for b in basis:
        if b.field != f:
            raise FieldMismatch(f"{b.field!r} basis element for {f!r} target")
    pairs = list(combinations(range(len(basis)), 2))
    brackets = [bracket(basis[u], basis[v]) for u, v in pairs]
    positions = sorted(set(target.support).union(*(br.support for br in brackets)))
    pos_index = {p: n for n, p in enumerate(positions)}

    el = linalg.Eliminator(f)
    for br in brackets:
        el.add({pos_index[p]: v for p, v in br.entries.items()})
    rank = el.rank

    rows = [{} for _ in positions]
    for col, br in enumerate(brackets):
        for p, v in br.entries.items():
            rows[pos_index[p]][col] = v
    rhs = [target.probe(*p) for p in positions]
    solved = linalg.solve(rows, rhs, len(pairs), f)
    if solved is None:
        return SpanDecomposition(target, basis, rank, None)
    sol, _ = solved
    coeffs = {pairs[c]: v for c, v in sol.items()}
    dec = SpanDecomposition(target, basis, rank, coeffs)
    if dec.combination() != target:
        raise AssertionError("span decomposition does not reproduce its target")
    return dec
