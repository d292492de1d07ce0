import random

import pytest
from hypothesis import given, strategies as st

from infmat import (
    GF,
    QQ,
    BlockIndexMap,
    ClassTag,
    FinitaryMatrix,
    IndexMode,
    IndexWindow,
    Involution,
    WindowedMatrix,
    bracket,
    check_class,
    elementwise_linear,
    involute,
    matrix_unit,
    multiply,
    shift_matrix,
    skew_project,
    trace,
)
from infmat.errors import (
    BlockMisalignment,
    FieldMismatch,
    ModeMismatch,
    NotFinitary,
    UndefinedProduct,
    UnpairedWindow,
    WindowTooSmall,
)
from infmat.matrix import TagKind, is_zero
from infmat.tails import TailMatrix

import oracles
from strategies import field_and_finitary, finitary

Z = IndexMode.INTEGERS


def F(d, field=QQ):
    return FinitaryMatrix(field, d)


def entries(m):
    return dict(m.entries)


# ------------------------------------------------------------ units and shift


def test_matrix_unit():
    assert entries(matrix_unit(1, 2)) == {(1, 2): 1}
    assert entries(matrix_unit(0, 0, GF(7))) == {(0, 0): 1}
    assert bracket(matrix_unit(1, 2), matrix_unit(2, 1)) == F({(1, 1): 1, (2, 2): -1})


def test_shift_over_integers():
    E = shift_matrix(IndexWindow(-2, 2, Z))
    assert set(E.entries) == {(-2, -1), (-1, 0), (0, 1), (1, 2)}
    assert E.tag == ClassTag.band(1)


def test_shift_over_naturals():
    E = shift_matrix(IndexWindow.naturals(3))
    assert set(E.entries) == {(1, 2), (2, 3)}


def test_blocked_shift_through_index_map():
    E = shift_matrix(IndexWindow.naturals(4), 2)
    bim = BlockIndexMap(2)
    # e_{1,2}(Id_2) expanded through the flattening
    expected = {(bim.to_flat(1, a), bim.to_flat(2, a)) for a in (1, 2)}
    assert set(E.entries) == expected == {(1, 3), (2, 4)}
    assert E.tag == ClassTag.band(2)


def test_shift_errors():
    with pytest.raises(BlockMisalignment):
        shift_matrix(IndexWindow.naturals(5), 2)
    with pytest.raises(BlockMisalignment):
        shift_matrix(IndexWindow(-2, 2, Z), 2)
    with pytest.raises(WindowTooSmall):
        shift_matrix(IndexWindow.naturals(2), 2)


def test_naturals_window_starts_at_one():
    with pytest.raises(ValueError):
        IndexWindow(0, 3, IndexMode.NATURALS)
    with pytest.raises(ValueError):
        IndexWindow(3, 1)


def test_block_index_map_is_bijective():
    bim = BlockIndexMap(3)
    flats = [bim.to_flat(n, a) for n in range(1, 6) for a in range(1, 4)]
    assert flats == list(range(1, 16))
    assert all(bim.to_flat(*bim.from_flat(p)) == p for p in flats)
    with pytest.raises(IndexError):
        bim.to_flat(1, 4)


# -------------------------------------------------------------- linear maps


def test_linear_examples():
    a = F({(1, 2): 3, (2, 2): -1})
    assert elementwise_linear(a, FinitaryMatrix.zero(), 1, 1) == a
    assert is_zero(elementwise_linear(a, a, 1, -1))
    assert entries(elementwise_linear(matrix_unit(1, 2), matrix_unit(2, 1))) == {(1, 2): 1, (2, 1): 1}


def test_linear_field_mismatch():
    with pytest.raises(FieldMismatch):
        elementwise_linear(matrix_unit(1, 1), matrix_unit(1, 1, GF(5)))


def test_linear_mode_mismatch():
    a = WindowedMatrix(QQ, IndexWindow.naturals(3), ClassTag.band(1), {})
    b = WindowedMatrix(QQ, IndexWindow(1, 3, Z), ClassTag.band(1), {})
    with pytest.raises(ModeMismatch):
        a + b


def test_windowed_sum_intersects_guarantees():
    w = IndexWindow(-3, 3, Z)
    a = WindowedMatrix(QQ, w, ClassTag.rcf(), {(0, 0): 1}, guarantee={(0, 0), (1, 1)})
    b = WindowedMatrix(QQ, w, ClassTag.band(1), {(1, 1): 2})
    s = a + b
    assert s.guarantee == {(0, 0), (1, 1)}
    assert s.tag == ClassTag.rcf()
    assert s.probe(0, 0) == 1 and s.probe(1, 1) == 2 and s.probe(2, 2) is None


# ---------------------------------------------------------------- products


def test_unit_product():
    assert matrix_unit(1, 2) @ matrix_unit(2, 3) == matrix_unit(1, 3)


def test_unit_times_shift():
    E = shift_matrix(IndexWindow.naturals(6))
    p = multiply(matrix_unit(1, 1), E)
    assert entries(p) == {(1, 2): 1} and p.fully_guaranteed


def _random_band(rng, window, k, field=QQ):
    return {(i, j): rng.randint(-3, 3) for i in window.indices for j in window.indices
            if abs(i - j) <= k and rng.random() < 0.8}


def test_band_product_guarantee_margin():
    rng = random.Random(4)
    big = IndexWindow(-8, 8, Z)
    small = IndexWindow(-5, 5, Z)
    da, db = _random_band(rng, big, 1), _random_band(rng, big, 1)
    A = WindowedMatrix(QQ, small, ClassTag.band(1), {p: v for p, v in da.items() if small.holds(*p)})
    B = WindowedMatrix(QQ, small, ClassTag.band(1), {p: v for p, v in db.items() if small.holds(*p)})
    C = multiply(A, B)
    assert C.tag == ClassTag.band(2)
    assert check_class(C, ClassTag.band(2)).ok
    exact = oracles.dense_product(da, db)
    interior = IndexWindow(-4, 4, Z)
    for i, j in small.positions():
        if abs(i - j) > 2:
            assert (i, j) in C.guarantee
        elif interior.holds(i, j):
            assert (i, j) in C.guarantee
            assert C.probe(i, j) == exact.get((i, j), 0)
    # the corners need factors one step outside the window
    assert (-5, -5) not in C.guarantee and (5, 5) not in C.guarantee


@given(st.data())
def test_guarantee_is_sound_on_larger_windows(data):
    seed = data.draw(st.integers(0, 10 ** 6))
    ka = data.draw(st.integers(0, 2))
    kb = data.draw(st.integers(0, 2))
    rng = random.Random(seed)
    big = IndexWindow(-10, 10, Z)
    small = IndexWindow(data.draw(st.integers(-6, -2)), data.draw(st.integers(2, 6)), Z)
    da, db = _random_band(rng, big, ka), _random_band(rng, big, kb)

    def win(d, w, k):
        return WindowedMatrix(QQ, w, ClassTag.band(k), {p: v for p, v in d.items() if w.holds(*p)})

    c_small = multiply(win(da, small, ka), win(db, small, kb))
    c_big = multiply(win(da, big, ka), win(db, big, kb))
    exact = oracles.dense_product(da, db)
    assert check_class(c_small, ClassTag.band(ka + kb)).ok
    for p in c_small.guarantee:
        assert c_small.probe(*p) == c_big.probe(*p) == exact.get(p, 0)


def test_undefined_products():
    t = TailMatrix(QQ, None, [(0, 1, 1)])
    with pytest.raises(UndefinedProduct):
        multiply(t, t)
    cf = WindowedMatrix(QQ, IndexWindow.naturals(3), ClassTag.column_finite(), {})
    assert multiply(cf, cf).tag == ClassTag.column_finite()


# ---------------------------------------------------------------- brackets


def test_bracket_examples():
    a = F({(1, 2): 2, (3, 1): -1})
    assert is_zero(bracket(a, a))
    assert bracket(matrix_unit(1, 1), matrix_unit(1, 2)) == matrix_unit(1, 2)


def test_shift_commutes_with_identity():
    w = IndexWindow(-6, 6, Z)
    E = shift_matrix(w)
    ident = WindowedMatrix(QQ, w, ClassTag.band(0), {(i, i): 1 for i in w.indices})
    c = bracket(E, ident)
    assert not c.entries
    assert IndexWindow(-5, 5, Z).positions() and all(
        c.probe(*p) == 0 for p in IndexWindow(-5, 5, Z).positions())


@given(field_and_finitary(), st.data())
def test_bracket_antisymmetry_and_jacobi(fa, data):
    f, a = fa
    b = data.draw(finitary(f))
    c = data.draw(finitary(f))
    assert bracket(a, b) == -bracket(b, a)
    jac = bracket(a, bracket(b, c)) + bracket(b, bracket(c, a)) + bracket(c, bracket(a, b))
    assert is_zero(jac)


@given(field_and_finitary(), st.data())
def test_bracket_matches_dense_oracle(fa, data):
    f, a = fa
    b = data.draw(finitary(f))
    p = getattr(f, "p", None)
    assert entries(bracket(a, b)) == oracles.commutator(entries(a), entries(b), p)


@given(field_and_finitary(), st.data())
def test_trace_of_commutator_vanishes(fa, data):
    f, a = fa
    b = data.draw(finitary(f))
    assert trace(bracket(a, b)).value == 0


# ------------------------------------------------------------- involutions


def test_transpose_unit():
    assert involute(matrix_unit(1, 2), Involution.transpose()) == matrix_unit(2, 1)


def test_symplectic_unit():
    assert involute(matrix_unit(1, 1), Involution.symplectic()) == matrix_unit(2, 2)


@given(finitary(QQ, 1, 6))
def test_symplectic_is_conjugated_transpose(a):
    got = entries(involute(a, Involution.symplectic()))
    assert got == oracles.symplectic(entries(a), 1, 6)


@pytest.mark.parametrize("inv", [Involution.transpose(), Involution.symplectic()], ids=["t", "s"])
@given(fa=field_and_finitary(), data=st.data())
def test_involution_laws(inv, fa, data):
    f, a = fa
    b = data.draw(finitary(f))
    assert involute(involute(a, inv), inv) == a
    assert involute(a @ b, inv) == involute(b, inv) @ involute(a, inv)
    ka = skew_project(a, inv)[1]
    kb = skew_project(b, inv)[1]
    k = bracket(ka, kb)
    assert involute(k, inv) == -k


def test_symplectic_needs_paired_window():
    w = IndexWindow(2, 5, Z)
    a = WindowedMatrix(QQ, w, ClassTag.band(1), {(2, 2): 1})
    with pytest.raises(UnpairedWindow):
        involute(a, Involution.symplectic())
    with pytest.raises(UnpairedWindow):
        Involution.symplectic().form(IndexWindow.naturals(3))


def test_windowed_involution_keeps_guarantee():
    w = IndexWindow.naturals(4)
    a = WindowedMatrix(QQ, w, ClassTag.band(1), {(1, 2): 5}, guarantee={(1, 2), (3, 3)})
    t = involute(a, Involution.transpose())
    assert t.probe(2, 1) == 5 and (3, 3) in t.guarantee and t.probe(1, 2) is None


def test_skew_project_examples():
    half = QQ.coerce("1/2")
    t = Involution.transpose()
    h, k = skew_project(matrix_unit(1, 2), t)
    assert entries(h) == {(1, 2): half, (2, 1): half}
    assert entries(k) == {(1, 2): half, (2, 1): -half}
    skew = F({(1, 2): 3, (2, 1): -3})
    sym = F({(1, 2): 3, (2, 1): 3, (1, 1): 1})
    assert skew_project(skew, t) == (FinitaryMatrix.zero(), skew)
    assert skew_project(sym, t) == (sym, FinitaryMatrix.zero())


@pytest.mark.parametrize("inv", [Involution.transpose(), Involution.symplectic()], ids=["t", "s"])
@given(fa=field_and_finitary())
def test_skew_projection_splits(inv, fa):
    f, a = fa
    h, k = skew_project(a, inv)
    assert h + k == a
    assert involute(h, inv) == h
    assert involute(k, inv) == -k


# ---------------------------------------------------------------- classes


def test_band_check():
    w = IndexWindow(-3, 3, Z)
    tri = WindowedMatrix(QQ, w, ClassTag.rcf(), {(i, j): 1 for i, j in w.positions() if abs(i - j) <= 1})
    assert check_class(tri, ClassTag.band(1)).ok
    bad = WindowedMatrix(QQ, w, ClassTag.rcf(), {(0, 2): 1})
    rep = check_class(bad, ClassTag.band(1))
    assert not rep.ok and rep.violation == (0, 2)


def test_finitary_check_on_tail():
    t = TailMatrix(QQ, None, [(0, 2, 1)])
    rep = check_class(t, ClassTag.finitary())
    assert not rep.ok
    assert check_class(TailMatrix(QQ, {(1, 1): 1}), ClassTag.finitary()).ok


def test_window_checks_of_infinite_classes_are_vacuous():
    w = IndexWindow.naturals(3)
    a = WindowedMatrix(QQ, w, ClassTag.column_finite(), {(1, 3): 1})
    rep = check_class(a, ClassTag.rcf())
    assert rep.ok and rep.vacuous


def test_band_tag_rejects_stored_violations():
    with pytest.raises(ValueError):
        WindowedMatrix(QQ, IndexWindow.naturals(3), ClassTag.band(0), {(1, 2): 1})


def test_tag_lattice():
    b1, b3 = ClassTag.band(1), ClassTag.band(3)
    fin, rcf, cf, rf = ClassTag.finitary(), ClassTag.rcf(), ClassTag.column_finite(), ClassTag.row_finite()
    assert b1.join(b3) == b3
    assert fin.join(fin) == fin
    assert fin.join(b1) == rcf
    assert rcf.join(cf) == cf
    assert b1.product(b3) == ClassTag.band(4)
    assert cf.product(fin) == fin
    assert fin.product(rcf) == fin
    assert fin.product(cf).kind is TagKind.ROW_FINITE
    assert rf.product(rcf) == rf
    assert ClassTag.parse("band(2)") == ClassTag.band(2)
    assert ClassTag.parse(str(rcf)) == rcf


def test_trace():
    assert trace(matrix_unit(1, 1)).value == 1
    assert trace(matrix_unit(1, 2)).value == 0
    with pytest.raises(NotFinitary):
        trace(WindowedMatrix(QQ, IndexWindow.naturals(2), ClassTag.rcf(), {}))


def test_probe_semantics():
    w = IndexWindow(-2, 2, Z)
    fin = WindowedMatrix(QQ, w, ClassTag.finitary(), {(0, 0): 4})
    band = WindowedMatrix(QQ, w, ClassTag.band(1), {(0, 0): 4})
    assert fin.probe(5, 5) == 0 and band.probe(5, 5) is None and band.probe(5, 0) == 0
    assert fin.is_complete and not band.is_complete
    assert matrix_unit(1, 1).probe(2, 2) == 0
