import json
import random

import pytest
from hypothesis import given, strategies as st

from infmat import (
    GF,
    QQ,
    ClassTag,
    FinitaryMatrix,
    IndexMode,
    IndexWindow,
    TailMatrix,
    WindowedMatrix,
    conjugation_table,
    inner_derivation_table,
    recover_conjugator,
    recover_witness,
    unit_basis,
)
from infmat import serialize as ser
from infmat.errors import ParseError

from strategies import field_and_finitary, random_invertible, random_matrix


def roundtrip(obj):
    return json.loads(json.dumps(obj))


@given(field_and_finitary())
def test_finitary_round_trip(fa):
    _, a = fa
    assert ser.matrix_from_json(roundtrip(ser.matrix_to_json(a))) == a


def test_scalars_are_strings():
    m = FinitaryMatrix(QQ, {(1, 2): QQ.coerce("3/4")})
    assert ser.matrix_to_json(m)["entries"] == [[1, 2, "3/4"]]


def test_windowed_and_band_round_trip():
    w = IndexWindow(-3, 3, IndexMode.INTEGERS)
    band = WindowedMatrix(GF(7), w, ClassTag.band(1), {(0, 1): 3, (-2, -2): 6})
    back = ser.matrix_from_json(roundtrip(ser.matrix_to_json(band)))
    assert back.tag == band.tag and back.window == w and back.entries == band.entries
    part = WindowedMatrix(QQ, IndexWindow.naturals(3), ClassTag.rcf(), {(1, 1): 2},
                          {(1, 1), (1, 2)})
    back = ser.matrix_from_json(roundtrip(ser.matrix_to_json(part)))
    assert back.guarantee == part.guarantee and back.tag == ClassTag.rcf()


def test_tail_round_trip():
    t = TailMatrix(QQ, {(2, 1): 1}, [(1, 3, QQ.coerce(3))], period=2)
    back = ser.matrix_from_json(roundtrip(ser.matrix_to_json(t)))
    assert back == t and back.period == 2


@pytest.mark.parametrize("obj", [
    [],
    {"kind": "finitary", "entries": []},
    {"field": {"type": "Q"}, "entries": [[1, 2, 0.5]]},
    {"field": {"type": "Q"}, "entries": [[1, 2]]},
    {"field": {"type": "Q"}, "kind": "mystery", "window": [1, 2]},
    {"field": {"type": "Q"}, "kind": "band", "window": [1, 2]},
    {"field": {"type": "Q"}, "kind": "windowed", "window": "1:2"},
    {"field": {"type": "Q"}, "kind": "finitary", "window": [1, 2], "entries": [[3, 3, "1"]]},
])
def test_bad_matrices(obj):
    with pytest.raises((ParseError, ValueError)):
        ser.matrix_from_json(obj)


def test_parse_window():
    assert ser.parse_window("1:5").mode is IndexMode.NATURALS
    w = ser.parse_window("-10:10")
    assert (w.lo, w.hi, w.mode) == (-10, 10, IndexMode.INTEGERS)
    with pytest.raises(ParseError):
        ser.parse_window("1-5")


@given(st.integers(0, 10 ** 6), st.sampled_from(["full", "sl", "skew_t", "skew_s"]))
def test_derivation_table_round_trip(seed, kind):
    rng = random.Random(seed)
    w = IndexWindow.naturals(4)
    t = inner_derivation_table(random_matrix(rng, GF(5), 1, 4), kind, w, 1)
    back = ser.derivation_table_from_json(roundtrip(ser.derivation_table_to_json(t)))
    assert back == t


def test_derivation_table_label_errors():
    t = inner_derivation_table(FinitaryMatrix.zero(), "full", IndexWindow.naturals(2), 1)
    obj = ser.derivation_table_to_json(t)
    obj["images"]["e_x_1"] = []
    with pytest.raises(ParseError):
        ser.derivation_table_from_json(obj)
    del obj["images"]["e_x_1"]
    del obj["images"]["e_1_2"]
    with pytest.raises(ParseError):
        ser.derivation_table_from_json(obj)


def test_automorphism_table_round_trip():
    x = random_invertible(random.Random(1), QQ, 3)
    for flavor in ("assoc", "lie", "anti"):
        t = conjugation_table(x, flavor)
        back = ser.automorphism_table_from_json(roundtrip(ser.automorphism_table_to_json(t)),
                                                validate=False)
        assert back.images == t.images and back.flavor.value == flavor


def test_basis_round_trip():
    mats = list(unit_basis(IndexWindow.naturals(2)).values())
    field, labels, back = ser.basis_from_json(roundtrip(ser.basis_to_json(QQ, mats)))
    assert field == QQ and back == mats and labels == ["b0", "b1", "b2", "b3"]
    with pytest.raises(ParseError):
        ser.basis_from_json({"field": {"type": "Q"}})


def test_witness_forms():
    w = IndexWindow.naturals(2)
    y = FinitaryMatrix(QQ, {(1, 2): 1})
    out = ser.derivation_witness_to_json(recover_witness(inner_derivation_table(y, "full", w, 1)))
    assert out["y"] == [[1, 2, "1"]] and out["residual_ok"] and out["checked"] == 4
    x = FinitaryMatrix(QQ, {(1, 1): 1, (2, 2): 2})
    cj = ser.conjugator_to_json(recover_conjugator(conjugation_table(x)), w)
    assert cj == {"x": [["1", "0"], ["0", "2"]], "x_inv": [["1", "0"], ["0", "1/2"]],
                  "verified": True, "scale_note": "projective"}


def test_load_json_errors(tmp_path):
    with pytest.raises(ParseError):
        ser.load_json(tmp_path / "missing.json")
    bad = tmp_path / "bad.json"
    bad.write_text("{not json")
    with pytest.raises(ParseError):
        ser.load_json(bad)


def test_dump_is_sorted():
    assert ser.dump({"b": 1, "a": 2}).index('"a"') < ser.dump({"b": 1, "a": 2}).index('"b"')
