import json
import subprocess
import sys

import pytest

from infmat import (
    GF,
    QQ,
    FinitaryMatrix,
    IndexWindow,
    Involution,
    conjugation_table,
    inner_derivation_table,
    matrix_unit,
    skew_basis,
    unit_basis,
)
from infmat.cli import main, run

import files


def cert_json(text):
    return json.loads(text.split("--- json ---\n", 1)[1])


def invoke(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr().out
    return code, out, cert_json(out)


@pytest.fixture
def e00(tmp_path):
    return files.matrix(tmp_path / "e00.mat", matrix_unit(0, 0))


# ----------------------------------------------------------------- tilde


def test_tilde_integer_mode(capsys, e00):
    code, text, cert = invoke(capsys, "tilde", "--mode", "z", "--input", e00,
                              "--verify-window", "-10:10")
    assert code == 0 and cert["exit_status"] == "Pass"
    assert "status: Pass" in text
    assert cert["result"]["image"]["kind"] == "tail"
    assert cert["result"]["image"]["tails"] == [[1, 0, "-1"]]
    assert [-10, -10] in cert["result"]["verified"]


def test_tilde_naturals_with_blocks(capsys, tmp_path):
    a = files.matrix(tmp_path / "a.mat", FinitaryMatrix(QQ, {(1, 2): 3, (4, 1): -1}))
    code, _, cert = invoke(capsys, "tilde", "--block", "2", "--input", a, "--verify-window", "1:12")
    assert code == 0
    assert all(c["ok"] for c in cert["verified_claims"])


def test_tilde_rejects_supplied_wrong_image(capsys, tmp_path):
    a = files.matrix(tmp_path / "a.mat", matrix_unit(1, 2))
    wrong = files.matrix(tmp_path / "w.mat", matrix_unit(3, 3))
    code, _, cert = invoke(capsys, "tilde", "--input", a, "--image", wrong,
                           "--verify-window", "1:8")
    assert code == 1 and cert["exit_status"] == "VerificationFail"


def test_tilde_block_in_integer_mode_is_input_error(capsys, e00):
    code, _, cert = invoke(capsys, "tilde", "--mode", "z", "--block", "2", "--input", e00)
    assert code == 2 and "error" in cert


# ------------------------------------------------------------ derivations


def test_recover_zero_derivation(capsys, tmp_path):
    t = inner_derivation_table(FinitaryMatrix.zero(), "full", IndexWindow.naturals(3), 1)
    path = files.derivation_table(tmp_path / "zero.tbl", t)
    code, _, cert = invoke(capsys, "recover-derivation", "--table", path, "--pivot", "1")
    assert code == 0 and cert["result"]["witness"]["y"] == []


def test_recover_skew_derivation(capsys, tmp_path):
    y = FinitaryMatrix(GF(7), {(1, 2): 1, (2, 1): 6})
    t = inner_derivation_table(y, "skew_t", IndexWindow.naturals(4), 1)
    path = files.derivation_table(tmp_path / "k.tbl", t)
    code, _, cert = invoke(capsys, "recover-derivation", "--table", path, "--skew", "t")
    assert code == 0
    assert cert["result"]["witness"]["y"] == [[1, 2, "1"], [2, 1, "6"]]
    code, _, _ = invoke(capsys, "recover-derivation", "--table", path, "--skew", "s")
    assert code == 2


def test_recover_derivation_fault(capsys, tmp_path):
    t = inner_derivation_table(matrix_unit(1, 2), "full", IndexWindow.naturals(3), 1)
    obj = json.loads(open(files.derivation_table(tmp_path / "t.tbl", t)).read())
    obj["images"]["e_3_3"] = [[2, 2, "1"]]
    path = files.write(tmp_path / "bad.tbl", obj)
    code, text, _ = invoke(capsys, "recover-derivation", "--table", path)
    assert code == 1 and "[FAIL]" in text


# ---------------------------------------------------------- automorphisms


def test_recover_automorphism_flavors(capsys, tmp_path):
    x = FinitaryMatrix(QQ, {(1, 1): 1, (2, 2): 2})
    for flavor in ("assoc", "anti", "lie"):
        path = files.automorphism_table(tmp_path / f"{flavor}.tbl", conjugation_table(x, flavor))
        code, _, cert = invoke(capsys, "recover-automorphism", "--table", path)
        assert code == 0, flavor
    code, _, cert = invoke(capsys, "recover-automorphism", "--table", str(tmp_path / "assoc.tbl"))
    assert cert["result"]["witness"]["x"] == [["1", "0"], ["0", "2"]]


def test_non_idempotent_table_fails_verification(capsys, tmp_path):
    t = conjugation_table(FinitaryMatrix.identity([1, 2]))
    obj = json.loads(open(files.automorphism_table(tmp_path / "t.tbl", t)).read())
    obj["images"]["e_1_1"] = [[1, 1, "2"]]
    path = files.write(tmp_path / "bad.tbl", obj)
    code, _, _ = invoke(capsys, "recover-automorphism", "--table", path)
    assert code == 1


def test_classify_lie(capsys, tmp_path):
    x = FinitaryMatrix(QQ, {(1, 2): 1, (2, 1): 1, (3, 3): 3})
    path = files.automorphism_table(tmp_path / "l.tbl",
                                    conjugation_table(x, "lie", negate_transpose=True))
    code, _, cert = invoke(capsys, "classify-lie", "--table", path)
    assert code == 0 and cert["result"]["verdict"] == "TypeII"


# ------------------------------------------------------------- span etc


def test_span_of_identity_fails_with_rank(capsys, tmp_path):
    b = files.basis(tmp_path / "gl2.basis", QQ, list(unit_basis(IndexWindow.naturals(2)).values()))
    t = files.matrix(tmp_path / "id2.mat", FinitaryMatrix.identity([1, 2]))
    code, text, cert = invoke(capsys, "span", "--basis", b, "--target", t)
    assert code == 1 and cert["result"]["rank"] == 3 and "rank 3" in text


def test_span_of_skew_element(capsys, tmp_path):
    basis = list(skew_basis(IndexWindow.naturals(4), Involution.transpose()).values())
    b = files.basis(tmp_path / "o4.basis", QQ, basis)
    t = files.matrix(tmp_path / "k.mat", basis[0])
    code, _, cert = invoke(capsys, "span", "--basis", b, "--target", t)
    assert code == 0 and cert["result"]["coefficients"]


def test_check_class(capsys, tmp_path):
    a = files.matrix(tmp_path / "a.mat", FinitaryMatrix(QQ, {(1, 4): 1}))
    assert invoke(capsys, "check-class", "--input", a, "--tag", "band(3)")[0] == 0
    assert invoke(capsys, "check-class", "--input", a, "--tag", "band(2)")[0] == 1
    assert invoke(capsys, "check-class", "--input", a, "--tag", "nonsense")[0] == 2


def test_check_scalar(capsys, tmp_path):
    p = files.matrix(tmp_path / "p.mat", FinitaryMatrix(QQ, {(1, 2): 2, (2, 1): -2}))
    code, _, cert = invoke(capsys, "check-scalar", "--x", p, "--involution", "t")
    assert code == 0 and cert["result"]["alpha"] == "4"
    d = files.matrix(tmp_path / "d.mat", FinitaryMatrix(QQ, {(1, 1): 1, (2, 2): 2}))
    code, _, cert = invoke(capsys, "check-scalar", "--x", d)
    assert code == 1 and cert["result"]["violation"] == [2, 2]


# ---------------------------------------------------------------- plumbing


def test_input_errors(capsys, tmp_path):
    assert invoke(capsys, "tilde", "--input", str(tmp_path / "nope.mat"))[0] == 2
    junk = tmp_path / "junk.mat"
    junk.write_text("[1, 2")
    assert invoke(capsys, "check-class", "--input", str(junk), "--tag", "rcf")[0] == 2
    with pytest.raises(SystemExit) as exc:
        main(["frobnicate"])
    assert exc.value.code == 2


def test_certificates_are_deterministic(capsys, e00):
    argv = ["tilde", "--mode", "z", "--input", e00, "--verify-window", "-6:6"]
    main(argv)
    first = capsys.readouterr().out
    main(argv)
    assert capsys.readouterr().out == first


def test_out_file_is_written_whole(capsys, e00, tmp_path):
    out = tmp_path / "cert.txt"
    code = main(["tilde", "--mode", "z", "--input", e00, "--out", str(out)])
    printed = capsys.readouterr().out
    assert code == 0 and out.read_text() == printed
    assert not [p for p in tmp_path.iterdir() if p.name.startswith(".infmat-")]


def test_run_returns_certificate(e00):
    cert = run(["tilde", "--mode", "z", "--input", e00])
    assert cert.exit_code == 0 and cert.inputs["input"]


def test_module_entry_point(e00):
    proc = subprocess.run([sys.executable, "-m", "infmat", "tilde", "--mode", "z",
                           "--input", e00, "--verify-window", "-4:4"],
                          capture_output=True, text=True)
    assert proc.returncode == 0 and "status: Pass" in proc.stdout
