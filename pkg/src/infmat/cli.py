"""Command-line front end.

Every subcommand prints a certificate: a short text report followed by a
JSON block.  Exit status 0 means every claim was verified, 1 means some
verification failed, 2 means the input could not be used.
"""

from __future__ import annotations

import argparse
import hashlib
import os
import sys
import tempfile
import warnings
from dataclasses import dataclass, field as dc_field

from .automorphisms import (
    Flavor,
    check_involution_scalar,
    classify_lie_automorphism,
    decompose_anti_automorphism,
    recover_conjugator,
)
from .bases import BasisKind
from .derivations import DerivationTable, recover_witness
from .errors import InconsistentTable, InfmatError, UnderdeterminedWarning
from .matrix import (
    ClassTag,
    FinitaryMatrix,
    IndexMode,
    IndexWindow,
    Involution,
    check_class,
    shift_matrix,
)
from .perfectness import (
    _shift_for,
    bracket_span_decompose,
    class_preservation_report,
    tilde_n,
    tilde_z,
    verify_ad_inverse,
)
from . import serialize as ser
from .tails import TailMatrix

PASS, FAIL, INPUT_ERROR = "Pass", "VerificationFail", "InputError"
EXIT_CODES = {PASS: 0, FAIL: 1, INPUT_ERROR: 2}


class InputError(Exception):
    pass


@dataclass
class Certificate:
    command: str
    inputs: dict = dc_field(default_factory=dict)
    result: dict = dc_field(default_factory=dict)
    claims: list = dc_field(default_factory=list)
    error: str | None = None
    out: str | None = None

    def claim(self, text, ok, detail=""):
        self.claims.append({"claim": text, "ok": bool(ok), "detail": detail})
        return ok

    @property
    def exit_status(self):
        if self.error is not None:
            return INPUT_ERROR
        if self.claims and all(c["ok"] for c in self.claims):
            return PASS
        return FAIL

    @property
    def exit_code(self):
        return EXIT_CODES[self.exit_status]

    def to_dict(self):
        out = {"command": self.command, "inputs": self.inputs, "result": self.result,
               "verified_claims": self.claims, "exit_status": self.exit_status}
        if self.error is not None:
            out["error"] = self.error
        return out

    def render(self) -> str:
        lines = [f"certificate: {self.command}"]
        for name, digest in sorted(self.inputs.items()):
            lines.append(f"  input {name}: sha256 {digest}")
        if self.error is not None:
            lines.append(f"  error: {self.error}")
        for c in self.claims:
            mark = "PASS" if c["ok"] else "FAIL"
            tail = f" ({c['detail']})" if c["detail"] else ""
            lines.append(f"  [{mark}] {c['claim']}{tail}")
        lines.append(f"status: {self.exit_status}")
        lines.append("--- json ---")
        lines.append(ser.dump(self.to_dict()))
        return "\n".join(lines) + "\n"


def _load(cert: Certificate, name: str, path: str):
    data, obj = ser.load_json(path)
    cert.inputs[name] = hashlib.sha256(data).hexdigest()
    return obj


def _region(points):
    pts = sorted(points)
    if not pts:
        return "empty"
    rows = [p[0] for p in pts]
    cols = [p[1] for p in pts]
    return f"{len(pts)} positions in rows {min(rows)}..{max(rows)}, cols {min(cols)}..{max(cols)}"


# ---------------------------------------------------------------- commands


def cmd_tilde(args, cert):
    a = ser.matrix_from_json(_load(cert, "input", args.input))
    if isinstance(a, TailMatrix):
        raise InputError("tilde takes a finitary or windowed input")
    mode = IndexMode.NATURALS if args.mode == "n" else IndexMode.INTEGERS
    vw = ser.parse_window(args.verify_window, mode) if args.verify_window else None
    if mode is IndexMode.NATURALS:
        res = tilde_n(a, args.block, vw)
    else:
        if args.block != 1:
            raise InputError("the integer tilde has block size 1")
        res = tilde_z(a, None, vw)
    image = res.image
    report, cls = res.report, res.class_report
    if args.image:
        image = ser.matrix_from_json(_load(cert, "image", args.image))
        if image.field != a.field:
            raise InputError("supplied image is over a different field")
        window = report.window
        if mode is IndexMode.NATURALS:
            E = _shift_for(window, args.block, a.field)
        else:
            E = shift_matrix(IndexWindow(window.lo - 1, window.hi + 1), 1, a.field)
        report = verify_ad_inverse(E, image, a, window)
        cls = class_preservation_report(a, image, args.block, window)
    cert.result["image"] = ser.matrix_to_json(image)
    cert.result["verified"] = [list(p) for p in sorted(report.agreed)]
    cert.result["class_report"] = {k: {"ok": c.ok, "vacuous": c.vacuous,
                                       "violation": list(c.violation) if c.violation else None}
                                   for k, c in sorted(cls.checks.items())}
    w = report.window
    detail = (f"first mismatch at {report.first_mismatch[0]}" if report.mismatches
              else _region(report.agreed))
    cert.claim(f"[E, a~] = a on window {w.lo}:{w.hi}", report.ok and report.agreed, detail)
    if mode is IndexMode.NATURALS and isinstance(a, FinitaryMatrix):
        cert.claim("identity certified at every window position", report.full,
                   f"{len(report.unverified)} positions uncertain")
    for name, c in sorted(cls.checks.items()):
        cert.claim(f"class preservation: {name}", c.ok,
                   f"violation at {c.violation}" if c.violation else ("vacuous" if c.vacuous else ""))


def cmd_recover_derivation(args, cert):
    obj = _load(cert, "table", args.table)
    table = ser.derivation_table_from_json(obj)
    if args.pivot is not None and args.pivot != table.pivot:
        if table.basis_kind is BasisKind.SL:
            raise InputError("an sl table fixes its pivot through the h labels")
        table = DerivationTable(table.field, table.window, table.basis_kind, table.images, args.pivot)
    inv = None
    if args.skew:
        inv = Involution(args.skew)
        if table.basis_kind.involution != inv:
            raise InputError(f"--skew {args.skew} does not match the {table.basis_kind.value} basis")
    with warnings.catch_warnings(record=True) as caught:
        warnings.simplefilter("always", UnderdeterminedWarning)
        try:
            wit = recover_witness(table, inv)
        except InconsistentTable as exc:
            cert.claim("table equals ad(y) on its window", False, str(exc))
            return
    cert.result["witness"] = ser.derivation_witness_to_json(wit)
    if caught:
        cert.result["warnings"] = [str(w.message) for w in caught]
    cert.claim("table equals ad(y) on its window", wit.residual_report.ok,
               wit.residual_report.summary())
    cert.claim(f"y[{table.pivot},{table.pivot}] = 0",
               wit.y.probe(table.pivot, table.pivot) == 0)


def _conjugator_claims(cert, table, fn, label):
    try:
        wit = fn(table)
    except InconsistentTable as exc:
        cert.claim(label, False, f"{type(exc).__name__}: {exc}")
        return None
    cert.result["witness"] = ser.conjugator_to_json(wit, table.window)
    cert.claim(label, True, f"{wit.checked} images checked")
    prod = wit.x @ wit.x_inverse
    ident = FinitaryMatrix.identity(table.window.indices, table.field)
    cert.claim("x · x_inv = Id", prod == ident)
    return wit


def cmd_recover_automorphism(args, cert):
    obj = _load(cert, "table", args.table)
    try:
        table = ser.automorphism_table_from_json(obj, args.flavor)
    except InconsistentTable as exc:
        cert.claim("diagonal images are orthogonal idempotents", False, str(exc))
        return
    if table.flavor is Flavor.LIE:
        _classify(table, cert)
    elif table.flavor is Flavor.ANTI:
        _conjugator_claims(cert, table, decompose_anti_automorphism,
                           "psi(e_ij) = x^-1 e_ji x for every window unit")
    else:
        _conjugator_claims(cert, table, recover_conjugator,
                           "phi(e_ij) = x^-1 e_ij x for every window unit")


def _classify(table, cert):
    res = classify_lie_automorphism(table)
    cert.result["verdict"] = res.verdict
    cert.result["details"] = list(res.details)
    if res.witness is not None:
        cert.result["witness"] = ser.conjugator_to_json(res.witness, table.window)
    form = {"TypeI": "x^-1 a x", "TypeII": "-x^-1 a^t x"}.get(res.verdict)
    cert.claim(f"alpha(a) = {form}" if form else "table matches a Lie automorphism type",
               res.ok, "; ".join(res.details))


def cmd_classify_lie(args, cert):
    obj = _load(cert, "table", args.table)
    _classify(ser.automorphism_table_from_json(obj, "lie"), cert)


def cmd_span(args, cert):
    field, labels, basis = ser.basis_from_json(_load(cert, "basis", args.basis))
    target = ser.matrix_from_json(_load(cert, "target", args.target))
    if not isinstance(target, FinitaryMatrix):
        raise InputError("span target must be finitary")
    dec = bracket_span_decompose(basis, target)
    cert.result["rank"] = dec.rank
    if dec.ok:
        cert.result["coefficients"] = [[labels[u], labels[v], field.format(c)]
                                       for (u, v), c in sorted(dec.coefficients.items())]
    cert.claim("target lies in the span of pairwise brackets", dec.ok,
               f"bracket span rank {dec.rank}")


def cmd_check_class(args, cert):
    a = ser.matrix_from_json(_load(cert, "input", args.input))
    tag = ClassTag.parse(args.tag)
    rep = check_class(a, tag)
    cert.result.update(tag=str(tag), vacuous=rep.vacuous,
                       violation=list(rep.violation) if rep.violation else None)
    cert.claim(f"matrix belongs to {tag}", rep.ok,
               f"violation at {rep.violation}" if rep.violation else rep.note)


def cmd_check_scalar(args, cert):
    x = ser.matrix_from_json(_load(cert, "x", args.x))
    if not isinstance(x, FinitaryMatrix):
        x = x.to_finitary() if hasattr(x, "to_finitary") else None
        if x is None:
            raise InputError("x must be a finitary matrix")
    window = ser.parse_window(args.window) if args.window else None
    rep = check_involution_scalar(x, Involution(args.involution), window)
    cert.result["alpha"] = str(rep.alpha) if rep.ok else None
    cert.result["violation"] = list(rep.violation) if rep.violation else None
    cert.claim("x x* is a nonzero scalar matrix", rep.ok,
               f"alpha = {rep.alpha}" if rep.ok else f"first off-scalar position {rep.violation}")


COMMANDS = {
    "tilde": cmd_tilde,
    "recover-derivation": cmd_recover_derivation,
    "recover-automorphism": cmd_recover_automorphism,
    "classify-lie": cmd_classify_lie,
    "span": cmd_span,
    "check-class": cmd_check_class,
    "check-scalar": cmd_check_scalar,
}


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="infmat", description="Exact checks on infinite-matrix witnesses.")
    sub = p.add_subparsers(dest="command", required=True)

    def add(name, help_):
        sp = sub.add_parser(name, help=help_)
        sp.add_argument("--out", help="also write the certificate to this file")
        return sp

    sp = add("tilde", "invert ad(E) and verify [E, a~] = a")
    sp.add_argument("--mode", choices=("n", "z"), default="n")
    sp.add_argument("--block", type=int, default=1)
    sp.add_argument("--input", required=True)
    sp.add_argument("--verify-window", help="LO:HI")
    sp.add_argument("--image", help="verify this a~ instead of the computed one")

    sp = add("recover-derivation", "recover y with d = ad(y)")
    sp.add_argument("--table", required=True)
    sp.add_argument("--pivot", type=int)
    sp.add_argument("--skew", choices=("t", "s"))

    sp = add("recover-automorphism", "recover a conjugator")
    sp.add_argument("--table", required=True)
    sp.add_argument("--flavor", choices=("assoc", "lie", "anti"))

    sp = add("classify-lie", "classify a Lie automorphism table")
    sp.add_argument("--table", required=True)

    sp = add("span", "decompose a target into brackets of a basis")
    sp.add_argument("--basis", required=True)
    sp.add_argument("--target", required=True)

    sp = add("check-class", "check a class tag on a matrix")
    sp.add_argument("--input", required=True)
    sp.add_argument("--tag", required=True)

    sp = add("check-scalar", "check that x x* is scalar")
    sp.add_argument("--x", required=True)
    sp.add_argument("--involution", choices=("t", "s"), default="t")
    sp.add_argument("--window", help="LO:HI")
    return p


def write_atomic(path: str, text: str):
    d = os.path.dirname(os.path.abspath(path))
    fd, tmp = tempfile.mkstemp(dir=d, prefix=".infmat-", suffix=".tmp")
    try:
        with os.fdopen(fd, "w", encoding="utf-8") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


_WINDOW_FLAGS = ("--verify-window", "--window")


def _join_window_flags(argv):
    """Glue ``--window -10:10`` into ``--window=-10:10``; argparse would read
    the negative bound as an option."""
    out, it = [], iter(argv)
    for tok in it:
        if tok in _WINDOW_FLAGS:
            nxt = next(it, None)
            out.append(tok if nxt is None else f"{tok}={nxt}")
        else:
            out.append(tok)
    return out


def run(argv=None) -> Certificate:
    argv = sys.argv[1:] if argv is None else list(argv)
    args = build_parser().parse_args(_join_window_flags(argv))
    cert = Certificate(args.command, out=args.out)
    try:
        COMMANDS[args.command](args, cert)
    except (InputError, InfmatError, ValueError, KeyError, TypeError) as exc:
        if isinstance(exc, InconsistentTable):
            cert.claim("input is consistent", False, str(exc))
        else:
            cert.error = f"{type(exc).__name__}: {exc}"
            cert.claims.clear()
            cert.result.clear()
    return cert


def main(argv=None) -> int:
    cert = run(argv)
    text = cert.render()
    sys.stdout.write(text)
    if cert.out:
        try:
            write_atomic(cert.out, text)
        except OSError as exc:
            sys.stderr.write(f"cannot write {cert.out}: {exc}\n")
            return EXIT_CODES[INPUT_ERROR]
    return cert.exit_code


if __name__ == "__main__":
    sys.exit(main())
