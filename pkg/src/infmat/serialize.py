"""JSON forms of matrices, tables and witnesses.

Scalars are always strings (``"3/4"``, ``"5"``) so that files stay exact.

Matrix file::

    {"field": {"type": "Q"}, "kind": "finitary" | "windowed" | "band" | "tail",
     "window": [lo, hi], "mode": "N" | "Z", "bandwidth": k, "tag": "rcf",
     "entries": [[i, j, "v"], ...]}

Tail file::

    {"field": ..., "kind": "tail", "mode": "N" | "Zlower", "period": 1,
     "core": [[i, j, "v"], ...], "tails": [[d, start, "v"], ...]}

Derivation and automorphism tables::

    {"field": ..., "window": [lo, hi], "basis": "full" | "sl" | "skew_t" | "skew_s",
     "pivot": i0, "flavor": "assoc" | "lie" | "anti",
     "images": {"e_1_2": [[i, j, "v"], ...], "h_3": [...], ...}}
"""

from __future__ import annotations

import json

from .automorphisms import AutomorphismTable, ConjugatorWitness, Flavor
from .bases import label_str, parse_label
from .derivations import DerivationTable, DerivationWitness
from .errors import ParseError
from .matrix import ClassTag, FinitaryMatrix, IndexMode, IndexWindow, Matrix, WindowedMatrix
from .scalars import Field
from .tails import TailMatrix, TailMode


def _field(obj):
    try:
        return Field.from_json(obj["field"])
    except KeyError as exc:
        raise ParseError("missing field specification") from exc


def _window(obj, key="window", default_mode=None):
    try:
        lo, hi = (int(v) for v in obj[key])
    except (KeyError, TypeError, ValueError) as exc:
        raise ParseError(f"bad or missing {key!r}: expected [lo, hi]") from exc
    mode = obj.get("mode", default_mode)
    if mode is None:
        mode = "N" if lo == 1 else "Z"
    try:
        return IndexWindow(lo, hi, IndexMode(mode))
    except ValueError as exc:
        raise ParseError(str(exc)) from exc


def parse_window(text: str, mode=None) -> IndexWindow:
    """``"LO:HI"`` as a window; ``N`` mode when ``LO = 1`` unless told otherwise."""
    try:
        lo, hi = (int(v) for v in text.split(":"))
    except ValueError as exc:
        raise ParseError(f"bad window {text!r}: expected LO:HI") from exc
    if mode is None:
        mode = IndexMode.NATURALS if lo == 1 else IndexMode.INTEGERS
    return IndexWindow(lo, hi, IndexMode(mode))


def entries_from_json(items, field) -> dict:
    out = {}
    try:
        for i, j, v in items:
            val = field.coerce(v) if not isinstance(v, float) else None
            if val is None:
                raise ParseError("floating point scalars are not accepted")
            key = (int(i), int(j))
            out[key] = field.add(out.get(key, field.zero()), val)
    except ParseError:
        raise
    except (TypeError, ValueError) as exc:
        raise ParseError(f"bad entry list: {exc}") from exc
    return {p: v for p, v in out.items() if v != 0}


def entries_to_json(entries, field):
    return [[i, j, field.format(v)] for (i, j), v in sorted(entries.items())]


def matrix_from_json(obj) -> Matrix:
    if not isinstance(obj, dict):
        raise ParseError("matrix file must hold a JSON object")
    field = _field(obj)
    kind = obj.get("kind", "finitary")
    if kind == "tail":
        try:
            mode = TailMode(obj.get("mode", "N"))
            tails = [(int(d), int(s), field.coerce(v)) for d, s, v in obj.get("tails", [])]
            return TailMatrix(field, entries_from_json(obj.get("core", []), field), tails,
                              mode, int(obj.get("period", 1)))
        except (TypeError, ValueError) as exc:
            raise ParseError(f"bad tail matrix: {exc}") from exc
    entries = entries_from_json(obj.get("entries", []), field)
    if kind == "finitary":
        m = FinitaryMatrix._raw(field, entries)
        if "window" in obj:
            w = _window(obj)
            if any(not w.holds(*p) for p in entries):
                raise ParseError("finitary entries outside the declared window")
        return m
    w = _window(obj)
    try:
        if kind == "band":
            tag = ClassTag.band(int(obj["bandwidth"]))
        elif kind == "windowed":
            tag = ClassTag.parse(obj.get("tag", "rcf"))
        else:
            raise ParseError(f"unknown matrix kind {kind!r}")
        guarantee = obj.get("guarantee")
        if guarantee is not None:
            guarantee = {(int(i), int(j)) for i, j in guarantee}
        return WindowedMatrix(field, w, tag, entries, guarantee)
    except (KeyError, ValueError) as exc:
        raise ParseError(f"bad {kind} matrix: {exc}") from exc


def matrix_to_json(m: Matrix) -> dict:
    f = m.field
    if isinstance(m, TailMatrix):
        return {"field": f.to_json(), "kind": "tail", "mode": m.mode.value, "period": m.period,
                "core": entries_to_json(m.core.entries, f),
                "tails": [[d, s, f.format(v)] for d, s, v in m.rays()]}
    if isinstance(m, FinitaryMatrix):
        return {"field": f.to_json(), "kind": "finitary", "entries": entries_to_json(m.entries, f)}
    w = m.window
    out = {"field": f.to_json(), "window": [w.lo, w.hi], "mode": w.mode.value,
           "entries": entries_to_json(m.entries, f)}
    if m.tag.bandwidth is not None:
        out.update(kind="band", bandwidth=m.tag.bandwidth)
    else:
        out.update(kind="windowed", tag=str(m.tag))
    if not m.fully_guaranteed:
        out["guarantee"] = [list(p) for p in sorted(m.guarantee)]
    return out


def dense_to_json(m: FinitaryMatrix, window: IndexWindow):
    return [[m.field.format(v) for v in row] for row in m.dense(window)]


def _images(obj, field):
    try:
        raw = obj["images"]
    except KeyError as exc:
        raise ParseError("table has no images") from exc
    if not isinstance(raw, dict):
        raise ParseError("images must map labels to entry lists")
    return {parse_label(k): FinitaryMatrix._raw(field, entries_from_json(v, field))
            for k, v in raw.items()}


def derivation_table_from_json(obj) -> DerivationTable:
    field = _field(obj)
    w = _window(obj)
    try:
        return DerivationTable(field, w, obj.get("basis", "full"), _images(obj, field),
                               int(obj.get("pivot", w.lo)))
    except ValueError as exc:
        raise ParseError(str(exc)) from exc


def derivation_table_to_json(t: DerivationTable) -> dict:
    f = t.field
    return {"field": f.to_json(), "window": [t.window.lo, t.window.hi],
            "mode": t.window.mode.value, "basis": t.basis_kind.value, "pivot": t.pivot,
            "images": {label_str(k): entries_to_json(v.entries, f)
                       for k, v in sorted(t.images.items())}}


def automorphism_table_from_json(obj, flavor=None, validate=True) -> AutomorphismTable:
    field = _field(obj)
    w = _window(obj)
    try:
        flavor = Flavor(flavor or obj.get("flavor", "assoc"))
        return AutomorphismTable(field, w, _images(obj, field), flavor, validate)
    except ValueError as exc:
        raise ParseError(str(exc)) from exc


def automorphism_table_to_json(t: AutomorphismTable) -> dict:
    f = t.field
    return {"field": f.to_json(), "window": [t.window.lo, t.window.hi],
            "mode": t.window.mode.value, "flavor": t.flavor.value,
            "images": {label_str(k): entries_to_json(v.entries, f)
                       for k, v in sorted(t.images.items())}}


def basis_from_json(obj):
    """``{"field": ..., "elements": [[[i, j, "v"], ...], ...], "labels": [...]}``."""
    field = _field(obj)
    try:
        elems = obj["elements"]
    except KeyError as exc:
        raise ParseError("basis file has no elements") from exc
    mats = [FinitaryMatrix._raw(field, entries_from_json(e, field)) for e in elems]
    labels = obj.get("labels") or [f"b{n}" for n in range(len(mats))]
    if len(labels) != len(mats):
        raise ParseError("labels and elements differ in length")
    return field, list(labels), mats


def basis_to_json(field, mats, labels=None) -> dict:
    out = {"field": field.to_json(),
           "elements": [entries_to_json(m.entries, field) for m in mats]}
    if labels is not None:
        out["labels"] = [label_str(x) if isinstance(x, tuple) else x for x in labels]
    return out


def derivation_witness_to_json(w: DerivationWitness) -> dict:
    y = w.y
    return {"y": entries_to_json(y.entries, y.field), "window": [y.window.lo, y.window.hi],
            "pivot": w.normalization, "residual_ok": w.residual_report.ok,
            "checked": len(w.residual_report.checked)}


def conjugator_to_json(c: ConjugatorWitness, window: IndexWindow) -> dict:
    return {"x": dense_to_json(c.x, window), "x_inv": dense_to_json(c.x_inverse, window),
            "verified": True, "scale_note": c.scale_note}


def load_json(path):
    try:
        with open(path, "rb") as fh:
            data = fh.read()
    except OSError as exc:
        raise ParseError(f"cannot read {path}: {exc.strerror}") from exc
    try:
        return data, json.loads(data)
    except (json.JSONDecodeError, UnicodeDecodeError) as exc:
        raise ParseError(f"{path} is not valid JSON: {exc}") from exc


def dump(obj) -> str:
    return json.dumps(obj, indent=2, sort_keys=True)
