"""Versioned JSON for every value type; output is byte-deterministic.

Each document is ``{"version": 1, "kind": ..., ...}`` where kind is one of
``lf``, ``ldo``, ``hform``, ``oform``, ``dend``, ``tower``.  Lists are sorted
by their integer keys, so equal values always serialize identically.
"""

from __future__ import annotations

import json
from fractions import Fraction

from .horiforms import HorizontalForm
from .jetalgebra import LocalFunction
from .ldocalc import Ldo
from .lifting import DEndElement
from .opcomplex import OperatorForm
from .shlie import ShLieTower

VERSION = 1
KINDS = ("lf", "ldo", "hform", "oform", "dend", "tower")


class FormatError(ValueError):
    pass


def _uexp(ue) -> list:
    return [[list(J), m] for J, m in ue]


def _lf_body(f: LocalFunction) -> list:
    return [{"coeff": str(c), "x": list(xe), "u": _uexp(ue)}
            for (xe, ue), c in sorted(f.terms.items())]


def _ldo_body(A: Ldo) -> dict:
    terms = []
    for (xi, eta), c in sorted(A.terms.items()):
        terms.append({"xi": [list(I) for I in xi], "eta": [_uexp(m) for m in eta],
                      "coeff": _lf_body(c)})
    return {"dim": A.dim, "arity": A.arity, "polarized": A.polarized, "prec": A.prec,
            "terms": terms}


def _hform_body(w: HorizontalForm) -> dict:
    comps = [{"eps": list(e), "f": _lf_body(f)} for e, f in sorted(w.components.items())]
    return {"dim": w.dim, "degree": w.degree, "components": comps}


def _oform_body(F: OperatorForm) -> dict:
    comps = [{"eps": list(e), "op": _ldo_body(A)} for e, A in sorted(F.components.items())]
    return {"dim": F.dim, "arity": F.arity, "degree": F.degree, "components": comps}


def _dend_body(f: DEndElement) -> dict:
    # "form_degree" is the classical degree N - s - k, given for readers only
    fams = [{"s": s, "eps": [list(e) for e in v], "form_degree": F.degree, "form": _oform_body(F)}
            for (s, v), F in sorted(f.families.items())]
    return {"dim": f.dim, "arity": f.arity, "degree": f.degree, "families": fams}


def _tower_body(t: ShLieTower) -> dict:
    return {"dim": t.dim,
            "lt2": None if t.lt2 is None else _ldo_body(t.lt2),
            "brackets": [{"arity": k, "element": _dend_body(b)}
                         for k, b in sorted(t.brackets.items())]}


_WRITERS = [(LocalFunction, "lf", _lf_body), (Ldo, "ldo", _ldo_body),
            (HorizontalForm, "hform", _hform_body), (OperatorForm, "oform", _oform_body),
            (DEndElement, "dend", _dend_body), (ShLieTower, "tower", _tower_body)]


def to_data(value) -> dict:
    for cls, kind, body in _WRITERS:
        if isinstance(value, cls):
            data = {"version": VERSION, "kind": kind}
            b = body(value)
            data.update({"dim": value.dim, "terms": b} if kind == "lf" else b)
            return data
    raise TypeError(f"cannot serialize {type(value).__name__}")


def dumps(value, indent: int | None = None) -> str:
    return json.dumps(to_data(value), sort_keys=True, indent=indent,
                      separators=(",", ": ") if indent else (",", ":"))


# ---------------------------------------------------------------------------
# reading


def _tuple_uexp(items) -> tuple:
    return tuple(sorted((tuple(J), int(m)) for J, m in items))


def _lf_read(dim, items) -> LocalFunction:
    terms = {}
    for t in items:
        key = (tuple(t["x"]), _tuple_uexp(t["u"]))
        terms[key] = terms.get(key, 0) + Fraction(t["coeff"])
    return LocalFunction(dim, terms)


def _ldo_read(d) -> Ldo:
    N = d["dim"]
    terms = {}
    for t in d["terms"]:
        key = (tuple(tuple(I) for I in t["xi"]), tuple(_tuple_uexp(m) for m in t["eta"]))
        terms[key] = _lf_read(N, t["coeff"])
    return Ldo(N, d["arity"], terms, polarized=bool(d["polarized"]), prec=d["prec"])


def _hform_read(d) -> HorizontalForm:
    return HorizontalForm(d["dim"], d["degree"],
                          {tuple(c["eps"]): _lf_read(d["dim"], c["f"]) for c in d["components"]})


def _oform_read(d) -> OperatorForm:
    return OperatorForm(d["dim"], d["arity"], d["degree"],
                        {tuple(c["eps"]): _ldo_read(c["op"]) for c in d["components"]})


def _dend_read(d) -> DEndElement:
    fams = {(f["s"], tuple(tuple(e) for e in f["eps"])): _oform_read(f["form"])
            for f in d["families"]}
    return DEndElement(d["dim"], d["arity"], d["degree"], fams)


def _tower_read(d) -> ShLieTower:
    lt2 = None if d["lt2"] is None else _ldo_read(d["lt2"])
    return ShLieTower(d["dim"], {b["arity"]: _dend_read(b["element"]) for b in d["brackets"]}, lt2)


_READERS = {"lf": lambda d: _lf_read(d["dim"], d["terms"]), "ldo": _ldo_read,
            "hform": _hform_read, "oform": _oform_read, "dend": _dend_read,
            "tower": _tower_read}


def from_data(data: dict, kind: str | None = None):
    if not isinstance(data, dict):
        raise FormatError("top-level JSON value must be an object")
    if data.get("version") != VERSION:
        raise FormatError(f"unsupported version {data.get('version')!r}")
    found = data.get("kind")
    if found not in _READERS:
        raise FormatError(f"unknown kind {found!r}")
    if kind is not None and found != kind:
        raise FormatError(f"expected kind {kind!r}, got {found!r}")
    try:
        return _READERS[found](data)
    except (KeyError, TypeError, AttributeError, ValueError) as exc:
        raise FormatError(f"malformed {found} document: {exc}") from exc


def loads(text: str, kind: str | None = None):
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise FormatError(f"invalid JSON at line {exc.lineno}, col {exc.colno}") from exc
    return from_data(data, kind)
