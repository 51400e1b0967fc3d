"""JSON documents for groupoids, spaces, correspondences, representations,
hypergroupoids and algebra elements.

Weights are exact fraction strings ("1/3").  Scalars in elements and
matrices may be ints, fraction strings, floats or [re, im] pairs of either.
Documents carry a ``kind``; when it is absent it is inferred from the keys.
References to other documents are inline objects, paths (relative to the
referencing file) or ``"builtin:<name>"``.
"""
from __future__ import annotations

import json
import os
from dataclasses import dataclass
from fractions import Fraction

import jsonschema
import numpy as np

from .action import EquivariantSystem, GSpace
from .correspondence import Correspondence
from .errors import DocumentSyntaxError, GroupoidLabError, SchemaError
from .exact import GaussianRational, format_fraction, parse_fraction
from .groupoid import FiniteGroupoid, HaarSystem, counting_haar
from .hyper import FiniteHypergroupoid, HyperHaar

__all__ = [
    "Document",
    "parse_document",
    "load_document",
    "dumps",
    "groupoid_doc",
    "action_doc",
    "correspondence_doc",
    "representation_doc",
    "hypergroupoid_doc",
    "element_doc",
    "parse_scalar",
    "format_scalar",
    "SCHEMAS",
]

_frac = {"type": ["string", "integer"]}
_weights = {"type": "object", "additionalProperties": _frac}
_ref = {"type": ["string", "object"]}
_scalar = {"oneOf": [{"type": ["string", "number"]},
                     {"type": "array", "items": {"type": ["string", "number"]}, "minItems": 2, "maxItems": 2}]}

SCHEMAS = {
    "groupoid": {
        "type": "object",
        "required": ["units", "arrows", "compose"],
        "properties": {
            "kind": {"const": "groupoid"},
            "name": {"type": "string"},
            "units": {"type": "array", "items": {"type": "string"}},
            "arrows": {"type": "array", "items": {
                "type": "object", "required": ["id", "src", "dst", "inv"],
                "properties": {k: {"type": "string"} for k in ("id", "src", "dst", "inv")},
                "additionalProperties": False}},
            "compose": {"type": "array", "items": {
                "type": "array", "items": {"type": "string"}, "minItems": 3, "maxItems": 3}},
            "haar": _weights,
        },
        "additionalProperties": False,
    },
    "action": {
        "type": "object",
        "required": ["groupoid", "points", "moment", "act"],
        "properties": {
            "kind": {"const": "action"},
            "name": {"type": "string"},
            "groupoid": _ref,
            "side": {"enum": ["left", "right"]},
            "points": {"type": "array", "items": {"type": "string"}},
            "moment": {"type": "object", "additionalProperties": {"type": "string"}},
            "act": {"type": "array", "items": {
                "type": "array", "items": {"type": "string"}, "minItems": 3, "maxItems": 3}},
            "alpha": _weights,
        },
        "additionalProperties": False,
    },
    "correspondence": {
        "type": "object",
        "required": ["left", "right", "space", "alpha", "delta"],
        "properties": {
            "kind": {"const": "correspondence"},
            "name": {"type": "string"},
            "left": _ref,
            "right": _ref,
            "space": {"type": "object", "required": ["left", "right"],
                      "properties": {"left": _ref, "right": _ref}, "additionalProperties": False},
            "alpha": _weights,
            "delta": _weights,
        },
        "additionalProperties": False,
    },
    "representation": {
        "type": "object",
        "required": ["groupoid", "fibers", "unitaries"],
        "properties": {
            "kind": {"const": "representation"},
            "groupoid": _ref,
            "mu": _weights,
            "fibers": {"type": "object", "additionalProperties": {"type": "integer", "minimum": 0}},
            "unitaries": {"type": "object", "additionalProperties": {
                "type": "array", "items": {"type": "array", "items": _scalar}}},
        },
        "additionalProperties": False,
    },
    "hypergroupoid": {
        "type": "object",
        "required": ["units", "elements", "kernel"],
        "properties": {
            "kind": {"const": "hypergroupoid"},
            "name": {"type": "string"},
            "units": {"type": "array", "items": {"type": "string"}},
            "elements": {"type": "array", "items": {
                "type": "object", "required": ["id", "r", "s", "star"],
                "properties": {k: {"type": "string"} for k in ("id", "r", "s", "star")},
                "additionalProperties": False}},
            "kernel": {"type": "array", "items": {
                "type": "array", "minItems": 3, "maxItems": 3,
                "prefixItems": [{"type": "string"}, {"type": "string"}, _weights]}},
            "haar": _weights,
        },
        "additionalProperties": False,
    },
    "element": {
        "type": "object",
        "required": ["coeffs"],
        "properties": {
            "kind": {"const": "element"},
            "coeffs": {"type": "object", "additionalProperties": _scalar},
        },
        "additionalProperties": False,
    },
}


@dataclass
class Document:
    kind: str
    body: dict
    value: object = None


def _path(parts) -> str:
    out = ""
    for p in parts:
        out += f"[{p}]" if isinstance(p, int) else (f".{p}" if out else str(p))
    return out or "$"


def parse_scalar(v, path="value"):
    """int / "p/q" / float / [re, im] -> exact or float scalar."""
    try:
        if isinstance(v, list):
            re, im = (parse_scalar(x, path) for x in v)
            if isinstance(re, float) or isinstance(im, float):
                return complex(float(re), float(im))
            return GaussianRational(re, im).simplify()
        if isinstance(v, float):
            return v
        return parse_fraction(v)
    except (ValueError, TypeError) as exc:
        raise SchemaError(str(exc), path) from None


def format_scalar(v):
    if isinstance(v, bool):
        raise ValueError("booleans are not scalars")
    if isinstance(v, GaussianRational):
        v = v.simplify()
        if isinstance(v, GaussianRational):
            return [format_fraction(v.re), format_fraction(v.im)]
    if isinstance(v, (int, Fraction)):
        return format_fraction(v)
    if isinstance(v, complex):
        return float(v.real) if v.imag == 0 else [float(v.real), float(v.imag)]
    return float(v)


def _weights_of(d, path):
    out = {}
    for k, v in d.items():
        try:
            out[k] = parse_fraction(v)
        except ValueError as exc:
            raise SchemaError(str(exc), f"{path}.{k}") from None
    return out


def _infer_kind(obj: dict) -> str:
    if "kind" in obj:
        return obj["kind"]
    keys = set(obj)
    for kind, probe in (("hypergroupoid", "kernel"), ("correspondence", "delta"),
                        ("representation", "unitaries"), ("action", "act"),
                        ("groupoid", "compose"), ("element", "coeffs")):
        if probe in keys:
            return kind
    raise SchemaError("cannot tell the document kind", "$")


def parse_document(text: str, base_dir: str | None = None) -> Document:
    try:
        obj = json.loads(text)
    except json.JSONDecodeError as exc:
        raise DocumentSyntaxError(exc.msg, exc.lineno, exc.colno) from None
    if not isinstance(obj, dict):
        raise SchemaError("document must be a JSON object", "$")
    kind = _infer_kind(obj)
    if kind not in SCHEMAS:
        raise SchemaError(f"unknown kind {kind!r}", "kind")
    validator = jsonschema.Draft202012Validator(SCHEMAS[kind])
    errors = sorted(validator.iter_errors(obj), key=lambda e: (list(map(str, e.absolute_path)), e.message))
    if errors:
        err = errors[0]
        raise SchemaError(err.message, _path(err.absolute_path))
    return Document(kind, obj, _BUILD[kind](obj, base_dir))


def load_document(path: str) -> Document:
    with open(path, encoding="utf-8") as fh:
        text = fh.read()
    return parse_document(text, os.path.dirname(os.path.abspath(path)))


def dumps(doc: dict) -> str:
    return json.dumps(doc, sort_keys=True, indent=2, ensure_ascii=False) + "\n"


# builders from parsed trees

def _groupoid(obj, base_dir):
    units = list(obj["units"])
    arrows, src, dst, inv = [], {}, {}, {}
    for i, a in enumerate(obj["arrows"]):
        aid = a["id"]
        if aid in src:
            raise SchemaError(f"duplicate arrow {aid!r}", f"arrows[{i}].id")
        arrows.append(aid)
        src[aid], dst[aid], inv[aid] = a["src"], a["dst"], a["inv"]
    for u in units:
        if u not in src:
            arrows.insert(0, u)
            src[u] = dst[u] = inv[u] = u
    known = set(arrows)
    for i, a in enumerate(obj["arrows"]):
        for k in ("src", "dst"):
            if a[k] not in units:
                raise SchemaError(f"{a[k]!r} is not a unit", f"arrows[{i}].{k}")
        if a["inv"] not in known:
            raise SchemaError(f"unknown arrow {a['inv']!r}", f"arrows[{i}].inv")
    table = {}
    for i, (a, b, c) in enumerate(obj["compose"]):
        for x in (a, b, c):
            if x not in known:
                raise SchemaError(f"unknown arrow {x!r}", f"compose[{i}]")
        if (a, b) in table and table[(a, b)] != c:
            raise SchemaError("conflicting products", f"compose[{i}]")
        table[(a, b)] = c
    try:
        G = FiniteGroupoid(tuple(arrows), tuple(units), src, dst, inv, table, name=obj.get("name", ""))
    except GroupoidLabError as exc:
        raise SchemaError(str(exc), "arrows") from None
    lam = HaarSystem(_weights_of(obj["haar"], "haar")) if "haar" in obj else counting_haar(G)
    missing = [a for a in G.arrows if a not in lam.weight]
    if missing:
        raise SchemaError(f"no weight for {missing[0]!r}", "haar")
    return G, lam


def _resolve(ref, base_dir, want):
    if isinstance(ref, dict):
        kind = _infer_kind(ref)
        if kind != want:
            raise SchemaError(f"expected a {want} document", "ref")
        return parse_document(json.dumps(ref), base_dir).value
    if ref.startswith("builtin:"):
        from .fixtures import builtin_group

        if want != "groupoid":
            raise SchemaError("builtin references name groups only", "ref")
        try:
            G = builtin_group(ref[len("builtin:"):])
        except KeyError as exc:
            raise SchemaError(str(exc), "ref") from None
        return G, counting_haar(G)
    path = ref if os.path.isabs(ref) or base_dir is None else os.path.join(base_dir, ref)
    try:
        doc = load_document(path)
    except OSError as exc:
        raise SchemaError(f"cannot read {ref!r}: {exc.strerror}", "ref") from None
    if doc.kind != want:
        raise SchemaError(f"{ref!r} is not a {want} document", "ref")
    return doc.value


def _action(obj, base_dir):
    G, lam = _resolve(obj["groupoid"], base_dir, "groupoid")
    side = obj.get("side", "left")
    act = {}
    pts = set(obj["points"])
    for i, (a, b, c) in enumerate(obj["act"]):
        g, x = (a, b) if side == "left" else (b, a)
        if g not in G.src or x not in pts or c not in pts:
            raise SchemaError("entry references an unknown id", f"act[{i}]")
        act[(a, b)] = c
    for x in obj["points"]:
        if x not in obj["moment"]:
            raise SchemaError("point has no moment", f"moment.{x}")
    try:
        X = GSpace(G, tuple(obj["points"]), obj["moment"], act, side, obj.get("name", ""))
    except GroupoidLabError as exc:
        raise SchemaError(str(exc), "act") from None
    alpha = EquivariantSystem(_weights_of(obj["alpha"], "alpha")) if "alpha" in obj else None
    return X, lam, alpha


def _correspondence(obj, base_dir):
    H, beta = _resolve(obj["left"], base_dir, "groupoid")
    G, lam = _resolve(obj["right"], base_dir, "groupoid")
    L, _, _ = _resolve(obj["space"]["left"], base_dir, "action")
    R, _, _ = _resolve(obj["space"]["right"], base_dir, "action")
    alpha = EquivariantSystem(_weights_of(obj["alpha"], "alpha"))
    raw = _weights_of(obj["delta"], "delta")
    delta = {}
    for key, v in raw.items():
        h, sep, cl = key.partition("|")
        if not sep:
            raise SchemaError("delta keys have the form 'h|[class]'", f"delta.{key}")
        delta[(h, cl)] = v
    C = Correspondence(H, beta, G, lam, L.as_left() if L.side == "left" else L, R, alpha, delta,
                       name=obj.get("name", ""))
    # units of H act with module 1 unless stated
    d = dict(C.delta)
    for cl in C.quotient.classes:
        u = C.r_X(C.quotient.section[cl])
        d.setdefault((u, cl), Fraction(1))
    return Correspondence(H, beta, G, lam, C.left, R, alpha, d, name=C.name)


def _representation(obj, base_dir):
    from .induction import rep_from_matrices

    G, lam = _resolve(obj["groupoid"], base_dir, "groupoid")
    mats = {}
    for g, rows in obj["unitaries"].items():
        if g not in G.src:
            raise SchemaError(f"unknown arrow {g!r}", f"unitaries.{g}")
        vals = [[complex(parse_scalar(v, f"unitaries.{g}")) for v in row] for row in rows]
        M = np.array(vals, dtype=complex).reshape(len(rows), len(rows[0]) if rows else 0)
        mats[g] = M
    for u in G.units:
        d = obj["fibers"].get(u, 0)
        mats.setdefault(u, np.eye(d, dtype=complex))
    missing = [g for g in G.arrows if g not in mats]
    if missing:
        raise SchemaError(f"no unitary for {missing[0]!r}", "unitaries")
    mu = _weights_of(obj["mu"], "mu") if "mu" in obj else None
    return rep_from_matrices(G, mats, lam, mu)


def _hypergroupoid(obj, base_dir):
    els = [e["id"] for e in obj["elements"]]
    known = set(els)
    r = {e["id"]: e["r"] for e in obj["elements"]}
    s = {e["id"]: e["s"] for e in obj["elements"]}
    star = {e["id"]: e["star"] for e in obj["elements"]}
    kernel = {}
    for i, (x, y, vec) in enumerate(obj["kernel"]):
        if x not in known or y not in known or any(w not in known for w in vec):
            raise SchemaError("kernel entry references an unknown element", f"kernel[{i}]")
        kernel[(x, y)] = _weights_of(vec, f"kernel[{i}]")
    H = FiniteHypergroupoid(tuple(els), tuple(obj["units"]), r, s, star, kernel, name=obj.get("name", ""))
    lam = HyperHaar(_weights_of(obj["haar"], "haar")) if "haar" in obj else None
    return H, lam


def _element(obj, base_dir):
    return {k: parse_scalar(v, f"coeffs.{k}") for k, v in obj["coeffs"].items()}


_BUILD = {
    "groupoid": _groupoid,
    "action": _action,
    "correspondence": _correspondence,
    "representation": _representation,
    "hypergroupoid": _hypergroupoid,
    "element": _element,
}


# serializers

def groupoid_doc(G: FiniteGroupoid, lam: HaarSystem | None = None) -> dict:
    lam = lam or counting_haar(G)
    return {
        "kind": "groupoid",
        "name": G.name,
        "units": list(G.units),
        "arrows": [{"id": a, "src": G.src[a], "dst": G.dst[a], "inv": G.inv[a]} for a in G.arrows],
        "compose": sorted([a, b, c] for (a, b), c in G.table.items()),
        "haar": {a: format_fraction(lam.weight[a]) for a in G.arrows},
    }


def action_doc(X: GSpace, lam: HaarSystem | None = None, alpha: EquivariantSystem | None = None) -> dict:
    doc = {
        "kind": "action",
        "name": X.name,
        "groupoid": groupoid_doc(X.groupoid, lam),
        "side": X.side,
        "points": list(X.points),
        "moment": dict(X.moment),
        "act": sorted([a, b, c] for (a, b), c in X.act.items()),
    }
    if alpha is not None:
        doc["alpha"] = {x: format_fraction(v) for x, v in alpha.weight.items()}
    return doc


def correspondence_doc(C: Correspondence) -> dict:
    return {
        "kind": "correspondence",
        "name": C.name,
        "left": groupoid_doc(C.H, C.beta),
        "right": groupoid_doc(C.G, C.lam),
        "space": {"left": action_doc(C.left, C.beta), "right": action_doc(C.right, C.lam)},
        "alpha": {x: format_fraction(v) for x, v in C.alpha.weight.items()},
        "delta": {f"{h}|{cl}": format_fraction(v) for (h, cl), v in C.delta.items()},
    }


def _fmt_entry(z: complex, digits: int = 12):
    z = complex(z)
    re = float(f"{z.real:.{digits}g}") + 0.0
    im = float(f"{z.imag:.{digits}g}") + 0.0
    return re if im == 0 else [re, im]


def representation_doc(R) -> dict:
    return {
        "kind": "representation",
        "groupoid": groupoid_doc(R.G, R.lam),
        "mu": {u: format_fraction(v) for u, v in R.measure.mu.items()},
        "fibers": {u: int(d) for u, d in R.dims.items()},
        "unitaries": {g: [[_fmt_entry(v) for v in row] for row in np.asarray(M)] for g, M in R.L.items()},
    }


def hypergroupoid_doc(H: FiniteHypergroupoid, lam: HyperHaar | None = None) -> dict:
    doc = {
        "kind": "hypergroupoid",
        "name": H.name,
        "units": list(H.units),
        "elements": [{"id": x, "r": H.r[x], "s": H.s[x], "star": H.star[x]} for x in H.elements],
        "kernel": [[x, y, {w: format_fraction(c) for w, c in sorted(vec.items())}]
                   for (x, y), vec in sorted(H.kernel.items())],
    }
    if lam is not None:
        doc["haar"] = {x: format_fraction(v) for x, v in lam.weight.items()}
    return doc


def element_doc(f) -> dict:
    return {"kind": "element", "coeffs": {k: format_scalar(v) for k, v in f.items()}}
