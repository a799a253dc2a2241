"""JSON file formats for algebras, homomorphisms, sites and presheaves.

Algebra: ``{"theory": id, "carrier": n, "ops": {name: nested table or constant}}``
Homomorphism: ``{"dom": algebra or path, "cod": algebra or path, "map": [...]}``
Site: ``{"objects": [...], "arrows": [{"id", "src", "dst"}], "composition":
[[g, f, g∘f], ...], "identities": [...], "covers": {object: [[arrow ids]]}}``
Presheaf: ``{"site": site or path, "theory": id, "values": {object: algebra},
"restrictions": {arrow id: [map]}}``
"""

from __future__ import annotations

import json
import os

from .algebra import FiniteAlgebra, Homomorphism, check_homomorphism
from .errors import InputError, SignatureMismatch
from .site import FiniteSite, Presheaf
from .theories import signature as theory_signature


def parse_json(text: str, source: str = "<input>"):
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        offset = len(text[: exc.pos].encode("utf-8"))
        raise InputError(f"{source}: JSON parse error at byte {offset} "
                         f"(line {exc.lineno}, column {exc.colno}): {exc.msg}") from None


def read_json(path: str):
    try:
        with open(path, encoding="utf-8") as fh:
            text = fh.read()
    except OSError as exc:
        raise InputError(f"cannot read {path}: {exc.strerror}") from None
    return parse_json(text, path)


def dumps(obj) -> str:
    """Deterministic JSON text (sorted keys are not used: field order is part of the format)."""
    return json.dumps(obj, ensure_ascii=False, indent=2) + "\n"


# --------------------------------------------------------------------------
# algebras and homomorphisms


def algebra_to_json(A: FiniteAlgebra) -> dict:
    return {
        "theory": A.signature.name,
        "carrier": A.size,
        "ops": {op: A.nested(op) for op, _ in A.signature.operations},
    }


def algebra_from_json(data, theory=None) -> FiniteAlgebra:
    if not isinstance(data, dict):
        raise InputError("algebra must be a JSON object")
    for key in ("theory", "carrier", "ops"):
        if key not in data:
            raise InputError(f"algebra is missing {key!r}")
    if theory is not None and data["theory"] != theory:
        raise SignatureMismatch(f"algebra has theory {data['theory']!r}, expected {theory!r}")
    sig = theory_signature(data["theory"])
    n = data["carrier"]
    if not isinstance(n, int) or n < 1:
        raise InputError("carrier must be a positive integer")
    ops = data["ops"]
    names = [op for op, _ in sig.operations]
    if not isinstance(ops, dict) or sorted(ops) != sorted(names):
        raise SignatureMismatch(f"operations {sorted(ops) if isinstance(ops, dict) else ops} "
                                f"do not match signature {names}")
    for op, arity in sig.operations:
        _check_shape(ops[op], arity, n, op)
    return FiniteAlgebra.from_ops(sig, n, ops)


def _check_shape(table, arity, n, op):
    if arity == 0:
        if not isinstance(table, int) or isinstance(table, bool):
            raise InputError(f"constant {op} must be an integer")
        return
    if not isinstance(table, list) or len(table) != n:
        raise InputError(f"table for {op} must be a list of length {n}")
    for row in table:
        _check_shape(row, arity - 1, n, op)


def dumps_algebra(A: FiniteAlgebra) -> str:
    return dumps(algebra_to_json(A))


def loads_algebra(text: str, theory=None) -> FiniteAlgebra:
    return algebra_from_json(parse_json(text), theory)


def load_algebra(path: str, theory=None) -> FiniteAlgebra:
    return algebra_from_json(read_json(path), theory)


def _algebra_ref(ref, base_dir, theory):
    if isinstance(ref, str):
        return load_algebra(os.path.join(base_dir, ref), theory)
    return algebra_from_json(ref, theory)


def hom_to_json(f: Homomorphism) -> dict:
    return {"dom": algebra_to_json(f.dom), "cod": algebra_to_json(f.cod), "map": list(f.map)}


def hom_from_json(data, base_dir=".", theory=None) -> Homomorphism:
    if not isinstance(data, dict) or not {"dom", "cod", "map"} <= set(data):
        raise InputError("homomorphism needs 'dom', 'cod' and 'map'")
    dom = _algebra_ref(data["dom"], base_dir, theory)
    cod = _algebra_ref(data["cod"], base_dir, theory)
    if dom.signature != cod.signature:
        raise SignatureMismatch("domain and codomain have different theories")
    f = Homomorphism(dom, cod, tuple(data["map"]))
    if not check_homomorphism(f):
        raise InputError("map does not commute with the operations")
    return f


def load_hom(path: str, theory=None) -> Homomorphism:
    return hom_from_json(read_json(path), os.path.dirname(path) or ".", theory)


# --------------------------------------------------------------------------
# sites and presheaves


def site_to_json(S: FiniteSite) -> dict:
    labels = [_label(o) for o in S.objects]
    return {
        "objects": labels,
        "arrows": [{"id": a, "src": labels[s], "dst": labels[d]} for a, (s, d) in enumerate(S.arrows)],
        "composition": [[g, f, h] for (g, f), h in sorted(S.composition.items())],
        "identities": list(S.identities),
        "covers": {labels[c]: [list(f) for f in fams] for c, fams in enumerate(S.covers) if fams},
    }


def _label(o):
    return o if isinstance(o, str) else json.dumps(o)


def site_from_json(data) -> FiniteSite:
    try:
        labels = [str(o) for o in data["objects"]]
        pos = {o: i for i, o in enumerate(labels)}
        if len(pos) != len(labels):
            raise InputError("object labels must be unique")
        arrows = sorted(data["arrows"], key=lambda a: a["id"])
        if [a["id"] for a in arrows] != list(range(len(arrows))):
            raise InputError("arrow ids must be 0..k-1")
        pairs = tuple((pos[str(a["src"])], pos[str(a["dst"])]) for a in arrows)
        comp = {(g, f): h for g, f, h in data["composition"]}
        ids = tuple(data["identities"])
        covers = [[] for _ in labels]
        for obj, fams in data.get("covers", {}).items():
            covers[pos[str(obj)]] = [tuple(f) for f in fams]
    except (KeyError, TypeError, ValueError) as exc:
        raise InputError(f"malformed site: {exc!r}") from None
    return FiniteSite(tuple(labels), pairs, comp, ids, tuple(tuple(c) for c in covers))


def load_site(path: str) -> FiniteSite:
    return site_from_json(read_json(path))


def presheaf_to_json(P: Presheaf, site_ref=None) -> dict:
    labels = [_label(o) for o in P.site.objects]
    return {
        "site": site_ref if site_ref is not None else site_to_json(P.site),
        "theory": P.algebras[0].signature.name if P.algebras else None,
        "values": {labels[c]: algebra_to_json(A) for c, A in enumerate(P.algebras)}
        if P.algebras else {labels[c]: n for c, n in enumerate(P.sizes)},
        "restrictions": {str(a): list(m) for a, m in enumerate(P.maps)},
    }


def presheaf_from_json(data, base_dir=".", site: FiniteSite = None) -> Presheaf:
    try:
        if site is None:
            ref = data["site"]
            site = load_site(os.path.join(base_dir, ref)) if isinstance(ref, str) else site_from_json(ref)
        theory = data.get("theory")
        labels = [str(o) for o in site.objects]
        values = data["values"]
        if theory is None:
            sizes = tuple(int(values[o]) for o in labels)
            algebras = None
        else:
            algebras = tuple(_algebra_ref(values[o], base_dir, theory) for o in labels)
            sizes = tuple(A.size for A in algebras)
        restr = data["restrictions"]
        maps = tuple(tuple(restr[str(a)]) for a in range(len(site.arrows)))
    except (KeyError, TypeError, ValueError) as exc:
        raise InputError(f"malformed presheaf: {exc!r}") from None
    return Presheaf(site, sizes, maps, algebras)


def load_presheaf(path: str, site: FiniteSite = None) -> Presheaf:
    return presheaf_from_json(read_json(path), os.path.dirname(path) or ".", site)
