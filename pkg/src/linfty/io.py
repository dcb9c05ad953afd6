"""JSON documents: modules, multilinear maps, DGLs, L-infinity algebras and
morphisms, formal DG manifolds and deformations.

Rationals are strings (``"-3/4"``, ``"2"``) in lowest terms.  A map block
lists its entries as ``[[input labels], [one rational per target basis
vector]]`` pairs.  Unknown fields are rejected.
"""

import json
from fractions import Fraction
from importlib import resources
from pathlib import Path

import jsonschema

from .algebra import DGL, LInftyAlgebra, LInftyMorphism
from .coalgebra import Coderivation, Morphism
from .deformation import Deformation, FormalDGManifold, Product
from .graded import EXTERIOR, SYMMETRIC, GradedModule, koszul_sort
from .multimap import MultiMap, vec_add

SCHEMA_VERSION = "1"
KINDS = ("dgl", "linfty", "manifold", "morphism", "deformation", "random_dgl")


class DocumentError(ValueError):
    """Malformed or inconsistent input document."""


_RATIONAL = {"type": "string", "pattern": r"^-?[0-9]+(/[0-9]+)?$"}
_MODULE = {
    "type": "object",
    "additionalProperties": False,
    "required": ["degrees", "dims", "labels"],
    "properties": {
        "degrees": {"type": "array", "items": {"type": "integer"}},
        "dims": {"type": "array", "items": {"type": "integer", "minimum": 0}},
        "labels": {"type": "array", "items": {"type": "array", "items": {"type": "string"}}},
    },
}
_MAP = {
    "type": "object",
    "additionalProperties": False,
    "required": ["arity", "symmetry", "degree", "entries"],
    "properties": {
        "arity": {"type": "integer", "minimum": 1},
        "symmetry": {"enum": [SYMMETRIC, EXTERIOR]},
        "degree": {"type": "integer"},
        "entries": {
            "type": "array",
            "items": {
                "type": "array", "minItems": 2, "maxItems": 2,
                "prefixItems": [{"type": "array", "items": {"type": "string"}},
                                {"type": "array", "items": _RATIONAL}],
            },
        },
    },
}
_OPTIONS = {
    "type": "object",
    "additionalProperties": False,
    "properties": {
        "arity": {"type": "integer", "minimum": 1},
        "poly_degree": {"type": "integer", "minimum": 0},
        "seed": {"type": "integer"},
        "max_dim": {"type": "integer", "minimum": 1},
    },
}
_META = {"type": "object"}


def _structure(kinds):
    return {
        "type": "object",
        "additionalProperties": False,
        "required": ["kind", "module", "maps"],
        "properties": {
            "kind": {"enum": list(kinds)},
            "module": _MODULE,
            "maps": {"type": "object", "additionalProperties": _MAP},
        },
    }


SCHEMA = {
    "type": "object",
    "additionalProperties": False,
    "required": ["schema_version", "kind"],
    "properties": {
        "schema_version": {"const": SCHEMA_VERSION},
        "kind": {"enum": list(KINDS)},
        "module": _MODULE,
        "maps": {"type": "object", "additionalProperties": _MAP},
        "source": _structure(("linfty", "manifold")),
        "target": _structure(("linfty", "manifold")),
        "base": _structure(("manifold",)),
        "fiber": _structure(("manifold",)),
        "options": _OPTIONS,
        "meta": _META,
    },
}

_REQUIRED = {
    "dgl": ("module", "maps"),
    "linfty": ("module", "maps"),
    "manifold": ("module", "maps"),
    "morphism": ("source", "target", "maps"),
    "deformation": ("base", "fiber", "module", "maps"),
    "random_dgl": ("options",),
}


# -- rationals, modules, maps ---------------------------------------------------------------------

def parse_rational(text):
    try:
        x = Fraction(text)
    except (ValueError, ZeroDivisionError):
        raise DocumentError(f"not a rational: {text!r}") from None
    if format_rational(x) != text and f"{x.numerator}/{x.denominator}" != text:
        raise DocumentError(f"rational not in lowest terms: {text!r}")
    return x


def format_rational(x):
    return str(Fraction(x))


def module_to_json(module):
    comps = module.components
    return {"degrees": [deg for deg, _, _ in comps], "dims": [dim for _, dim, _ in comps],
            "labels": [list(names) for _, _, names in comps]}


def module_from_json(obj):
    if not (len(obj["degrees"]) == len(obj["dims"]) == len(obj["labels"])):
        raise DocumentError("degrees, dims and labels differ in length")
    for dim, names in zip(obj["dims"], obj["labels"]):
        if dim != len(names):
            raise DocumentError("a dims entry does not match its label list")
    try:
        return GradedModule(list(zip(obj["degrees"], obj["labels"])))
    except ValueError as exc:
        raise DocumentError(str(exc)) from None


def map_to_json(m):
    entries = []
    for word in sorted(m.entries):
        vec = m.entries[word]
        if not vec:
            continue
        entries.append([[m.source.labels[i] for i in word],
                        [format_rational(vec.get(j, 0)) for j in range(m.target.dim)]])
    return {"arity": m.arity, "symmetry": m.symmetry, "degree": m.degree, "entries": entries}


def map_from_json(obj, source, target, name="map"):
    arity, sym = obj["arity"], obj["symmetry"]
    entries = {}
    for labels, values in obj["entries"]:
        if len(labels) != arity:
            raise DocumentError(f"{name}: input {labels} has the wrong arity")
        if len(values) != target.dim:
            raise DocumentError(f"{name}: output of {labels} must list {target.dim} coefficients")
        try:
            word = tuple(source.index(lab) for lab in labels)
        except KeyError as exc:
            raise DocumentError(f"{name}: {exc.args[0]}") from None
        sign, canon = koszul_sort(word, source.degrees, sym)
        vec = {j: parse_rational(v) for j, v in enumerate(values)}
        vec = {j: x for j, x in vec.items() if x}
        if not sign:
            if vec:
                raise DocumentError(f"{name}: nonzero value on a vanishing word {labels}")
            continue
        vec_add(entries.setdefault(canon, {}), vec, sign)
    m = MultiMap(source, target, arity, obj["degree"], sym, {w: v for w, v in entries.items() if v})
    bad = m.check_degree()
    if bad:
        raise DocumentError(f"{name}: not homogeneous of degree {obj['degree']}")
    return m


def _numbered(maps, prefix, source, target):
    out = {}
    for key, obj in maps.items():
        if not key.startswith(prefix) or not key[len(prefix):].isdigit():
            raise DocumentError(f"unexpected map name {key!r} (expected {prefix}1, {prefix}2, ...)")
        n = int(key[len(prefix):])
        if obj["arity"] != n:
            raise DocumentError(f"{key} must have arity {n}")
        out[n] = map_from_json(obj, source, target, key)
    return out


# -- typed documents ---------------------------------------------------------------------------

def _dgl(module, maps):
    if set(maps) != {"d", "bracket"}:
        raise DocumentError("a DGL document has exactly the maps 'd' and 'bracket'")
    d = map_from_json(maps["d"], module, module, "d")
    br = map_from_json(maps["bracket"], module, module, "bracket")
    if d.arity != 1 or d.degree != 1 or br.arity != 2 or br.degree != 0 or br.symmetry != EXTERIOR:
        raise DocumentError("d must be 1-ary of degree 1, the bracket exterior 2-ary of degree 0")
    return DGL(module, d, br, check=False)


def _linfty(module, maps, arity):
    mu = _numbered(maps, "mu", module, module)
    for n, m in mu.items():
        if m.symmetry != EXTERIOR or m.degree != 2 - n:
            raise DocumentError(f"mu{n} must be exterior of degree {2 - n}")
    return LInftyAlgebra(module, mu, arity or max(mu, default=2), check=False)


def _manifold(module, maps, arity, check=False):
    comps = _numbered(maps, "Q", module, module)
    for n, m in comps.items():
        if m.symmetry != SYMMETRIC or m.degree != 1:
            raise DocumentError(f"Q{n} must be symmetric of degree 1")
    Q = Coderivation(module, comps, arity or max(comps, default=1))
    if check:
        return FormalDGManifold(module, Q)
    obj = object.__new__(FormalDGManifold)
    obj.space, obj.Q = module, Q
    return obj


def _structure_from(obj, arity):
    module = module_from_json(obj["module"])
    if obj["kind"] == "linfty":
        return _linfty(module, obj["maps"], arity)
    return _manifold(module, obj["maps"], arity)


def validate(doc):
    try:
        jsonschema.validate(doc, SCHEMA)
    except jsonschema.ValidationError as exc:
        where = "/".join(str(p) for p in exc.absolute_path) or "document"
        raise DocumentError(f"{where}: {exc.message}") from None
    missing = [k for k in _REQUIRED[doc["kind"]] if k not in doc]
    if missing:
        raise DocumentError(f"{doc['kind']} document lacks {', '.join(missing)}")
    return doc


def read_document(path):
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise DocumentError(str(exc)) from None
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise DocumentError(f"invalid JSON: {exc}") from None
    if not isinstance(doc, dict):
        raise DocumentError("top level must be an object")
    return validate(doc)


def from_document(doc, arity=None, seed=None):
    """The typed object a validated document describes."""
    kind = doc["kind"]
    opts = doc.get("options", {})
    arity = arity or opts.get("arity")
    if kind == "random_dgl":
        from .generators import random_dgl

        s = seed if seed is not None else opts.get("seed", 0)
        return random_dgl(s, opts.get("max_dim", 6))
    if kind == "dgl":
        return _dgl(module_from_json(doc["module"]), doc["maps"])
    if kind == "linfty":
        return _linfty(module_from_json(doc["module"]), doc["maps"], arity)
    if kind == "manifold":
        return _manifold(module_from_json(doc["module"]), doc["maps"], arity)
    if kind == "morphism":
        src = _structure_from(doc["source"], arity)
        tgt = _structure_from(doc["target"], arity)
        if doc["source"]["kind"] != doc["target"]["kind"]:
            raise DocumentError("source and target must both be linfty or both manifold")
        if doc["source"]["kind"] == "linfty":
            f = _numbered(doc["maps"], "f", src.module, tgt.module)
            A = arity or max(f, default=1)
            return LInftyMorphism(src, tgt, f, A)
        comps = _numbered(doc["maps"], "f", src.space, tgt.space)
        return Morphism(src.space, tgt.space, comps, arity or max(comps, default=1)), src, tgt
    # deformation
    base = _structure_from(doc["base"], arity)
    fiber = _structure_from(doc["fiber"], arity)
    pr = Product(base.space, fiber.space)
    module = module_from_json(doc["module"])
    if module != pr.module:
        raise DocumentError("the product module does not match base x fiber")
    comps = _numbered(doc["maps"], "Q", module, module)
    A = arity or max(comps, default=1)
    d = Deformation(base, fiber, Coderivation(module, comps, A), pr, dict(doc.get("options", {})))
    return d


def load(path, arity=None, seed=None):
    doc = read_document(path)
    return doc, from_document(doc, arity, seed)


# -- writers ------------------------------------------------------------------------------------

def _doc(kind, **fields):
    doc = {"schema_version": SCHEMA_VERSION, "kind": kind}
    doc.update({k: v for k, v in fields.items() if v is not None})
    return doc


def dgl_document(dgl, meta=None):
    return _doc("dgl", module=module_to_json(dgl.module),
                maps={"d": map_to_json(dgl.d), "bracket": map_to_json(dgl.bracket)}, meta=meta)


def _linfty_maps(alg):
    return {f"mu{n}": map_to_json(alg.comp(n)) for n in range(1, alg.max_arity + 1)}


def linfty_document(alg, meta=None):
    return _doc("linfty", module=module_to_json(alg.module), maps=_linfty_maps(alg),
                options={"arity": alg.max_arity}, meta=meta)


def _manifold_maps(Q):
    return {f"Q{n}": map_to_json(Q.comp(n)) for n in range(1, Q.max_arity + 1)}


def manifold_document(M, meta=None):
    return _doc("manifold", module=module_to_json(M.space), maps=_manifold_maps(M.Q),
                options={"arity": M.Q.max_arity}, meta=meta)


def morphism_document(f, meta=None):
    """An unshifted ``LInftyMorphism``."""
    src = {"kind": "linfty", "module": module_to_json(f.source.module), "maps": _linfty_maps(f.source)}
    tgt = {"kind": "linfty", "module": module_to_json(f.target.module), "maps": _linfty_maps(f.target)}
    maps = {f"f{n}": map_to_json(f.comp(n)) for n in range(1, f.max_arity + 1)}
    return _doc("morphism", source=src, target=tgt, maps=maps, options={"arity": f.max_arity}, meta=meta)


def formal_morphism_document(F, QS, QT, meta=None):
    """A shifted formal map between formal DG manifolds."""
    src = {"kind": "manifold", "module": module_to_json(QS.module), "maps": _manifold_maps(QS)}
    tgt = {"kind": "manifold", "module": module_to_json(QT.module), "maps": _manifold_maps(QT)}
    maps = {f"f{n}": map_to_json(F.comp(n)) for n in range(1, F.max_arity + 1)}
    return _doc("morphism", source=src, target=tgt, maps=maps, options={"arity": F.max_arity}, meta=meta)


def deformation_document(d, meta=None):
    base = {"kind": "manifold", "module": module_to_json(d.base.space), "maps": _manifold_maps(d.base.Q)}
    fiber = {"kind": "manifold", "module": module_to_json(d.fiber.space), "maps": _manifold_maps(d.fiber.Q)}
    opts = {k: v for k, v in d.window.items() if k in ("arity", "poly_degree")}
    if "A" in d.window:
        opts["arity"] = d.window["A"]
    if "P" in d.window:
        opts["poly_degree"] = d.window["P"]
    return _doc("deformation", base=base, fiber=fiber, module=module_to_json(d.product.module),
                maps=_manifold_maps(d.Q), options=opts or None, meta=meta)


def dumps(doc):
    return json.dumps(doc, indent=2, sort_keys=True) + "\n"


def write_document(doc, path):
    Path(path).write_text(dumps(doc))
    return path


def fixture_path(name):
    """Path of a shipped fixture document (``dgl_massey``, ``manifold_cubic``, ...)."""
    return resources.files("linfty") / "data" / f"{name}.json"


def fixture_names():
    return sorted(p.name[:-5] for p in (resources.files("linfty") / "data").iterdir()
                  if p.name.endswith(".json"))
