"""Reading and writing diagram specification files (JSON, rationals as "p/q")."""
from __future__ import annotations

import hashlib
import json
from pathlib import Path

from .category import Diagram, FiniteCategory, PolytopeMap, validate_category
from .spaces import AffineMap, FiniteSpace, Polytope, TableMap
from .spaces.rational import fmt_vec

__all__ = ["DiagramParseError", "load_diagram", "diagram_from_json", "diagram_to_json", "diagram_digest"]


class DiagramParseError(ValueError):
    pass


def _require(obj, key, where):
    if key not in obj:
        raise DiagramParseError(f"{where}: missing field {key!r}")
    return obj[key]


def diagram_from_json(data: dict, validate: bool = True) -> Diagram:
    objects = _require(data, "objects", "diagram")
    spaces = {}
    order = []
    for ob in objects:
        oid = str(_require(ob, "id", "object"))
        kind = _require(ob, "kind", f"object {oid}")
        if kind == "finite":
            pts = _require(ob, "points", f"object {oid}")
            if isinstance(pts, int):
                space = FiniteSpace.of_size(pts, oid)
            else:
                space = FiniteSpace(tuple(str(p) for p in pts), oid)
        elif kind == "polytope":
            try:
                space = Polytope.from_json(_require(ob, "vertices", f"object {oid}"))
            except (ValueError, ZeroDivisionError) as exc:
                raise DiagramParseError(f"object {oid}: {exc}") from exc
        else:
            raise DiagramParseError(f"object {oid}: unknown kind {kind!r}")
        spaces[oid] = space
        order.append(oid)

    identities = {str(k): str(v) for k, v in _require(data, "identities", "diagram").items()}
    morphisms = {}
    maps = {}
    for o, i in identities.items():
        morphisms[i] = (o, o)
    for mo in _require(data, "morphisms", "diagram"):
        mid = str(_require(mo, "id", "morphism"))
        src, dst = str(_require(mo, "src", mid)), str(_require(mo, "dst", mid))
        if src not in spaces or dst not in spaces:
            raise DiagramParseError(f"morphism {mid}: unknown endpoint")
        morphisms[mid] = (src, dst)
        entry = mo.get("map")
        if entry is None:
            if identities.get(src) == mid and src == dst:
                continue
            raise DiagramParseError(f"morphism {mid}: missing map")
        S, T = spaces[src], spaces[dst]
        if "table" in entry:
            if not isinstance(S, FiniteSpace) or not isinstance(T, FiniteSpace):
                raise DiagramParseError(f"morphism {mid}: table map between non-finite spaces")
            try:
                maps[mid] = TableMap(S, T, tuple(T.index(str(v)) for v in entry["table"]))
            except (KeyError, ValueError) as exc:
                raise DiagramParseError(f"morphism {mid}: bad table ({exc})") from exc
        elif "affine" in entry:
            if not isinstance(S, Polytope) or not isinstance(T, Polytope):
                raise DiagramParseError(f"morphism {mid}: affine map between non-polytope spaces")
            try:
                aff = AffineMap.from_json(entry["affine"], S.ambient_dim)
                maps[mid] = PolytopeMap(S, T, aff)
            except (ValueError, KeyError) as exc:
                raise DiagramParseError(f"morphism {mid}: bad affine map ({exc})") from exc
        else:
            raise DiagramParseError(f"morphism {mid}: map must be 'table' or 'affine'")

    compose = {}
    for entry in _require(data, "compose", "diagram"):
        if isinstance(entry, dict):
            g, f, h = entry["outer"], entry["inner"], entry["result"]
        else:
            g, f, h = entry
        compose[(str(g), str(f))] = str(h)
    shape = FiniteCategory(tuple(order), morphisms, identities, compose)
    d = Diagram(shape, spaces, maps)
    if validate:
        validate_category(shape)
        d.validate()
    return d


def load_diagram(path, validate: bool = True) -> Diagram:
    try:
        data = json.loads(Path(path).read_text())
    except json.JSONDecodeError as exc:
        raise DiagramParseError(f"invalid JSON: {exc}") from exc
    return diagram_from_json(data, validate=validate)


def _space_json(oid, space):
    if isinstance(space, FiniteSpace):
        return {"id": oid, "kind": "finite", "points": [str(p) for p in space.points]}
    if isinstance(space, Polytope):
        return {"id": oid, "kind": "polytope", "vertices": space.to_json()}
    raise TypeError("only finite and polytope diagrams serialize")


def diagram_to_json(d: Diagram) -> dict:
    objs = [_space_json(o, d.spaces[o]) for o in d.objects]
    morphs = []
    for m in sorted(d.shape.morphisms):
        a, b = d.shape.morphisms[m]
        f = d.maps[m]
        entry = {"id": m, "src": a, "dst": b}
        if isinstance(f, TableMap):
            entry["map"] = {"table": [str(f.target.points[i]) for i in f.table]}
        else:
            entry["map"] = {"affine": {"matrix": [fmt_vec(r) for r in f.affine.matrix],
                                       "offset": fmt_vec(f.affine.offset)}}
        morphs.append(entry)
    comp = [{"outer": g, "inner": f, "result": h} for (g, f), h in sorted(d.shape.compose.items())]
    return {"objects": objs, "morphisms": morphs, "identities": dict(d.shape.identity), "compose": comp}


def diagram_digest(d: Diagram) -> str:
    """SHA-256 of the canonical JSON form."""
    blob = json.dumps(diagram_to_json(d), sort_keys=True, separators=(",", ":"))
    return hashlib.sha256(blob.encode()).hexdigest()
