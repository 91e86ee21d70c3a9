"""Finite categories, diagrams of desk-scale compacta, cones and limits."""
from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from itertools import product
from typing import Any, Mapping, Sequence

from .spaces import (
    AffineMap,
    DimensionMismatch,
    FiniteSpace,
    HPolytope,
    Polytope,
    TableMap,
)

__all__ = [
    "MalformedCategory",
    "MalformedDiagram",
    "NotACone",
    "EmptyLimit",
    "FiniteCategory",
    "PolytopeMap",
    "Diagram",
    "Cone",
    "LimitSpace",
    "validate_category",
    "compute_limit",
    "characteristic_point",
    "brute_force_limit",
    "free_diagram",
]


class MalformedCategory(ValueError):
    def __init__(self, law: str, witness: Any):
        super().__init__(f"{law}: {witness}")
        self.law = law
        self.witness = witness


class MalformedDiagram(ValueError):
    pass


class NotACone(ValueError):
    pass


class EmptyLimit(ValueError):
    """The limit carrier is empty. A legal outcome, raised so callers must decide."""


@dataclass(frozen=True)
class FiniteCategory:
    """Finite category with an explicit composition table.

    ``compose[(g, f)]`` is ``g ∘ f`` for ``f: A -> B``, ``g: B -> C``.
    """

    objects: tuple
    morphisms: Mapping[str, tuple]  # id -> (src, dst)
    identity: Mapping[Any, str]
    compose: Mapping[tuple, str]

    def __post_init__(self):
        object.__setattr__(self, "objects", tuple(self.objects))
        object.__setattr__(self, "morphisms", dict(self.morphisms))
        object.__setattr__(self, "identity", dict(self.identity))
        object.__setattr__(self, "compose", dict(self.compose))

    def __hash__(self):
        return hash((self.objects, tuple(sorted(self.morphisms.items()))))

    def src(self, m):
        return self.morphisms[m][0]

    def dst(self, m):
        return self.morphisms[m][1]

    def hom(self, a, b) -> list:
        return [m for m, (s, t) in self.morphisms.items() if s == a and t == b]

    def is_identity(self, m) -> bool:
        return self.identity.get(self.src(m)) == m

    def non_identity(self) -> list:
        return [m for m in self.morphisms if not self.is_identity(m)]

    def composable_pairs(self):
        for g, (b, _) in self.morphisms.items():
            for f, (_, b2) in self.morphisms.items():
                if b == b2:
                    yield g, f

    @classmethod
    def free(cls, objects: Sequence, edges: Sequence[tuple]) -> "FiniteCategory":
        """Path category of an acyclic multigraph; ``edges`` are ``(id, src, dst)``.

        Composites are named by joining edge ids with ``.`` (outermost first).
        """
        objects = tuple(objects)
        out = {o: [] for o in objects}
        for e, s, t in edges:
            out[s].append((e, t))
        paths = {}  # id -> (src, dst, edge list innermost first)
        ident = {o: f"id_{o}" for o in objects}
        for o in objects:
            paths[ident[o]] = (o, o, ())

        def extend(start, cur, seq, depth):
            if depth > len(objects):
                raise MalformedCategory("acyclicity", "edge graph has a cycle")
            for e, t in out[cur]:
                s2 = seq + (e,)
                paths[".".join(reversed(s2))] = (start, t, s2)
                extend(start, t, s2, depth + 1)

        for o in objects:
            extend(o, o, (), 0)
        by_seq = {v[2]: k for k, v in paths.items() if v[2]}
        comp = {}
        for g, (b, c, sg) in paths.items():
            for f, (a, b2, sf) in paths.items():
                if b2 != b:
                    continue
                if not sf:
                    comp[(g, f)] = g
                elif not sg:
                    comp[(g, f)] = f
                else:
                    comp[(g, f)] = by_seq[sf + sg]
        return cls(objects, {k: (v[0], v[1]) for k, v in paths.items()}, ident, comp)

    @classmethod
    def discrete(cls, objects: Sequence) -> "FiniteCategory":
        return cls.free(objects, [])


def validate_category(cat: FiniteCategory) -> bool:
    """Check identities, closure of composition and associativity by exhaustion.

    Raises :class:`MalformedCategory` naming the first violated law.
    """
    for o in cat.objects:
        i = cat.identity.get(o)
        if i is None or i not in cat.morphisms:
            raise MalformedCategory("identity", f"missing identity for {o!r}")
        if cat.morphisms[i] != (o, o):
            raise MalformedCategory("identity", f"{i} is not an endomorphism of {o!r}")
    for m, (s, t) in cat.morphisms.items():
        if s not in cat.objects or t not in cat.objects:
            raise MalformedCategory("objects", f"{m} has unknown endpoint")
    for g, f in cat.composable_pairs():
        h = cat.compose.get((g, f))
        if h is None:
            raise MalformedCategory("closure", f"missing composite {g}∘{f}")
        if h not in cat.morphisms or cat.morphisms[h] != (cat.src(f), cat.dst(g)):
            raise MalformedCategory("closure", f"{g}∘{f} = {h} has wrong endpoints")
    for (g, f), h in cat.compose.items():
        if g not in cat.morphisms or f not in cat.morphisms or cat.src(g) != cat.dst(f):
            raise MalformedCategory("closure", f"table entry for non-composable pair {g}, {f}")
    for f, (a, b) in cat.morphisms.items():
        if cat.compose[(cat.identity[b], f)] != f:
            raise MalformedCategory("left identity", f)
        if cat.compose[(f, cat.identity[a])] != f:
            raise MalformedCategory("right identity", f)
    for h, g in cat.composable_pairs():
        for g2, f in cat.composable_pairs():
            if g2 != g:
                continue
            left = cat.compose[(cat.compose[(h, g)], f)]
            right = cat.compose[(h, cat.compose[(g, f)])]
            if left != right:
                raise MalformedCategory("associativity", (h, g, f))
    return True


@dataclass(frozen=True)
class PolytopeMap:
    """Affine map between polytope spaces."""

    source: Polytope
    target: Polytope
    affine: AffineMap

    def __post_init__(self):
        if self.affine.source_dim != self.source.ambient_dim or self.affine.target_dim != self.target.ambient_dim:
            raise DimensionMismatch("affine map does not match polytope dimensions")

    def check_into(self) -> bool:
        return all(self.target.contains(self.affine(v)) for v in self.source.vertices)

    @classmethod
    def identity(cls, P: Polytope) -> "PolytopeMap":
        return cls(P, P, AffineMap.identity(P.ambient_dim))

    def __call__(self, x):
        return self.affine(x)

    def compose(self, inner: "PolytopeMap") -> "PolytopeMap":
        return PolytopeMap(inner.source, self.target, self.affine.compose(inner.affine))


def space_kind(space) -> str:
    if isinstance(space, FiniteSpace):
        return "finite"
    if isinstance(space, Polytope):
        return "polytope"
    return getattr(space, "kind", "other")


def _test_points(space):
    if isinstance(space, Polytope):
        return space.vertices
    return space.test_points()


@dataclass(eq=False)
class Diagram:
    """A functor from a finite category into finite spaces, polytopes or hyperspaces.

    Maps must be callables with ``source``/``target`` attributes; finite
    objects carry :class:`TableMap`, polytopes :class:`PolytopeMap`.
    """

    shape: FiniteCategory
    spaces: Mapping[Any, Any]
    maps: Mapping[str, Any]
    _limit: Any = field(default=None, repr=False)

    def __post_init__(self):
        self.spaces = dict(self.spaces)
        maps = dict(self.maps)
        for o, i in self.shape.identity.items():
            if i not in maps:
                maps[i] = identity_map(self.spaces[o])
        self.maps = maps

    @property
    def objects(self):
        return self.shape.objects

    @property
    def kind(self) -> str:
        kinds = {space_kind(s) for s in self.spaces.values()}
        return kinds.pop() if len(kinds) == 1 else "mixed"

    def validate(self) -> bool:
        validate_category(self.shape)
        for m, (a, b) in self.shape.morphisms.items():
            f = self.maps.get(m)
            if f is None:
                raise MalformedDiagram(f"no map for morphism {m}")
            if f.source != self.spaces[a] or f.target != self.spaces[b]:
                raise MalformedDiagram(f"map {m} has wrong source/target")
            if isinstance(f, PolytopeMap) and not f.check_into():
                raise MalformedDiagram(f"affine map {m} leaves its target polytope")
        for o, i in self.shape.identity.items():
            f = self.maps[i]
            for p in _test_points(self.spaces[o]):
                if f(p) != p:
                    raise MalformedDiagram(f"identity {i} moves {p!r}")
        for (g, f), h in self.shape.compose.items():
            mg, mf, mh = self.maps[g], self.maps[f], self.maps[h]
            for p in _test_points(self.spaces[self.shape.src(f)]):
                if mh(p) != mg(mf(p)):
                    raise MalformedDiagram(f"functoriality fails: {h} != {g}∘{f} at {p!r}")
        return True

    def is_compatible(self, values: Mapping) -> bool:
        """Whether a per-object tuple commutes with every diagram map."""
        for m in self.shape.non_identity():
            a, b = self.shape.morphisms[m]
            if self.maps[m](values[a]) != values[b]:
                return False
        return True

    def limit(self) -> "LimitSpace":
        if self._limit is None:
            self._limit = compute_limit(self)
        return self._limit

    def is_product_shape(self) -> bool:
        """Every non-identity map lands in a one-point space (so the limit is a product)."""
        for m in self.shape.non_identity():
            t = self.spaces[self.shape.dst(m)]
            if isinstance(t, FiniteSpace):
                if len(t) != 1:
                    return False
            elif isinstance(t, Polytope):
                if len(t.vertices) != 1:
                    return False
            else:
                base = getattr(t, "base", None)
                if base is None or len(base.vertices) != 1:
                    return False
        return True


def identity_map(space):
    if isinstance(space, FiniteSpace):
        return TableMap.identity(space)
    if isinstance(space, Polytope):
        return PolytopeMap.identity(space)
    return space.identity_map()


@dataclass(frozen=True)
class Cone:
    apex: Any
    legs: Mapping[Any, Any]

    def validate(self, d: Diagram) -> bool:
        for o in d.objects:
            leg = self.legs.get(o)
            if leg is None:
                raise NotACone(f"no leg to {o!r}")
        pts = _test_points(self.apex)
        for m in d.shape.non_identity():
            a, b = d.shape.morphisms[m]
            for x in pts:
                if d.maps[m](self.legs[a](x)) != self.legs[b](x):
                    raise NotACone(f"legs disagree along {m} at {x!r}")
        return True


@dataclass
class LimitSpace:
    """Limit of a diagram.

    ``space`` is the carrier: a :class:`FiniteSpace` of compatible tuples, or a
    :class:`Polytope` in product coordinates (object blocks in object order)
    with ``hrep`` the defining constraint system.
    """

    diagram: Diagram
    space: Any
    projections: dict
    hrep: HPolytope | None = None
    offsets: dict | None = None

    @property
    def carrier(self):
        if isinstance(self.space, FiniteSpace):
            return list(self.space.points)
        return self.space

    @property
    def cone(self) -> Cone:
        return Cone(self.space, self.projections)

    def split(self, x) -> tuple:
        """Per-object components of a carrier element."""
        if self.offsets is None:
            return tuple(x)
        return tuple(tuple(x[self.offsets[o]: self.offsets[o] + self.diagram.spaces[o].ambient_dim])
                     for o in self.diagram.objects)

    def join(self, parts: Sequence) -> tuple:
        if self.offsets is None:
            return tuple(parts)
        out = ()
        for p in parts:
            out += tuple(p)
        return out


def _finite_limit(d: Diagram) -> LimitSpace:
    objs = list(d.objects)
    pos = {o: i for i, o in enumerate(objs)}
    checks = {i: [] for i in range(len(objs))}
    for m in d.shape.non_identity():
        a, b = d.shape.morphisms[m]
        checks[max(pos[a], pos[b])].append((pos[a], pos[b], d.maps[m].table))
    sizes = [len(d.spaces[o]) for o in objs]
    carrier = []
    cur = [0] * len(objs)

    def rec(k):
        if k == len(objs):
            carrier.append(tuple(cur))
            return
        for v in range(sizes[k]):
            cur[k] = v
            if all(t[cur[i]] == cur[j] for i, j, t in checks[k]):
                rec(k + 1)

    rec(0)
    if not carrier:
        raise EmptyLimit("no compatible tuple")
    pts = tuple(tuple(d.spaces[o].points[i] for o, i in zip(objs, t)) for t in carrier)
    space = FiniteSpace(pts, "lim")
    proj = {o: TableMap(space, d.spaces[o], tuple(t[k] for t in carrier)) for k, o in enumerate(objs)}
    return LimitSpace(d, space, proj)


def _polytope_limit(d: Diagram) -> LimitSpace:
    objs = list(d.objects)
    offsets = {}
    total = 0
    for o in objs:
        offsets[o] = total
        total += d.spaces[o].ambient_dim
    H = HPolytope(total)
    for o in objs:
        H = H.intersect(d.spaces[o].as_hpolytope().embed(total, offsets[o]))
    eqs = []
    for m in d.shape.non_identity():
        a, b = d.shape.morphisms[m]
        f = d.maps[m].affine
        for r, (row, off) in enumerate(zip(f.matrix, f.offset)):
            a_vec = [Fraction(0)] * total
            for j, v in enumerate(row):
                a_vec[offsets[a] + j] += v
            a_vec[offsets[b] + r] -= 1
            eqs.append((tuple(a_vec), -off))
    H = H.intersect(HPolytope(total, eqs))
    P = H.to_polytope()
    if P is None:
        raise EmptyLimit("limit polytope is empty")
    proj = {}
    for o in objs:
        k = d.spaces[o].ambient_dim
        proj[o] = PolytopeMap(P, d.spaces[o], AffineMap.coordinates(total, range(offsets[o], offsets[o] + k)))
    return LimitSpace(d, P, proj, hrep=H, offsets=offsets)


def compute_limit(d: Diagram) -> LimitSpace:
    """Limit of a finite or polytope diagram as its compatible-tuple carrier.

    Finite diagrams are solved by backtracking over the product in object
    order, so the carrier is lexicographic in index order. Polytope diagrams
    produce the H-representation in product coordinates and its vertices.
    """
    kind = d.kind
    if kind == "finite":
        return _finite_limit(d)
    if kind == "polytope":
        return _polytope_limit(d)
    raise TypeError(f"limits of {kind} diagrams are only available implicitly (via is_compatible)")


def brute_force_limit(d: Diagram) -> list:
    """Independent oracle: filter the full product by every morphism."""
    objs = list(d.objects)
    out = []
    for combo in product(*(d.spaces[o].points for o in objs)):
        vals = dict(zip(objs, combo))
        ok = True
        for m, (a, b) in d.shape.morphisms.items():
            if d.maps[m](vals[a]) != vals[b]:
                ok = False
                break
        if ok:
            out.append(tuple(combo))
    return out


def characteristic_point(cone: Cone, x, d: Diagram) -> tuple:
    """The tuple ``(leg_A(x))_A``: the image of ``x`` under the characteristic map."""
    cone.validate(d)
    return tuple(cone.legs[o](x) for o in d.objects)


def free_diagram(spaces: Mapping, edges: Mapping[str, tuple]) -> Diagram:
    """Diagram on the path category of an acyclic graph.

    ``edges`` maps an edge id to ``(src, dst, map)``; composite morphisms get
    the composed maps, so functoriality holds by construction.
    """
    objects = tuple(spaces)
    shape = FiniteCategory.free(objects, [(e, s, t) for e, (s, t, _) in edges.items()])
    maps = {e: f for e, (_, _, f) in edges.items()}
    for m in sorted(shape.morphisms, key=lambda k: k.count(".")):
        if m in maps or shape.is_identity(m):
            continue
        parts = m.split(".")
        f = maps[parts[-1]]
        for e in reversed(parts[:-1]):
            f = maps[e].compose(f)
        maps[m] = f
    return Diagram(shape, spaces, maps)
