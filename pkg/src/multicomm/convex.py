"""Convex hyperspace functors: cc, G_cc and lambda_cc over rational polytopes.

Families of convex sets are stored by minimal generators (an antichain under
inclusion); the family is the up-closure of its generators inside cc(X).
Maps between polytope spaces are affine, so images of convex sets are convex
and computed exactly from vertices.
"""
from __future__ import annotations

import random
from dataclasses import dataclass, field
from fractions import Fraction
from itertools import product
from typing import Any, Iterable, Sequence

from .category import Diagram, PolytopeMap
from .prob import CompatibleTuple
from .spaces import (
    AffineMap,
    DimensionMismatch,
    HPolytope,
    Infeasible,
    Polytope,
    affine_image,
    conv_hull,
    hausdorff_distance,
    max_norm,
    nearest_point,
    solve_lp,
)

__all__ = [
    "NotInLimit",
    "LiftFailed",
    "EmptyWitness",
    "WitnessProjectionMismatch",
    "ConvexFamily",
    "PointFamily",
    "HyperSpace",
    "InducedMap",
    "OpenBox",
    "OpenPolytope",
    "VietorisBasicSet",
    "Lemma1Verdict",
    "LiftResult",
    "ProbeReport",
    "cc_map",
    "cc_action",
    "G_cc_action",
    "lemma1_check",
    "chi_cc",
    "chi_G_cc",
    "pullback_region",
    "preimage_hrep",
    "cone_region",
    "cone_lift",
    "open_lift_cc",
    "open_lift_G_cc",
    "surjectivity_witness_cc",
    "r_cc",
    "vietoris_member",
    "r_cc_continuity_probe",
    "G_cc_map",
    "d_c_witness",
    "linked_check",
    "family_distance",
    "random_point",
    "random_subpolytope",
    "grid_pool",
    "polytope_square",
    "perturb_polytope",
    "sample_cc_target",
]


class NotInLimit(ValueError):
    pass


class LiftFailed(RuntimeError):
    def __init__(self, msg, witness=None):
        super().__init__(msg)
        self.witness = witness


class EmptyWitness(ValueError):
    pass


class WitnessProjectionMismatch(ValueError):
    def __init__(self, msg, witness=None, projections=None, target=None):
        super().__init__(msg)
        self.witness = witness
        self.projections = projections
        self.target = target


def _as_affine(f) -> AffineMap:
    return f.affine if isinstance(f, PolytopeMap) else f


# ---------------------------------------------------------------- families


def _minimal_polytopes(gens: Iterable[Polytope]) -> tuple:
    gs = sorted(set(gens))
    keep = []
    for g in gs:
        # sorted by vertex count first; a strict subset may still have more vertices
        if any(k.issubset(g) for k in keep):
            continue
        keep = [k for k in keep if not g.issubset(k)]
        keep.append(g)
    return tuple(sorted(keep))


class ConvexFamily:
    """Up-closed family of closed convex subsets of ``ambient``, by minimal generators."""

    def __init__(self, generators: Iterable[Polytope], ambient: Polytope | None = None):
        gens = list(generators)
        if not gens:
            raise ValueError("families must be nonempty")
        d = gens[0].ambient_dim
        if any(g.ambient_dim != d for g in gens):
            raise DimensionMismatch("generators in different dimensions")
        if ambient is not None and not all(g.issubset(ambient) for g in gens):
            raise ValueError("generator is not inside the ambient polytope")
        self.generators = _minimal_polytopes(gens)
        self.ambient = ambient
        self._linked = None

    @classmethod
    def principal(cls, C: Polytope, ambient: Polytope | None = None) -> "ConvexFamily":
        return cls([C], ambient)

    def __eq__(self, other):
        return isinstance(other, ConvexFamily) and self.generators == other.generators

    def __hash__(self):
        return hash(self.generators)

    def __repr__(self):
        return f"ConvexFamily({list(self.generators)!r})"

    def contains(self, C: Polytope) -> bool:
        """Membership of a convex set in the up-closure."""
        return any(g.issubset(C) for g in self.generators)

    @property
    def is_linked(self) -> bool:
        if self._linked is None:
            gs = self.generators
            self._linked = all(a.intersects(b) for i, a in enumerate(gs) for b in gs[i + 1:])
        return self._linked

    def to_json(self):
        return [g.to_json() for g in self.generators]


class PointFamily:
    """Up-closed family in exp(X) generated by finitely many finite point sets."""

    def __init__(self, generators: Iterable[Iterable[Sequence]]):
        gens = {frozenset(tuple(Fraction(c) for c in p) for p in g) for g in generators}
        if not gens or any(not g for g in gens):
            raise ValueError("families need nonempty generators")
        ordered = sorted(gens, key=lambda g: (len(g), sorted(g)))
        keep = []
        for g in ordered:
            if not any(k <= g for k in keep):
                keep.append(g)
        self.generators = tuple(keep)

    def __eq__(self, other):
        return isinstance(other, PointFamily) and set(self.generators) == set(other.generators)

    def __hash__(self):
        return hash(frozenset(self.generators))

    @property
    def is_linked(self) -> bool:
        gs = self.generators
        return all(a & b for i, a in enumerate(gs) for b in gs[i:])


# ---------------------------------------------------------------- hyperspaces as diagram objects


_FUNCTORS = ("cc", "G_cc", "lambda_cc")


@dataclass(frozen=True)
class HyperSpace:
    """cc(X), G_cc(X) or lambda_cc(X) of a polytope ``X``, as a diagram object."""

    functor: str
    base: Polytope
    kind: str = field(default="hyper", init=False, compare=False)

    def __post_init__(self):
        if self.functor not in _FUNCTORS:
            raise ValueError(f"unknown convex functor {self.functor!r}")

    def contains(self, point) -> bool:
        if self.functor == "cc":
            return isinstance(point, Polytope) and point.issubset(self.base)
        if not isinstance(point, ConvexFamily):
            return False
        if not all(g.issubset(self.base) for g in point.generators):
            return False
        return self.functor == "G_cc" or point.is_linked

    def test_points(self):
        singletons = [Polytope.point(v) for v in self.base.vertices]
        if self.functor == "cc":
            return singletons + [self.base]
        fams = [ConvexFamily.principal(s) for s in singletons]
        if self.functor == "G_cc":
            fams.append(ConvexFamily.principal(self.base))
            if len(singletons) > 1:
                fams.append(ConvexFamily(singletons[:2]))
        return fams

    def identity_map(self):
        return InducedMap(self.functor, PolytopeMap.identity(self.base))


@dataclass(frozen=True)
class InducedMap:
    """The action of a convex functor on an affine map."""

    functor: str
    base_map: PolytopeMap

    @property
    def source(self):
        return HyperSpace(self.functor, self.base_map.source)

    @property
    def target(self):
        return HyperSpace(self.functor, self.base_map.target)

    def __call__(self, point):
        if self.functor == "cc":
            return cc_map(self.base_map)(point)
        return G_cc_map(self.base_map)(point)


# ---------------------------------------------------------------- cc


def cc_map(f):
    """Image of a convex set under an affine map."""
    aff = _as_affine(f)

    def act(C: Polytope) -> Polytope:
        return affine_image(C, aff)

    return act


def cc_action(f, C):
    return cc_map(f)(C)


def G_cc_map(f):
    """Family generated by the affine images of the generators (images are convex)."""
    aff = _as_affine(f)
    target = f.target if isinstance(f, PolytopeMap) else None

    def act(F: ConvexFamily) -> ConvexFamily:
        return ConvexFamily((affine_image(g, aff) for g in F.generators), target)

    return act


def G_cc_action(f, F):
    return G_cc_map(f)(F)


@dataclass(frozen=True)
class Lemma1Verdict:
    projection_inside: bool   # pi(B) ⊆ C
    hull_projection_inside: bool   # pi(conv B) ⊆ C
    covers: bool   # C ⊆ conv(pi(B)): the finite-set form of pi(B) ⊇ C
    equality: bool | None   # pi(conv B) == C, checked when covers holds
    violated: bool


def lemma1_check(B: Sequence[Sequence], C: Polytope, proj) -> Lemma1Verdict:
    """Evaluate both implications of the projection-of-hull lemma on one instance.

    ``proj`` is a list of coordinate indices (the first-factor block) or an
    affine map. A violation means the exact arithmetic contradicts the lemma,
    which must never happen; callers treat it as fatal.
    """
    B = [tuple(Fraction(c) for c in b) for b in B]
    if not isinstance(proj, AffineMap):
        proj = AffineMap.coordinates(len(B[0]), list(proj))
    pB = [proj(b) for b in B]
    inside = all(C.contains(p) for p in pB)
    hull_proj = affine_image(conv_hull(B), proj)
    hull_inside = hull_proj.issubset(C)
    covers = C.issubset(conv_hull(pB))
    equality = (hull_proj == C) if covers else None
    violated = (inside and not hull_inside) or (inside and covers and not equality)
    return Lemma1Verdict(inside, hull_inside, covers, equality, violated)


def _limit_polytope(d: Diagram):
    lim = d.limit()
    if not isinstance(lim.space, Polytope):
        raise TypeError("convex functors need a polytope diagram")
    return lim


def chi_cc(C: Polytope, d: Diagram) -> CompatibleTuple:
    """Projections of a convex subset of the limit onto every object."""
    lim = _limit_polytope(d)
    if not C.issubset(lim.space):
        raise NotInLimit("convex set is not inside the limit polytope")
    return CompatibleTuple(d, tuple(cc_map(lim.projections[o])(C) for o in d.objects), cc_action)


def chi_G_cc(F: ConvexFamily, d: Diagram) -> CompatibleTuple:
    lim = _limit_polytope(d)
    for g in F.generators:
        if not g.issubset(lim.space):
            raise NotInLimit("family generator is not inside the limit polytope")
    return CompatibleTuple(d, tuple(G_cc_map(lim.projections[o])(F) for o in d.objects), G_cc_action)


def preimage_hrep(C: Polytope, f: AffineMap) -> HPolytope:
    """``{x : f(x) in C}`` as an H-polytope in the source coordinates of ``f``."""
    eqs, ineqs = C.hrep

    def pull(a, b):
        row = tuple(sum(a[r] * f.matrix[r][j] for r in range(len(a))) for j in range(f.source_dim))
        return row, b - sum(ai * oi for ai, oi in zip(a, f.offset))

    return HPolytope(f.source_dim, [pull(a, b) for a, b in eqs], [pull(a, b) for a, b in ineqs])


def cone_region(apex: HPolytope, legs: Sequence[AffineMap], targets: Sequence[Polytope]) -> HPolytope:
    """Points of the apex whose every leg lands in the matching target."""
    H = apex
    for f, C in zip(legs, targets):
        H = H.intersect(preimage_hrep(C, f))
    return H


def pullback_region(d: Diagram, targets: Sequence[Polytope]) -> HPolytope:
    """``{x in lim D : x_A in C_A for every A}`` as an H-polytope."""
    lim = _limit_polytope(d)
    return cone_region(lim.hrep, [lim.projections[o].affine for o in d.objects], targets)


@dataclass(frozen=True)
class LiftResult:
    polytope: Polytope
    distance: Fraction
    points: tuple


def _closest_point_over(R: HPolytope, B: Polytope, leg: AffineMap, value) -> tuple:
    """Point x of R with leg(x) = value, nearest to B in max-norm."""
    n = R.dim
    m = len(B.vertices)
    nv = n + m + 1
    t = n + m
    Ae, be, Au, bu = [], [], [], []
    for a, b in R.equalities:
        Ae.append(list(a) + [0] * (m + 1))
        be.append(b)
    for a, b in R.inequalities:
        Au.append(list(a) + [0] * (m + 1))
        bu.append(b)
    for row_, off, v in zip(leg.matrix, leg.offset, value):
        Ae.append(list(row_) + [0] * (m + 1))
        be.append(v - off)
    Ae.append([0] * n + [1] * m + [0])
    be.append(1)
    for j in range(n):
        row = [0] * nv
        row[j] = 1
        for i, w in enumerate(B.vertices):
            row[n + i] = -w[j]
        row[t] = -1
        Au.append(row)
        bu.append(0)
        row = [-c for c in row]
        row[t] = -1
        Au.append(row)
        bu.append(0)
    cost = [0] * nv
    cost[t] = 1
    res = solve_lp(cost, Ae, be, Au, bu, free=range(n), nvars=nv)
    return res.x[:n]


def cone_lift(B: Polytope, apex: HPolytope, legs: Sequence[AffineMap], targets: Sequence[Polytope],
              names: Sequence | None = None) -> LiftResult:
    """A convex set near ``B`` in the apex whose leg images are exactly ``targets``.

    ``B``'s vertices move to their nearest points in the region where every
    leg lands in its target; then, for every target vertex not yet hit, a
    region point over that vertex (as close to ``B`` as possible) is added.
    All points map into the convex targets and every target vertex is hit,
    so the hull maps onto each target exactly.
    """
    names = list(names) if names is not None else list(range(len(legs)))
    R = cone_region(apex, legs, targets)
    if R.is_empty():
        raise LiftFailed("targets admit no common point in the apex", witness=list(targets))
    pts = []
    for v in B.vertices:
        x, _ = nearest_point(R, v)
        pts.append(x)
    for name, f, C in zip(names, legs, targets):
        hit = {f(p) for p in pts}
        for c in C.vertices:
            if c in hit:
                continue
            try:
                x = _closest_point_over(R, B, f, c)
            except Infeasible:
                raise LiftFailed(f"no apex point over vertex {c} of the {name!r} target",
                                 witness=(name, c)) from None
            pts.append(x)
            hit.add(c)
    D = conv_hull(pts)
    got = tuple(affine_image(D, f) for f in legs)
    if got != tuple(targets):
        raise LiftFailed("hull images differ from targets", witness=got)
    return LiftResult(D, hausdorff_distance(D, B), tuple(pts))


def open_lift_cc(B: Polytope, target: CompatibleTuple, d: Diagram) -> LiftResult:
    """A convex subset of the limit near ``B`` whose projections are exactly ``target``.

    This is :func:`cone_lift` for the limit cone; the result is re-checked
    through :func:`chi_cc`.
    """
    lim = _limit_polytope(d)
    if not B.issubset(lim.space):
        raise NotInLimit("base set is not inside the limit polytope")
    res = cone_lift(B, lim.hrep, [lim.projections[o].affine for o in d.objects],
                    list(target.values), d.objects)
    if chi_cc(res.polytope, d).values != tuple(target.values):
        raise LiftFailed("hull projections differ from targets")
    return res


def surjectivity_witness_cc(target: CompatibleTuple, d: Diagram) -> Polytope:
    """The pullback polytope of the targets, checked to project back onto them."""
    R = pullback_region(d, list(target.values))
    W = R.to_polytope()
    if W is None:
        raise EmptyWitness("pullback of the targets is empty")
    got = chi_cc(W, d).values
    if got != tuple(target.values):
        raise WitnessProjectionMismatch("pullback projects strictly inside the targets",
                                        witness=W, projections=got, target=tuple(target.values))
    return W


def family_distance(F: ConvexFamily, G: ConvexFamily) -> Fraction:
    """Hausdorff distance between generator sets, each generator metrized by Hausdorff."""
    def one(X, Y):
        return max(min(hausdorff_distance(a, b) for b in Y) for a in X)
    return max(one(F.generators, G.generators), one(G.generators, F.generators))


def open_lift_G_cc(base: ConvexFamily, paired_targets: Sequence[CompatibleTuple], d: Diagram):
    """Lift a family whose target generators come paired with base generators.

    Each base generator is lifted with :func:`open_lift_cc` (a finite point set
    followed by its hull, i.e. a lift in exp composed with r_cc); the lifted
    family's characteristic image then equals the target families.
    Returns ``(family, distance, target_families)``.
    """
    if len(paired_targets) != len(base.generators):
        raise ValueError("one target tuple per base generator is required")
    lifts = [open_lift_cc(g, t, d).polytope for g, t in zip(base.generators, paired_targets)]
    lim = _limit_polytope(d)
    fam = ConvexFamily(lifts, lim.space)
    tfams = tuple(ConvexFamily([t.values[i] for t in paired_targets], d.spaces[o])
                  for i, o in enumerate(d.objects))
    got = chi_G_cc(fam, d).values
    if got != tfams:
        raise LiftFailed("lifted family does not map onto the targets", witness=got)
    return fam, family_distance(fam, base), tfams


# ---------------------------------------------------------------- r_cc and Vietoris sets


def _hull_of(g) -> Polytope:
    return g if isinstance(g, Polytope) else conv_hull(g)


def r_cc(F, ambient: Polytope | None = None) -> ConvexFamily:
    """Family generated by the convex hulls of the generators of ``F``."""
    gens = F.generators if hasattr(F, "generators") else F
    if ambient is None:
        ambient = getattr(F, "ambient", None)
    return ConvexFamily((_hull_of(g) for g in gens), ambient)


@dataclass(frozen=True)
class OpenBox:
    lo: tuple
    hi: tuple

    def __post_init__(self):
        object.__setattr__(self, "lo", tuple(Fraction(v) for v in self.lo))
        object.__setattr__(self, "hi", tuple(Fraction(v) for v in self.hi))
        if any(a >= b for a, b in zip(self.lo, self.hi)):
            raise ValueError("open box must have positive width in every coordinate")

    def strict_constraints(self):
        d = len(self.lo)
        out = []
        for j in range(d):
            e = tuple(Fraction(int(i == j)) for i in range(d))
            out.append((e, self.hi[j]))
            out.append((tuple(-v for v in e), -self.lo[j]))
        return out


@dataclass(frozen=True)
class OpenPolytope:
    """Interior ``{x : a x < b}`` of a polytope given by its facet inequalities."""

    inequalities: tuple

    def strict_constraints(self):
        return [(tuple(Fraction(v) for v in a), Fraction(b)) for a, b in self.inequalities]

    @classmethod
    def interior_of(cls, P: Polytope) -> "OpenPolytope":
        eqs, ineqs = P.hrep
        if eqs:
            raise ValueError("polytope has empty interior")
        return cls(ineqs)


def _strictly_inside(x, cons) -> bool:
    return all(sum(a_ * x_ for a_, x_ in zip(a, x)) < b for a, b in cons)


def _meets_open(P: Polytope, cons) -> bool:
    """Whether a polytope meets an open set: maximize the slack of the strict constraints."""
    if any(_strictly_inside(v, cons) for v in P.vertices):
        return True
    m = len(P.vertices)
    nv = m + 1
    Au, bu = [], []
    for a, b in cons:
        row = [sum(a_ * v_ for a_, v_ in zip(a, v)) for v in P.vertices] + [1]
        Au.append(row)
        bu.append(b)
    Au.append([0] * m + [1])
    bu.append(1)
    try:
        res = solve_lp([0] * m + [-1], [[1] * m + [0]], [1], Au, bu, free=[m], nvars=nv)
    except Infeasible:
        return False
    return -res.value > 0


@dataclass(frozen=True)
class VietorisBasicSet:
    U: Any   # OpenBox or OpenPolytope
    sign: str   # "+" or "-"

    def __post_init__(self):
        if self.sign not in ("+", "-"):
            raise ValueError("sign must be '+' or '-'")


def _gen_inside(g, cons) -> bool:
    pts = g.vertices if isinstance(g, Polytope) else g
    return all(_strictly_inside(p, cons) for p in pts)


def _gen_meets(g, cons) -> bool:
    if isinstance(g, Polytope):
        return _meets_open(g, cons)
    return any(_strictly_inside(p, cons) for p in g)


def vietoris_member(F, V: VietorisBasicSet) -> bool:
    """Decide ``F in U+`` or ``F in U-`` from the generators alone.

    U+ holds iff some generator lies in U (supersets only grow); U- holds iff
    every generator meets U (supersets inherit meeting).
    """
    cons = V.U.strict_constraints()
    if V.sign == "+":
        return any(_gen_inside(g, cons) for g in F.generators)
    return all(_gen_meets(g, cons) for g in F.generators)


@dataclass
class ProbeReport:
    sign: str
    eps: Fraction
    samples: int
    in_neighborhood: int
    passed: int
    violations: list
    neighborhood: Any

    @property
    def ok(self) -> bool:
        return not self.violations and self.passed == self.in_neighborhood


def _convex_refinement(F0, U) -> OpenBox:
    """An open box inside U around the hull of a generator that U contains."""
    cons = U.strict_constraints()
    for g in F0.generators:
        H = _hull_of(g)
        if not _gen_inside(H, cons):
            continue
        lo, hi = H.bounding_box()
        margin = None
        for a, b in cons:
            worst = max(sum(a_ * v_ for a_, v_ in zip(a, v)) for v in Polytope.box(lo, hi).vertices)
            slack = b - worst
            norm = sum(abs(c) for c in a)
            if slack <= 0:
                margin = None
                break
            cand = slack / (2 * norm) if norm else slack
            margin = cand if margin is None else min(margin, cand)
        if margin is None:
            continue
        box = OpenBox(tuple(v - margin for v in lo), tuple(v + margin for v in hi))
        corners = Polytope.box(box.lo, box.hi).vertices
        if all(sum(a_ * c_ for a_, c_ in zip(a, c)) < b for a, b in cons for c in corners):
            return box
    raise ValueError("no generator hull lies inside U")


def _perturb_point(p, eps, rng, ambient):
    den = 97
    q = tuple(c + eps * Fraction(rng.randint(-den, den), den) for c in p)
    if ambient is not None and not ambient.contains(q):
        lo, hi = ambient.bounding_box()
        q = tuple(min(max(c, a), b) for c, a, b in zip(q, lo, hi))
        if not ambient.contains(q):
            q, _ = nearest_point(ambient, q)
    return q


def r_cc_continuity_probe(F0, V: VietorisBasicSet, samples: int, seed, eps=Fraction(1, 100),
                          ambient: Polytope | None = None) -> ProbeReport:
    """Sample families near ``F0`` and check the continuity implication for r_cc.

    For U- the neighborhood is U- itself. For U+ a convex open box inside U is
    built around a generator hull that U contains, and the neighborhood is
    that box's plus-set; membership there forces the hull into U.
    """
    eps = Fraction(eps)
    if not vietoris_member(r_cc(F0), V):
        raise ValueError("r_cc(F0) is not in the basic set")
    if V.sign == "-":
        nbhd = V
    else:
        nbhd = VietorisBasicSet(_convex_refinement(F0, V.U), "+")
    gens = [sorted(g) if not isinstance(g, Polytope) else list(g.vertices) for g in F0.generators]
    inside = passed = 0
    violations = []
    for i in range(samples):
        rng = random.Random(f"{seed}:{i}")
        F = PointFamily([[_perturb_point(p, eps, rng, ambient) for p in g] for g in gens])
        if not vietoris_member(F, nbhd):
            continue
        inside += 1
        if vietoris_member(r_cc(F), V):
            passed += 1
        else:
            violations.append(F)
    return ProbeReport(V.sign, eps, samples, inside, passed, violations, nbhd.U)


# ---------------------------------------------------------------- D_C and linkedness


def d_c_witness(target: CompatibleTuple, d: Diagram) -> ConvexFamily:
    """Family generated by pullbacks of every choice of target generators.

    The result is checked: its characteristic image must equal the target,
    otherwise :class:`WitnessProjectionMismatch` is raised with the evidence.
    """
    lim = _limit_polytope(d)
    fams = list(target.values)
    gens = []
    for choice in product(*(F.generators for F in fams)):
        W = pullback_region(d, list(choice)).to_polytope()
        if W is not None:
            gens.append(W)
    if not gens:
        raise EmptyWitness("every choice of target generators has an empty pullback")
    W = ConvexFamily(gens, lim.space)
    got = chi_G_cc(W, d).values
    if got != tuple(fams):
        raise WitnessProjectionMismatch("witness family maps strictly inside the targets",
                                        witness=W, projections=got, target=tuple(fams))
    return W


@dataclass(frozen=True)
class LinkedVerdict:
    linked: bool
    maximal_within_pool: bool | None


def linked_check(F: ConvexFamily, pool: Sequence[Polytope] | None = None) -> LinkedVerdict:
    """Pairwise-intersection test, plus maximality relative to a finite candidate pool.

    A linked family is maximal within the pool when every pool member meeting
    all generators already belongs to the family.
    """
    linked = F.is_linked
    if pool is None or not linked:
        return LinkedVerdict(linked, None if pool is None else False)
    for P in pool:
        if F.contains(P):
            continue
        if all(P.intersects(g) for g in F.generators):
            return LinkedVerdict(True, False)
    return LinkedVerdict(True, True)


# ---------------------------------------------------------------- sampling helpers


def random_point(P: Polytope, rng: random.Random, denom: int = 8) -> tuple:
    """A random rational convex combination of the vertices of ``P``."""
    w = [rng.randint(0, denom) for _ in P.vertices]
    if not sum(w):
        w[rng.randrange(len(w))] = 1
    s = sum(w)
    return tuple(sum(Fraction(wi, s) * v[j] for wi, v in zip(w, P.vertices)) for j in range(P.ambient_dim))


def random_subpolytope(P: Polytope, rng: random.Random, k: int | None = None, denom: int = 8) -> Polytope:
    if k is None:
        k = rng.randint(1, 4)
    return conv_hull([random_point(P, rng, denom) for _ in range(k)])


def grid_pool(P: Polytope, step: Fraction, max_points: int = 2) -> list[Polytope]:
    """Sub-polytopes of ``P`` spanned by up to ``max_points`` points of a rational grid."""
    lo, hi = P.bounding_box()
    axes = []
    for a, b in zip(lo, hi):
        vals = []
        v = a
        while v <= b:
            vals.append(v)
            v += step
        axes.append(vals)
    pts = [p for p in product(*axes) if P.contains(p)]
    out = {Polytope.point(p) for p in pts}
    if max_points >= 2:
        for i, p in enumerate(pts):
            for q in pts[i + 1:]:
                out.add(conv_hull([p, q]))
    return sorted(out)


def polytope_square(X: Polytope, Y: Polytope) -> Diagram:
    """The cospan ``X -> {0} <- Y`` of polytopes; its limit is ``X × Y``."""
    from .category import FiniteCategory

    star = Polytope.point((0,))
    shape = FiniteCategory.free(("X", "Y", "*"), [("p", "X", "*"), ("q", "Y", "*")])
    maps = {"p": PolytopeMap(X, star, AffineMap.constant(X.ambient_dim, (0,))),
            "q": PolytopeMap(Y, star, AffineMap.constant(Y.ambient_dim, (0,)))}
    return Diagram(shape, {"X": X, "Y": Y, "*": star}, maps)


def perturb_polytope(C: Polytope, P: Polytope, eps, rng: random.Random) -> Polytope:
    """Hull of the vertices of C, each moved at most ``eps`` (max-norm) towards a random point of P.

    Stays inside P when C does, and is within Hausdorff distance ``eps`` of C.
    """
    eps = Fraction(eps)
    pts = []
    for v in C.vertices:
        r = random_point(P, rng)
        gap = max_norm(tuple(a - b for a, b in zip(r, v)))
        if gap == 0:
            pts.append(v)
            continue
        t = min(Fraction(1), eps / gap) * Fraction(rng.randint(1, 4), 4)
        pts.append(tuple(a + t * (b - a) for a, b in zip(v, r)))
    return conv_hull(pts)


def sample_cc_target(d: Diagram, B: Polytope, eps, rng: random.Random, legs=None, apex=None) -> tuple:
    """Compatible target polytopes near the images of B.

    On product-shaped diagrams each factor image is perturbed independently;
    otherwise B itself is perturbed inside the apex and its images are taken.
    ``legs`` and ``apex`` default to the limit cone of ``d``.
    """
    if legs is None:
        lim = _limit_polytope(d)
        legs = [lim.projections[o].affine for o in d.objects]
        apex = lim.space
    if d.is_product_shape():
        vals = []
        for o, f in zip(d.objects, legs):
            C = affine_image(B, f)
            P = d.spaces[o]
            vals.append(perturb_polytope(C, P, eps, rng) if len(P.vertices) > 1 else C)
        return tuple(vals)
    B2 = perturb_polytope(B, apex, eps, rng)
    return tuple(affine_image(B2, f) for f in legs)
