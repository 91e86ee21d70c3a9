"""Certification harness: image diagrams F(D), characteristic maps into Y_F, and
exact or sampled checks that those maps are surjective and open.

Openness between finite discrete spaces is automatic. For P and the convex
functors it is certified empirically: targets are sampled at distance eps from
the image of a base point, a nearby preimage is constructed exactly, and the
ratio distance/eps is tracked across an eps grid. Certification runs on finite
diagrams only, which is the sufficient regime for normal functors; the
converse direction is not exercised.
"""
from __future__ import annotations

import json
import random
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Any

from .category import Diagram, EmptyLimit, PolytopeMap
from .convex import (
    ConvexFamily,
    EmptyWitness,
    HyperSpace,
    InducedMap,
    LiftFailed,
    WitnessProjectionMismatch,
    chi_cc,
    chi_G_cc,
    cone_lift,
    d_c_witness,
    family_distance,
    preimage_hrep,
    random_point,
    random_subpolytope,
    sample_cc_target,
    surjectivity_witness_cc,
)
from .diagram_io import diagram_digest
from .hyperspace import (
    ENUMERATION_BOUND,
    G_map,
    G_space,
    exp_map,
    exp_space,
    lambda_space,
    preimage_exp,
    preimage_G,
    preimage_lambda,
)
from .prob import (
    CompatibleTuple,
    CouplingProblem,
    EmptyCorrespondence,
    NoPerturbationFound,
    bicommutative_square,
    chi_P,
    chi_P_map,
    coupling_polytope,
    nearest_coupling,
    p_image_diagram,
    product_measure,
    pushforward,
    pushforward_map,
    random_measure,
    sample_compatible_tuple,
)
from .spaces import FiniteSpace, Measure, Polytope, TableMap, conv_hull, fmt, hausdorff_distance

__all__ = [
    "SCHEMA_VERSION",
    "STABILITY_FACTOR",
    "DEFAULT_EPS",
    "FOOTER",
    "InapplicableFunctor",
    "FunctorId",
    "FUNCTORS",
    "functor",
    "functor_action",
    "image_diagram",
    "chi",
    "chi_factored",
    "OpennessReport",
    "SurjectivityReport",
    "CompositionReport",
    "certify_surjective",
    "certify_open",
    "certify_composition",
    "bicommutative_square",
    "report_json",
]

SCHEMA_VERSION = 1
STABILITY_FACTOR = 2
DEFAULT_EPS = (Fraction(1, 10), Fraction(1, 100), Fraction(1, 1000))
FOOTER = ("Certified on a finite diagram only. Finite-space openness is the sufficient "
          "regime for normal functors; the converse direction is not exercised.")


class InapplicableFunctor(ValueError):
    pass


@dataclass(frozen=True)
class FunctorId:
    name: str
    kind: str   # discrete | prob | convex | composite
    parts: tuple = ()   # (outer, inner) names for composites

    @property
    def outer(self) -> "FunctorId":
        return FUNCTORS[self.parts[0]]

    @property
    def inner(self) -> "FunctorId":
        return FUNCTORS[self.parts[1]]


FUNCTORS = {
    "exp": FunctorId("exp", "discrete"),
    "G": FunctorId("G", "discrete"),
    "lambda": FunctorId("lambda", "discrete"),
    "P": FunctorId("P", "prob"),
    "cc": FunctorId("cc", "convex"),
    "G_cc": FunctorId("G_cc", "convex"),
    "lambda_cc": FunctorId("lambda_cc", "convex"),
    "ccP": FunctorId("ccP", "composite", ("cc", "P")),
    "G_ccP": FunctorId("G_ccP", "composite", ("G_cc", "P")),
    "lambda_ccP": FunctorId("lambda_ccP", "composite", ("lambda_cc", "P")),
}


def functor(F) -> FunctorId:
    if isinstance(F, FunctorId):
        return F
    try:
        return FUNCTORS[F]
    except KeyError:
        raise InapplicableFunctor(f"unknown functor {F!r}; known: {', '.join(FUNCTORS)}") from None


# ---------------------------------------------------------------- functor actions


def functor_action(F, f):
    """F(f) as a callable on points of F(source)."""
    F = functor(F)
    if F.name == "exp":
        return exp_map(f)
    if F.name in ("G", "lambda"):
        return G_map(f)
    if F.name == "P":
        return lambda mu: pushforward(f, mu)
    if F.kind == "convex":
        return InducedMap(F.name, f)
    inner = pushforward_map(f)
    return InducedMap(F.outer.name, inner)


def _action(F):
    F = functor(F)
    return lambda f, v: functor_action(F, f)(v)


def _require(d: Diagram, kind: str, F: FunctorId):
    if d.kind != kind:
        raise InapplicableFunctor(f"{F.name} needs a diagram of {kind} spaces, got {d.kind}")


def _discrete_space(F: FunctorId, X: FiniteSpace, bound: int) -> FiniteSpace:
    n = len(X)
    if F.name == "exp":
        pts = exp_space(n)
    elif F.name == "G":
        pts = G_space(n, bound)
    else:
        pts = lambda_space(n, bound)
    return FiniteSpace(tuple(pts), f"{F.name}({X.label})")


def image_diagram(F, d: Diagram, bound: int = ENUMERATION_BOUND, validate: bool = True) -> Diagram:
    """F(D): same shape, F applied to every space and map; functor laws re-checked."""
    F = functor(F)
    if F.kind == "discrete":
        _require(d, "finite", F)
        spaces = {o: _discrete_space(F, d.spaces[o], bound) for o in d.objects}
        act = exp_map if F.name == "exp" else G_map
        maps = {}
        for m, (a, b) in d.shape.morphisms.items():
            fa = act(d.maps[m])
            maps[m] = TableMap.from_function(spaces[a], spaces[b], fa)
        out = Diagram(d.shape, spaces, maps)
    elif F.kind == "prob":
        _require(d, "finite", F)
        out = p_image_diagram(d)
    elif F.kind == "convex":
        _require(d, "polytope", F)
        spaces = {o: HyperSpace(F.name, d.spaces[o]) for o in d.objects}
        maps = {m: InducedMap(F.name, d.maps[m]) for m in d.shape.morphisms}
        out = Diagram(d.shape, spaces, maps)
    else:
        return image_diagram(F.outer, image_diagram(F.inner, d, bound, validate), bound, validate)
    if validate:
        out.validate()
    return out


def chi(F, d: Diagram, x) -> CompatibleTuple:
    """The characteristic map of the F-image of the limit cone, at ``x`` in F(lim D)."""
    F = functor(F)
    lim = d.limit()
    if F.name == "P":
        return chi_P(x, d)
    if F.name == "cc":
        return chi_cc(x, d)
    if F.kind == "convex":
        return chi_G_cc(x, d)
    vals = tuple(functor_action(F, lim.projections[o])(x) for o in d.objects)
    return CompatibleTuple(d, vals, _action(F))


def chi_factored(F, d: Diagram, x) -> CompatibleTuple:
    """χ_{F1,D1} applied after F1(χ_{F2,D}), with D1 = F2(D), for a composite F = F1∘F2."""
    F = functor(F)
    if F.kind != "composite":
        raise InapplicableFunctor(f"{F.name} is not a registered composite")
    D1 = p_image_diagram(d)
    y = functor_action(F.outer, chi_P_map(d))(x)
    inner = chi(F.outer, D1, y)
    return CompatibleTuple(d, inner.values, _action(F))


# ---------------------------------------------------------------- serialization


def _enc(v):
    if isinstance(v, Fraction):
        return fmt(v)
    if isinstance(v, (Polytope, ConvexFamily, Measure)):
        return v.to_json()
    if isinstance(v, (list, tuple)):
        return [_enc(x) for x in v]
    if isinstance(v, dict):
        return {str(k): _enc(x) for k, x in v.items()}
    if isinstance(v, (bool, int, str)) or v is None:
        return v
    return str(v)


def report_json(report) -> str:
    """Canonical JSON text (sorted keys, fixed separators, trailing newline)."""
    return json.dumps(report.to_json(), sort_keys=True, indent=2, ensure_ascii=False) + "\n"


# ---------------------------------------------------------------- surjectivity


@dataclass
class SurjectivityReport:
    functor: str
    digest: str
    mode: str   # exhaustive | sampled
    tested: int
    misses: list = field(default_factory=list)
    notes: list = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.misses

    def to_json(self) -> dict:
        return {
            "schema_version": SCHEMA_VERSION,
            "report": "surjectivity",
            "functor": self.functor,
            "diagram_digest": self.digest,
            "mode": self.mode,
            "tuples_tested": self.tested,
            "misses": len(self.misses),
            "miss_witnesses": _enc(self.misses),
            "notes": list(self.notes),
            "status": "pass" if self.ok else "fail",
            "footer": FOOTER,
        }


def _surjective_discrete(F: FunctorId, d: Diagram, bound: int, rep: SurjectivityReport):
    lim = d.limit()
    projs = [lim.projections[o] for o in d.objects]
    DF = image_diagram(F, d, bound)
    try:
        Y = DF.limit().space.points
    except EmptyLimit:
        Y = ()
    find = {"exp": preimage_exp, "G": preimage_G, "lambda": preimage_lambda}[F.name]
    for t in Y:
        rep.tested += 1
        if find(projs, list(t)) is None:
            rep.misses.append({"target": [str(v) for v in t]})


def _random_simplex_point(verts, rng) -> tuple:
    k = rng.randint(1, min(3, len(verts)))
    pick = rng.sample(verts, k)
    w = [rng.randint(1, 8) for _ in pick]
    s = sum(w)
    return tuple(sum(Fraction(wi, s) * v[j] for wi, v in zip(w, pick)) for j in range(len(verts[0])))


def _surjective_P(d: Diagram, budget: int, seed, rep: SurjectivityReport):
    D1 = p_image_diagram(d)
    Y = D1.limit()
    verts = list(Y.space.vertices)
    for i in range(budget):
        rng = random.Random(f"{seed}:{i}")
        y = _random_simplex_point(verts, rng)
        parts = Y.split(y)
        target = tuple(Measure(d.spaces[o], p) for o, p in zip(d.objects, parts))
        rep.tested += 1
        if coupling_polytope(CouplingProblem.of(d, target)).is_empty():
            rep.misses.append({"target": [m.to_json() for m in target]})


def _sources(d: Diagram) -> list:
    incoming = {d.shape.dst(m) for m in d.shape.non_identity()}
    return [o for o in d.objects if o not in incoming]


def _propagate(d: Diagram, chosen: dict, act) -> dict | None:
    """Extend values on source objects along morphisms; None if some object is unreachable."""
    vals = dict(chosen)
    changed = True
    while changed:
        changed = False
        for m in sorted(d.shape.non_identity()):
            a, b = d.shape.morphisms[m]
            if a in vals and b not in vals:
                vals[b] = act(d.maps[m], vals[a])
                changed = True
    return vals if len(vals) == len(d.objects) else None


def _random_family(P: Polytope, rng, linked: bool = False) -> ConvexFamily:
    k = rng.randint(1, 2)
    if linked:
        c = random_point(P, rng)
        return ConvexFamily([conv_hull([c, *random_subpolytope(P, rng).vertices]) for _ in range(k)], P)
    return ConvexFamily([random_subpolytope(P, rng) for _ in range(k)], P)


def _convex_candidates(name: str, d: Diagram, budget: int, seed):
    """Compatible tuples for cc-type functors: the full tuple, images of the limit, and
    values chosen freely on source objects and pushed along the morphisms."""
    lim = d.limit()
    fam = name != "cc"
    act = _action(name)
    wrap = (lambda P: ConvexFamily([P], P)) if fam else (lambda P: P)
    full = CompatibleTuple(d, tuple(wrap(d.spaces[o]) for o in d.objects), act)
    if full.compatible:
        yield full
    for i in range(budget - 1 if full.compatible else budget):
        rng = random.Random(f"{seed}:{i}")
        if i % 2 == 0:
            if fam:
                x = _random_family(lim.space, rng, linked=name == "lambda_cc")
            else:
                x = random_subpolytope(lim.space, rng)
            yield chi(name, d, x)
            continue
        chosen = {}
        for o in _sources(d):
            P = d.spaces[o]
            chosen[o] = _random_family(P, rng, name == "lambda_cc") if fam else random_subpolytope(P, rng)
        vals = _propagate(d, chosen, act)
        if vals is None:
            continue
        t = CompatibleTuple(d, tuple(vals[o] for o in d.objects), act)
        if t.compatible:
            yield t


def _convex_witness(name: str, target: CompatibleTuple, d: Diagram):
    if name == "cc":
        return surjectivity_witness_cc(target, d)
    return d_c_witness(target, d)


def _pull_through(W, f: PolytopeMap):
    """Preimage of W (a polytope or family) under the affine surjection f."""
    def one(C):
        P = f.source.as_hpolytope().intersect(preimage_hrep(C, f.affine)).to_polytope()
        if P is None:
            raise EmptyWitness("preimage under the marginal map is empty")
        return P
    if isinstance(W, Polytope):
        return one(W)
    return ConvexFamily([one(g) for g in W.generators], f.source)


def _surjective_convex(F: FunctorId, d: Diagram, budget: int, seed, rep: SurjectivityReport):
    composite = F.kind == "composite"
    base_d = p_image_diagram(d) if composite else d
    name = F.outer.name if composite else F.name
    for t in _convex_candidates(name, base_d, budget, seed):
        rep.tested += 1
        try:
            W = _convex_witness(name, t, base_d)
            if composite:
                W = _pull_through(W, chi_P_map(d))
                if chi(F, d, W).values != t.values:
                    raise WitnessProjectionMismatch("composite witness misses the target")
        except (EmptyWitness, WitnessProjectionMismatch) as exc:
            miss = {"target": list(t.values), "error": type(exc).__name__}
            if isinstance(exc, WitnessProjectionMismatch) and exc.witness is not None:
                miss["witness"] = exc.witness
                miss["projections"] = list(exc.projections)
            rep.misses.append(miss)


def certify_surjective(F, d: Diagram, budget: int = 100, seed=0, bound: int = ENUMERATION_BOUND) -> SurjectivityReport:
    """Exhaustive for the discrete functors, sampled otherwise; misses carry witnesses."""
    F = functor(F)
    mode = "exhaustive" if F.kind == "discrete" else "sampled"
    rep = SurjectivityReport(F.name, diagram_digest(d), mode, 0)
    if F.kind == "discrete":
        _require(d, "finite", F)
        _surjective_discrete(F, d, bound, rep)
    elif F.kind == "prob":
        _require(d, "finite", F)
        _surjective_P(d, budget, seed, rep)
    elif F.kind == "convex":
        _require(d, "polytope", F)
        _surjective_convex(F, d, budget, seed, rep)
    else:
        _require(d, "finite", F)
        _surjective_convex(F, d, budget, seed, rep)
    if not d.is_product_shape() and rep.misses:
        rep.notes.append("non-product diagram: the pullback of compatible targets can be "
                         "strictly smaller than the targets")
    return rep


# ---------------------------------------------------------------- openness


@dataclass
class OpennessRow:
    eps: Fraction
    samples: int
    successes: int
    failures: int
    excluded: int
    max_distance: Fraction
    mean_distance: Fraction
    K: Fraction

    def to_json(self):
        return {
            "eps": fmt(self.eps), "samples": self.samples, "successes": self.successes,
            "failures": self.failures, "excluded_empty_correspondence": self.excluded,
            "max_distance": fmt(self.max_distance), "mean_distance": fmt(self.mean_distance),
            "K": fmt(self.K),
        }


@dataclass
class OpennessReport:
    functor: str
    digest: str
    base: Any
    eps_grid: tuple
    rows: list = field(default_factory=list)
    witnesses: list = field(default_factory=list)
    automatic: bool = False
    notes: list = field(default_factory=list)

    @property
    def K(self) -> Fraction:
        return max((r.K for r in self.rows), default=Fraction(0))

    @property
    def stability_ratio(self) -> Fraction | None:
        ks = [r.K for r in self.rows if r.K > 0]
        if not ks:
            return None
        return max(ks) / min(ks)

    @property
    def stable(self) -> bool:
        r = self.stability_ratio
        return r is None or r <= STABILITY_FACTOR

    @property
    def ok(self) -> bool:
        if self.automatic:
            return True
        return self.stable and all(r.failures == 0 for r in self.rows)

    def to_json(self) -> dict:
        r = self.stability_ratio
        return {
            "schema_version": SCHEMA_VERSION,
            "report": "openness",
            "functor": self.functor,
            "diagram_digest": self.digest,
            "base": _enc(self.base),
            "eps_grid": [fmt(e) for e in self.eps_grid],
            "rows": [row.to_json() for row in self.rows],
            "K": fmt(self.K),
            "stability_factor": STABILITY_FACTOR,
            "stability_ratio": None if r is None else fmt(r),
            "stable": self.stable,
            "failure_witnesses": _enc(self.witnesses),
            "openness": "automatic: finite discrete spaces" if self.automatic else "sampled modulus",
            "notes": list(self.notes),
            "status": "pass" if self.ok else "fail",
            "footer": FOOTER,
        }


def _cone_data(F: FunctorId, d: Diagram):
    """(apex H-rep, apex polytope, legs, image diagram) for lifting cc-type characteristic maps."""
    if F.kind == "composite":
        lim = d.limit()
        apex = Polytope.simplex(len(lim.space))
        legs = [pushforward_map(lim.projections[o]).affine for o in d.objects]
        return apex.as_hpolytope(), apex, legs, p_image_diagram(d)
    lim = d.limit()
    return lim.hrep, lim.space, [lim.projections[o].affine for o in d.objects], d


def _default_base(F: FunctorId, d: Diagram, seed):
    rng = random.Random(f"{seed}:base")
    if F.name == "P":
        if d.is_product_shape():
            return product_measure(d, {o: random_measure(d.spaces[o], rng, positive=True) for o in d.objects})
        return Measure.uniform(d.limit().space)
    _, apex, _, _ = _cone_data(F, d)
    name = F.outer.name if F.kind == "composite" else F.name
    if name == "cc":
        return random_subpolytope(apex, rng, k=4)
    if name == "G_cc":
        return ConvexFamily([random_subpolytope(apex, rng, k=3) for _ in range(2)], apex)
    return ConvexFamily([random_subpolytope(apex, rng, k=3)], apex)


def _open_P(d, base, eps, i, seed):
    center = chi_P(base, d)
    target = sample_compatible_tuple(d, center, eps, seed=f"{seed}:{i}")
    _, dist = nearest_coupling(CouplingProblem.of(d, target, base))
    return dist


def _open_convex(F: FunctorId, d: Diagram, base, eps, i, seed):
    rng = random.Random(f"{seed}:{i}:{fmt(eps)}")
    apexH, apex, legs, D1 = _cone_data(F, d)
    gens = [base] if isinstance(base, Polytope) else list(base.generators)
    lifts, targets = [], []
    for B in gens:
        t = sample_cc_target(D1, B, eps, rng, legs=legs, apex=apex)
        targets.append(t)
        lifts.append(cone_lift(B, apexH, legs, t, D1.objects).polytope)
    if isinstance(base, Polytope):
        got = chi(F, d, lifts[0]).values
        if got != targets[0]:
            raise LiftFailed("lift image differs from target")
        return hausdorff_distance(lifts[0], base)
    fam = ConvexFamily(lifts, apex)
    want = tuple(ConvexFamily([t[k] for t in targets], D1.spaces[o]) for k, o in enumerate(D1.objects))
    if chi(F, d, fam).values != want:
        raise LiftFailed("lifted family image differs from target")
    name = F.outer.name if F.kind == "composite" else F.name
    if name == "lambda_cc" and not fam.is_linked:
        raise LiftFailed("lift of a linked family is not linked")
    return family_distance(fam, base)


_METRIC_NOTES = {
    "P": "distance: L1 on measures",
    "cc": "distance: Hausdorff distance in the max norm",
    "G_cc": "distance: generator-level Hausdorff distance in the max norm",
    "lambda_cc": "distance: generator-level Hausdorff distance in the max norm",
}


def certify_open(F, d: Diagram, base=None, eps_grid=DEFAULT_EPS, samples: int = 20, seed=0) -> OpennessReport:
    """Sampled openness modulus of the characteristic map at ``base``.

    For every eps a target is drawn at distance at most eps from χ(base) and
    a preimage is built exactly: the nearest coupling for P, the cone lift
    for cc, and a generator-wise lift followed by hulls for the family
    functors. K(eps) is the worst distance/eps ratio.
    """
    F = functor(F)
    eps_grid = tuple(Fraction(e) for e in eps_grid)
    if any(e <= 0 for e in eps_grid):
        raise ValueError("eps grid must be strictly positive")
    rep = OpennessReport(F.name, diagram_digest(d), None, eps_grid)
    if F.kind == "discrete":
        _require(d, "finite", F)
        rep.automatic = True
        rep.notes.append("characteristic map between finite discrete spaces is open")
        return rep
    _require(d, "polytope" if F.kind == "convex" else "finite", F)
    if base is None:
        base = _default_base(F, d, seed)
    rep.base = base
    rep.notes.append(_METRIC_NOTES[F.outer.name if F.kind == "composite" else F.name])
    rep.notes.append("product-shaped diagram" if d.is_product_shape() else "non-product diagram")
    if F.kind == "composite":
        rep.notes.append("lift taken in the measure simplex of the limit carrier")
    for eps in eps_grid:
        dists = []
        failures = excluded = 0
        for i in range(samples):
            try:
                if F.name == "P":
                    dist = _open_P(d, base, eps, i, seed)
                else:
                    dist = _open_convex(F, d, base, eps, i, seed)
            except EmptyCorrespondence:
                failures += 1
                excluded += 1
                rep.witnesses.append({"eps": eps, "sample": i, "error": "EmptyCorrespondence"})
                continue
            except (LiftFailed, NoPerturbationFound) as exc:
                failures += 1
                rep.witnesses.append({"eps": eps, "sample": i, "error": type(exc).__name__,
                                      "detail": str(exc)})
                continue
            dists.append(dist)
        mx = max(dists, default=Fraction(0))
        mean = sum(dists, Fraction(0)) / len(dists) if dists else Fraction(0)
        rep.rows.append(OpennessRow(eps, samples, len(dists), failures, excluded, mx, mean, mx / eps))
    return rep


# ---------------------------------------------------------------- composition


@dataclass
class CompositionReport:
    functor: str
    digest: str
    samples: int
    equal: int
    mismatches: list
    factor_surjectivity: dict

    @property
    def ok(self) -> bool:
        return self.equal == self.samples and all(self.factor_surjectivity.values())

    def to_json(self) -> dict:
        return {
            "schema_version": SCHEMA_VERSION,
            "report": "composition",
            "functor": self.functor,
            "diagram_digest": self.digest,
            "samples": self.samples,
            "factorization_equal": self.equal,
            "mismatch_witnesses": _enc(self.mismatches),
            "factor_surjectivity": dict(sorted(self.factor_surjectivity.items())),
            "composite_surjective": all(self.factor_surjectivity.values()),
            "status": "pass" if self.ok else "fail",
            "footer": FOOTER,
        }


def _sample_composite_point(F: FunctorId, apex: Polytope, rng):
    name = F.outer.name
    if name == "cc":
        return random_subpolytope(apex, rng)
    return _random_family(apex, rng, linked=name == "lambda_cc")


def certify_composition(F, d: Diagram, samples: int = 50, seed=0, factor_budget: int = 20) -> CompositionReport:
    """Check χ_{F1∘F2,D} = χ_{F1,D1} ∘ F1(χ_{F2,D}) exactly on sampled points.

    Surjectivity of the composite is then read off the factor certificates:
    P on D, and F1 on D1 = P(D).
    """
    F = functor(F)
    if F.kind != "composite":
        raise InapplicableFunctor(f"{F.name} is not a registered composite")
    _require(d, "finite", F)
    apex = Polytope.simplex(len(d.limit().space))
    equal = 0
    mismatches = []
    for i in range(samples):
        rng = random.Random(f"{seed}:{i}")
        x = _sample_composite_point(F, apex, rng)
        lhs = chi(F, d, x).values
        rhs = chi_factored(F, d, x).values
        if lhs == rhs:
            equal += 1
        else:
            mismatches.append({"sample": i, "point": x, "direct": list(lhs), "factored": list(rhs)})
    inner = certify_surjective(F.inner, d, factor_budget, seed)
    outer = certify_surjective(F.outer, p_image_diagram(d), factor_budget, seed)
    return CompositionReport(F.name, diagram_digest(d), samples, equal, mismatches,
                             {F.inner.name: inner.ok, F.outer.name: outer.ok})
