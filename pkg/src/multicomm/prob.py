"""The probability-measure functor P on finite spaces.

Covers pushforwards, the marginal characteristic map, the coupling polytope
of measures with prescribed marginals, L1-nearest couplings and a sampler for
compatible marginal tuples near a given one.
"""
from __future__ import annotations

import random
from dataclasses import dataclass
from fractions import Fraction
from typing import Any

from .category import Diagram, FiniteCategory, LimitSpace, PolytopeMap
from .spaces import (
    AffineMap,
    BaseMismatch,
    FiniteSpace,
    HPolytope,
    Infeasible,
    Measure,
    Polytope,
    TableMap,
    l1,
    solve_lp,
)

__all__ = [
    "IncompatibleTuple",
    "EmptyCorrespondence",
    "NoPerturbationFound",
    "CompatibleTuple",
    "CouplingProblem",
    "pushforward",
    "pushforward_map",
    "p_image_diagram",
    "chi_P",
    "chi_P_map",
    "coupling_polytope",
    "nearest_coupling",
    "sample_compatible_tuple",
    "random_measure",
    "product_measure",
    "measure_from_point",
    "bicommutative_square",
    "measure_tuple",
]


class IncompatibleTuple(ValueError):
    pass


class EmptyCorrespondence(ValueError):
    pass


class NoPerturbationFound(RuntimeError):
    pass


def _apply(f, value):
    return f(value)


@dataclass(frozen=True)
class CompatibleTuple:
    """One value per diagram object, in object order.

    ``action(f, value)`` says how a diagram map acts on the payloads: plain
    application by default, pushforward for measures, images for convex sets.
    """

    diagram: Diagram
    values: tuple
    action: Any = _apply

    def __getitem__(self, obj):
        return self.values[self.diagram.objects.index(obj)]

    def as_dict(self) -> dict:
        return dict(zip(self.diagram.objects, self.values))

    @property
    def compatible(self) -> bool:
        vals = self.as_dict()
        for m in self.diagram.shape.non_identity():
            a, b = self.diagram.shape.morphisms[m]
            if self.action(self.diagram.maps[m], vals[a]) != vals[b]:
                return False
        return True

    def __eq__(self, other):
        return isinstance(other, CompatibleTuple) and self.values == other.values

    def __hash__(self):
        return hash(self.values)


def pushforward(f: TableMap, mu: Measure) -> Measure:
    if mu.base != f.source:
        raise BaseMismatch("measure does not live on the map's source")
    w = [Fraction(0)] * len(f.target)
    for i, v in zip(f.table, mu.weights):
        w[i] += v
    return Measure(f.target, tuple(w))


def measure_tuple(d: Diagram, measures) -> CompatibleTuple:
    """Wrap per-object measures (sequence in object order, or dict) as a tuple."""
    if isinstance(measures, dict):
        measures = [measures[o] for o in d.objects]
    return CompatibleTuple(d, tuple(measures), pushforward)


def measure_from_point(space: FiniteSpace, x) -> Measure:
    return Measure(space, tuple(x))


def pushforward_map(f: TableMap) -> PolytopeMap:
    """P(f) as an affine (0/1 matrix) map between standard simplices."""
    n, m = len(f.source), len(f.target)
    mat = tuple(tuple(int(f.table[i] == j) for i in range(n)) for j in range(m))
    return PolytopeMap(Polytope.simplex(n), Polytope.simplex(m), AffineMap(mat, (0,) * m, n))


def p_image_diagram(d: Diagram) -> Diagram:
    """P(D): same shape, simplices as objects, pushforward matrices as maps."""
    spaces = {o: Polytope.simplex(len(d.spaces[o])) for o in d.objects}
    maps = {m: pushforward_map(d.maps[m]) for m in d.shape.morphisms}
    return Diagram(d.shape, spaces, maps)


def _limit_of(d: Diagram) -> LimitSpace:
    return d.limit()


def chi_P(lam: Measure, d: Diagram) -> CompatibleTuple:
    """Marginals of a measure on the limit carrier along each limit projection."""
    lim = _limit_of(d)
    if lam.base != lim.space:
        raise BaseMismatch("measure is not on the limit carrier")
    return CompatibleTuple(d, tuple(pushforward(lim.projections[o], lam) for o in d.objects), pushforward)


def chi_P_map(d: Diagram) -> PolytopeMap:
    """chi_P as an affine map from P(lim D) into the limit of P(D) (product coordinates)."""
    lim = _limit_of(d)
    D1 = p_image_diagram(d)
    Y = D1.limit()
    rows = []
    for o in d.objects:
        rows.extend(pushforward_map(lim.projections[o]).affine.matrix)
    n = len(lim.space)
    return PolytopeMap(Polytope.simplex(n), Y.space, AffineMap(tuple(rows), (0,) * len(rows), n))


@dataclass(frozen=True)
class CouplingProblem:
    diagram: Diagram
    targets: tuple  # Measures in object order
    base: Measure | None = None

    @classmethod
    def of(cls, d: Diagram, targets, base: Measure | None = None) -> "CouplingProblem":
        if isinstance(targets, CompatibleTuple):
            targets = targets.values
        elif isinstance(targets, dict):
            targets = tuple(targets[o] for o in d.objects)
        return cls(d, tuple(targets), base)


def _check_targets(p: CouplingProblem):
    d = p.diagram
    vals = dict(zip(d.objects, p.targets))
    for o, mu in vals.items():
        if mu.base != d.spaces[o]:
            raise BaseMismatch(f"target for {o!r} lives on the wrong space")
    for m in d.shape.non_identity():
        a, b = d.shape.morphisms[m]
        if pushforward(d.maps[m], vals[a]) != vals[b]:
            raise IncompatibleTuple(f"pushforward along {m} does not match")


def coupling_polytope(p: CouplingProblem) -> HPolytope:
    """Measures on the limit carrier whose marginals are the targets.

    Coordinates are indexed by carrier tuples in carrier order.
    """
    _check_targets(p)
    d = p.diagram
    lim = _limit_of(d)
    N = len(lim.space)
    eqs = [((Fraction(1),) * N, Fraction(1))]
    for o, mu in zip(d.objects, p.targets):
        table = lim.projections[o].table
        for j, w in enumerate(mu.weights):
            eqs.append((tuple(Fraction(int(table[t] == j)) for t in range(N)), w))
    ineqs = [(tuple(Fraction(-int(i == t)) for i in range(N)), Fraction(0)) for t in range(N)]
    return HPolytope(N, eqs, ineqs)


def nearest_coupling(p: CouplingProblem) -> tuple[Measure, Fraction]:
    """The coupling closest to ``p.base`` in L1 distance, and that distance.

    Solved as one exact LP (absolute values split into slack variables);
    ties go to the lexicographically smallest coupling.
    """
    if p.base is None:
        raise ValueError("nearest_coupling needs a base measure")
    H = coupling_polytope(p)
    lim = _limit_of(p.diagram)
    if p.base.base != lim.space:
        raise BaseMismatch("base measure is not on the limit carrier")
    N = H.dim
    lam = p.base.weights
    Ae = [list(a) + [0] * N for a, _ in H.equalities]
    be = [b for _, b in H.equalities]
    Au, bu = [], []
    for t in range(N):
        row = [0] * (2 * N)
        row[t], row[N + t] = 1, -1
        Au.append(row)
        bu.append(lam[t])
        row = [0] * (2 * N)
        row[t], row[N + t] = -1, -1
        Au.append(row)
        bu.append(-lam[t])
    objs = [[0] * N + [1] * N]
    for t in range(N):
        c = [0] * (2 * N)
        c[t] = 1
        objs.append(c)
    try:
        res = solve_lp(objs, Ae, be, Au, bu, nvars=2 * N)
    except Infeasible:
        raise EmptyCorrespondence("no measure on the limit has these marginals") from None
    nu = Measure(lim.space, res.x[:N])
    return nu, res.value


def random_measure(space: FiniteSpace, rng: random.Random, denom: int = 12, positive: bool = False) -> Measure:
    lo = 1 if positive else 0
    while True:
        w = [rng.randint(lo, denom) for _ in range(len(space))]
        if sum(w):
            s = sum(w)
            return Measure(space, tuple(Fraction(v, s) for v in w))


def product_measure(d: Diagram, measures: dict) -> Measure:
    """Product of per-object measures on the limit carrier of a product-shaped diagram."""
    lim = _limit_of(d)
    w = []
    for t in lim.space.points:
        v = Fraction(1)
        for o, x in zip(d.objects, t):
            v *= measures[o][x]
        w.append(v)
    return Measure(lim.space, tuple(w))


def _tuple_constraints(d: Diagram):
    """Blocks and constraints describing compatible measure tuples (the limit of P(D))."""
    offsets = {}
    M = 0
    for o in d.objects:
        offsets[o] = M
        M += len(d.spaces[o])
    Ae, be = [], []
    for o in d.objects:
        row = [0] * M
        for i in range(len(d.spaces[o])):
            row[offsets[o] + i] = 1
        Ae.append(row)
        be.append(1)
    for m in d.shape.non_identity():
        a, b = d.shape.morphisms[m]
        table = d.maps[m].table
        for j in range(len(d.spaces[b])):
            row = [0] * M
            for i, t in enumerate(table):
                if t == j:
                    row[offsets[a] + i] += 1
            row[offsets[b] + j] -= 1
            Ae.append(row)
            be.append(0)
    return offsets, M, Ae, be


def sample_compatible_tuple(d: Diagram, center: CompatibleTuple, eps, seed, budget: int = 20) -> CompatibleTuple:
    """A compatible measure tuple within L1 distance ``eps`` of ``center`` on every object.

    A random object's measure is pulled towards a random target; the LP
    propagates that change through the compatibility equations while keeping
    the other objects as close to the center as possible. The result is then
    shrunk along the segment from the center (compatible tuples form a convex
    set) until the worst per-object distance is ``eps``.
    """
    eps = Fraction(eps)
    if not center.compatible:
        raise IncompatibleTuple("center is not compatible")
    if eps == 0:
        return center
    rng = random.Random(seed)
    offsets, M, Ae, be = _tuple_constraints(d)
    c = []
    for mu in center.values:
        c.extend(mu.weights)
    movable = [o for o in d.objects if len(d.spaces[o]) > 1]
    if not movable:
        raise NoPerturbationFound("every object is a single point")
    for _ in range(budget):
        a0 = rng.choice(movable)
        tau = random_measure(d.spaces[a0], rng).weights
        n0 = len(tau)
        lo = offsets[a0]
        nv = 2 * M
        A_eq = [list(r) + [0] * M for r in Ae]
        A_ub, b_ub = [], []
        for k in range(M):
            in_seed = lo <= k < lo + n0
            goal = tau[k - lo] if in_seed else c[k]
            row = [0] * nv
            row[k], row[M + k] = 1, -1
            A_ub.append(row)
            b_ub.append(goal)
            row = [0] * nv
            row[k], row[M + k] = -1, -1
            A_ub.append(row)
            b_ub.append(-goal)
        first = [0] * M + [int(lo <= k < lo + n0) for k in range(M)]
        second = [0] * M + [int(not lo <= k < lo + n0) for k in range(M)]
        try:
            res = solve_lp([first, second], A_eq, be, A_ub, b_ub, nvars=nv)
        except Infeasible:
            raise NoPerturbationFound("compatible tuples form an empty set") from None
        rho = res.x[:M]
        dist = max(l1(rho[offsets[o]:offsets[o] + len(d.spaces[o])], c[offsets[o]:offsets[o] + len(d.spaces[o])])
                   for o in d.objects)
        if dist == 0:
            continue
        t = min(Fraction(1), eps / dist)
        vals = []
        for o in d.objects:
            k = offsets[o]
            n = len(d.spaces[o])
            vals.append(Measure(d.spaces[o], tuple(c[k + i] + t * (rho[k + i] - c[k + i]) for i in range(n))))
        out = CompatibleTuple(d, tuple(vals), pushforward)
        if not out.compatible:
            raise AssertionError("sampled tuple failed the exact compatibility check")
        return out
    raise NoPerturbationFound(f"no perturbation found in {budget} attempts")


def bicommutative_square(X: FiniteSpace, Y: FiniteSpace) -> Diagram:
    """The cospan ``X -> {*} <- Y``; its limit is ``X × Y``."""
    star = FiniteSpace(("*",), "*")
    shape = FiniteCategory.free(("X", "Y", "*"), [("p", "X", "*"), ("q", "Y", "*")])
    maps = {"p": TableMap(X, star, (0,) * len(X)), "q": TableMap(Y, star, (0,) * len(Y))}
    return Diagram(shape, {"X": X, "Y": Y, "*": star}, maps)
