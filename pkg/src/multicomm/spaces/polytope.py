"""Exact rational polytopes in V- and H-representation."""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from functools import cached_property
from itertools import combinations
from math import gcd, lcm
from typing import Iterable, Sequence

from . import linalg
from .lp import Infeasible, Unbounded, solve_lp
from .rational import Q, fmt_vec, from_mpq, parse_vec, to_mpq

Point = tuple  # tuple[Fraction, ...]

__all__ = [
    "DimensionMismatch",
    "UnboundedPolyhedron",
    "Polytope",
    "HPolytope",
    "AffineMap",
    "conv_hull",
    "affine_image",
    "vertex_enumeration",
    "point_distance",
    "nearest_point",
    "hausdorff_distance",
    "pointset_hausdorff",
    "max_norm",
]


class DimensionMismatch(ValueError):
    pass


class UnboundedPolyhedron(ValueError):
    pass


def _pt(x) -> Point:
    return tuple(Q(v) for v in x)


def max_norm(v) -> Fraction:
    return max((abs(a) for a in v), default=Fraction(0))


def _sub(a, b):
    return tuple(x - y for x, y in zip(a, b))


def _normalize(a, b):
    """Scale ``a x <= b`` (or ``=``) to primitive integer coefficients."""
    vals = list(a) + [b]
    den = lcm(*(v.denominator for v in vals))
    ints = [int(v * den) for v in vals]
    g = 0
    for v in ints:
        g = gcd(g, v)
    if g == 0:
        return tuple(Fraction(0) for _ in a), Fraction(0)
    ints = [v // g for v in ints]
    return tuple(Fraction(v) for v in ints[:-1]), Fraction(ints[-1])


def _affine_frame(points):
    """Return ``(p0, R, pivots)`` describing the affine hull of ``points``.

    ``pivots`` are coordinates on which projection is injective over the hull;
    ``R`` is the reduced echelon basis of the direction space.
    """
    p0 = points[0]
    d = len(p0)
    dirs = [_sub(p, p0) for p in points[1:]]
    if not dirs:
        return p0, [], []
    R, pivots = linalg.rref(dirs, d)
    return p0, [[from_mpq(v) for v in row] for row in R], pivots


def _monotone_chain(pts):
    pts = sorted(set(pts))
    if len(pts) <= 2:
        return pts

    def cross(o, a, b):
        return (a[0] - o[0]) * (b[1] - o[1]) - (a[1] - o[1]) * (b[0] - o[0])

    lower = []
    for p in pts:
        while len(lower) >= 2 and cross(lower[-2], lower[-1], p) <= 0:
            lower.pop()
        lower.append(p)
    upper = []
    for p in reversed(pts):
        while len(upper) >= 2 and cross(upper[-2], upper[-1], p) <= 0:
            upper.pop()
        upper.append(p)
    return lower[:-1] + upper[:-1]  # counter-clockwise


def _in_hull_lp(points, x) -> bool:
    m = len(points)
    d = len(x)
    A = [[p[k] for p in points] for k in range(d)] + [[1] * m]
    b = list(x) + [1]
    try:
        solve_lp([0] * m, A, b, nvars=m)
    except Infeasible:
        return False
    return True


def _extreme_subset(proj):
    """Indices of the extreme points of a full-dimensional projected set."""
    r = len(proj[0])
    if r == 0:
        return [0]
    if r == 1:
        lo = min(range(len(proj)), key=lambda i: proj[i])
        hi = max(range(len(proj)), key=lambda i: proj[i])
        return sorted({lo, hi})
    if r == 2:
        chain = _monotone_chain(proj)
        where = {p: i for i, p in enumerate(proj)}
        return sorted(where[p] for p in chain)
    keep = []
    for i, p in enumerate(proj):
        others = proj[:i] + proj[i + 1:]
        if not _in_hull_lp(others, p):
            keep.append(i)
    return keep


class Polytope:
    """A nonempty polytope given by its (irredundant, sorted) vertex list.

    Constructing from arbitrary points takes the convex hull. Equality and
    hashing use the canonical vertex tuple, so two polytopes compare equal
    exactly when they are the same set.
    """

    def __init__(self, points: Iterable[Sequence]):
        pts = list(dict.fromkeys(_pt(p) for p in points))
        if not pts:
            raise ValueError("a polytope needs at least one point")
        d = len(pts[0])
        if any(len(p) != d for p in pts):
            raise DimensionMismatch("points of different dimensions")
        if len(pts) > 1:
            p0, _, pivots = _affine_frame(pts)
            proj = [tuple(p[k] for k in pivots) for p in pts]
            pts = [pts[i] for i in _extreme_subset(proj)]
        self.vertices = tuple(sorted(pts))
        self.ambient_dim = d

    @classmethod
    def _raw(cls, vertices, d):
        obj = cls.__new__(cls)
        obj.vertices = tuple(sorted(vertices))
        obj.ambient_dim = d
        return obj

    # constructors

    @classmethod
    def point(cls, x) -> "Polytope":
        x = _pt(x)
        return cls._raw([x], len(x))

    @classmethod
    def box(cls, lo, hi) -> "Polytope":
        lo, hi = _pt(lo), _pt(hi)
        corners = [()]
        for a, b in zip(lo, hi):
            corners = [c + (v,) for c in corners for v in ((a,) if a == b else (a, b))]
        return cls(corners)

    @classmethod
    def simplex(cls, n: int) -> "Polytope":
        """Standard simplex of probability vectors on ``n`` points."""
        verts = [tuple(Fraction(int(i == j)) for j in range(n)) for i in range(n)]
        return cls._raw(verts, n)

    @classmethod
    def product(cls, *factors: "Polytope") -> "Polytope":
        verts = [()]
        for P in factors:
            verts = [v + w for v in verts for w in P.vertices]
        return cls._raw(verts, sum(P.ambient_dim for P in factors))

    @classmethod
    def from_json(cls, data) -> "Polytope":
        return cls(parse_vec(v) for v in data)

    def to_json(self):
        return [fmt_vec(v) for v in self.vertices]

    # dunder

    def __eq__(self, other):
        return isinstance(other, Polytope) and self.vertices == other.vertices

    def __hash__(self):
        return hash(self.vertices)

    def __lt__(self, other):
        return (len(self.vertices), self.vertices) < (len(other.vertices), other.vertices)

    def __repr__(self):
        vs = ", ".join("(" + ", ".join(str(c) for c in v) + ")" for v in self.vertices)
        return f"Polytope[{vs}]"

    # geometry

    @cached_property
    def _frame(self):
        return _affine_frame(list(self.vertices))

    @property
    def affine_dim(self) -> int:
        return len(self._frame[2])

    @cached_property
    def hrep(self):
        """``(equalities, inequalities)``, each a tuple of ``(a, b)`` pairs.

        Equalities read ``a x = b`` and describe the affine hull; inequalities
        read ``a x <= b`` and are the facets inside it. Coefficients are
        primitive integers, sorted, so the representation is canonical.
        """
        d = self.ambient_dim
        p0, R, pivots = self._frame
        eqs = []
        pivset = set(pivots)
        for j in range(d):
            if j in pivset:
                continue
            a = [Fraction(0)] * d
            a[j] = Fraction(1)
            for row, pc in zip(R, pivots):
                a[pc] -= row[j]
            b = sum(ai * pi for ai, pi in zip(a, p0))
            eqs.append(_normalize(a, b))
        r = len(pivots)
        ineqs = []
        if r > 0:
            proj = [tuple(v[k] for k in pivots) for v in self.vertices]
            for a_r, b in _full_dim_facets(proj):
                a = [Fraction(0)] * d
                for k, pc in enumerate(pivots):
                    a[pc] = a_r[k]
                ineqs.append(_normalize(a, b))
        return tuple(sorted(set(eqs))), tuple(sorted(set(ineqs)))

    def as_hpolytope(self) -> "HPolytope":
        eqs, ineqs = self.hrep
        return HPolytope(self.ambient_dim, eqs, ineqs)

    def contains(self, x) -> bool:
        x = _pt(x)
        if len(x) != self.ambient_dim:
            raise DimensionMismatch("point dimension differs from polytope")
        eqs, ineqs = self.hrep
        for a, b in eqs:
            if sum(ai * xi for ai, xi in zip(a, x)) != b:
                return False
        for a, b in ineqs:
            if sum(ai * xi for ai, xi in zip(a, x)) > b:
                return False
        return True

    def issubset(self, other: "Polytope") -> bool:
        if self.ambient_dim != other.ambient_dim:
            raise DimensionMismatch("ambient dimensions differ")
        return all(other.contains(v) for v in self.vertices)

    def intersects(self, other: "Polytope") -> bool:
        if self.ambient_dim != other.ambient_dim:
            raise DimensionMismatch("ambient dimensions differ")
        if any(other.contains(v) for v in self.vertices) or any(self.contains(v) for v in other.vertices):
            return True
        m, k, d = len(self.vertices), len(other.vertices), self.ambient_dim
        A = [[v[j] for v in self.vertices] + [-w[j] for w in other.vertices] for j in range(d)]
        A.append([1] * m + [0] * k)
        A.append([0] * m + [1] * k)
        b = [0] * d + [1, 1]
        try:
            solve_lp([0] * (m + k), A, b, nvars=m + k)
        except Infeasible:
            return False
        return True

    def intersection(self, other: "Polytope") -> "Polytope | None":
        return self.as_hpolytope().intersect(other.as_hpolytope()).to_polytope()

    def centroid(self) -> Point:
        n = len(self.vertices)
        return tuple(sum(c) / n for c in zip(*self.vertices))

    def bounding_box(self):
        cols = list(zip(*self.vertices))
        return tuple(min(c) for c in cols), tuple(max(c) for c in cols)


def _full_dim_facets(proj):
    """Facets ``(a, b)`` of a full-dimensional vertex set in ``r`` coordinates."""
    r = len(proj[0])
    if r == 1:
        xs = [p[0] for p in proj]
        return [((Fraction(1),), max(xs)), ((Fraction(-1),), -min(xs))]
    if r == 2:
        ring = _monotone_chain(proj)
        out = []
        for i in range(len(ring)):
            a, b = ring[i], ring[(i + 1) % len(ring)]
            n = (b[1] - a[1], a[0] - b[0])
            out.append((n, n[0] * a[0] + n[1] * a[1]))
        return out
    out = set()
    for combo in combinations(range(len(proj)), r):
        base = proj[combo[0]]
        diffs = [_sub(proj[i], base) for i in combo[1:]]
        ns = linalg.nullspace(diffs, r)
        if len(ns) != 1:
            continue
        n = tuple(from_mpq(v) for v in ns[0])
        c = sum(ni * bi for ni, bi in zip(n, base))
        vals = [sum(ni * pi for ni, pi in zip(n, p)) - c for p in proj]
        if all(v <= 0 for v in vals):
            out.add(_normalize(n, c))
        elif all(v >= 0 for v in vals):
            out.add(_normalize(tuple(-x for x in n), -c))
    return sorted(out)


def conv_hull(points: Iterable[Sequence]) -> Polytope:
    """Convex hull of a finite nonempty point set, with redundant points removed."""
    return Polytope(points)


class HPolytope:
    """Polyhedron ``{x : A_eq x = b_eq, A_ub x <= b_ub}`` with lazy vertices."""

    def __init__(self, dim: int, equalities=(), inequalities=()):
        self.dim = dim
        self.equalities = tuple((_pt(a), Q(b)) for a, b in equalities)
        self.inequalities = tuple((_pt(a), Q(b)) for a, b in inequalities)
        for a, _ in self.equalities + self.inequalities:
            if len(a) != dim:
                raise DimensionMismatch("constraint length differs from dimension")

    def intersect(self, other: "HPolytope") -> "HPolytope":
        if other.dim != self.dim:
            raise DimensionMismatch("dimensions differ")
        return HPolytope(self.dim, self.equalities + other.equalities,
                         self.inequalities + other.inequalities)

    def embed(self, total_dim: int, offset: int) -> "HPolytope":
        """Same constraints acting on coordinates ``offset:offset+dim`` of a larger space."""
        def pad(a):
            return (Fraction(0),) * offset + a + (Fraction(0),) * (total_dim - offset - self.dim)
        return HPolytope(total_dim, [(pad(a), b) for a, b in self.equalities],
                         [(pad(a), b) for a, b in self.inequalities])

    def contains(self, x) -> bool:
        x = _pt(x)
        return (all(sum(a_ * x_ for a_, x_ in zip(a, x)) == b for a, b in self.equalities)
                and all(sum(a_ * x_ for a_, x_ in zip(a, x)) <= b for a, b in self.inequalities))

    def lp_data(self):
        return ([a for a, _ in self.equalities], [b for _, b in self.equalities],
                [a for a, _ in self.inequalities], [b for _, b in self.inequalities])

    def find_point(self) -> Point:
        """Some feasible point (raises :class:`Infeasible` if empty)."""
        Ae, be, Au, bu = self.lp_data()
        return solve_lp([0] * self.dim, Ae, be, Au, bu, free=range(self.dim), nvars=self.dim).x

    def is_empty(self) -> bool:
        try:
            self.find_point()
        except Infeasible:
            return True
        return False

    def vertices(self) -> list[Point]:
        return vertex_enumeration(self.dim, self.equalities, self.inequalities)

    def to_polytope(self) -> Polytope | None:
        vs = self.vertices()
        if not vs:
            return None
        return Polytope._raw(vs, self.dim)


def vertex_enumeration(dim: int, equalities=(), inequalities=()) -> list[Point]:
    """Exact irredundant vertex list of a bounded polyhedron.

    The equality system is solved first, so the search runs over bases of the
    inequalities in the reduced coordinates. An empty polyhedron gives ``[]``;
    an unbounded one raises :class:`UnboundedPolyhedron`.
    """
    eqs = [(_pt(a), Q(b)) for a, b in equalities]
    ineqs = [(_pt(a), Q(b)) for a, b in inequalities]
    sol = linalg.solve_affine([a for a, _ in eqs], [b for _, b in eqs], dim)
    if sol is None:
        return []
    x0, N = sol
    k = len(N)
    zero = to_mpq(0)
    # reduced inequalities: G (x0 + N y) <= h
    red = []
    for a, b in ineqs:
        am = [to_mpq(v) for v in a]
        g = tuple(sum((am[i] * N[j][i] for i in range(dim)), zero) for j in range(k))
        h = to_mpq(b) - sum((am[i] * x0[i] for i in range(dim)), zero)
        if all(v == 0 for v in g):
            if h < 0:
                return []
            continue
        red.append((g, h))
    red = list(dict.fromkeys(red))

    def lift(y):
        return tuple(from_mpq(x0[i] + sum((y[j] * N[j][i] for j in range(k)), zero)) for i in range(dim))

    if k == 0:
        return [lift([])]
    G = [[from_mpq(v) for v in g] for g, _ in red]
    h = [from_mpq(v) for _, v in red]
    for j in range(k):
        for sign in (1, -1):
            cost = [0] * k
            cost[j] = -sign
            try:
                solve_lp(cost, A_ub=G, b_ub=h, free=range(k), nvars=k)
            except Infeasible:
                return []
            except Unbounded:
                raise UnboundedPolyhedron("polyhedron is unbounded") from None
    found = set()
    for combo in combinations(range(len(red)), k):
        A = [list(red[i][0]) for i in combo]
        b = [red[i][1] for i in combo]
        y = linalg.solve_square(A, b)
        if y is None:
            continue
        if all(sum((gi * yi for gi, yi in zip(g, y)), zero) <= hv for g, hv in red):
            found.add(tuple(y))
    return sorted(lift(y) for y in found)


@dataclass(frozen=True)
class AffineMap:
    """``x -> matrix @ x + offset``; ``source_dim`` is explicit so 0-row maps work."""

    matrix: tuple
    offset: tuple
    source_dim: int

    def __post_init__(self):
        m = tuple(tuple(Q(v) for v in row) for row in self.matrix)
        o = tuple(Q(v) for v in self.offset)
        if len(m) != len(o) or any(len(row) != self.source_dim for row in m):
            raise DimensionMismatch("inconsistent affine map shape")
        object.__setattr__(self, "matrix", m)
        object.__setattr__(self, "offset", o)

    @property
    def target_dim(self) -> int:
        return len(self.offset)

    def __call__(self, x) -> Point:
        if len(x) != self.source_dim:
            raise DimensionMismatch(f"expected a point of dimension {self.source_dim}")
        return tuple(sum((a * xi for a, xi in zip(row, x)), Fraction(0)) + o
                     for row, o in zip(self.matrix, self.offset))

    def compose(self, inner: "AffineMap") -> "AffineMap":
        """``self ∘ inner``."""
        if inner.target_dim != self.source_dim:
            raise DimensionMismatch("maps are not composable")
        cols = list(zip(*inner.matrix)) if inner.matrix else [()] * inner.source_dim
        mat = tuple(tuple(sum((a * b for a, b in zip(row, col)), Fraction(0)) for col in cols)
                    if inner.matrix else tuple(Fraction(0) for _ in range(inner.source_dim))
                    for row in self.matrix)
        off = tuple(sum((a * b for a, b in zip(row, inner.offset)), Fraction(0)) + o
                    for row, o in zip(self.matrix, self.offset))
        return AffineMap(mat, off, inner.source_dim)

    @classmethod
    def identity(cls, d: int) -> "AffineMap":
        return cls(tuple(tuple(int(i == j) for j in range(d)) for i in range(d)), (0,) * d, d)

    @classmethod
    def coordinates(cls, d: int, indices: Sequence[int]) -> "AffineMap":
        return cls(tuple(tuple(int(j == i) for j in range(d)) for i in indices), (0,) * len(indices), d)

    @classmethod
    def constant(cls, d: int, value) -> "AffineMap":
        value = _pt(value)
        return cls(tuple((0,) * d for _ in value), value, d)

    def to_json(self):
        return {"matrix": [fmt_vec(r) for r in self.matrix], "offset": fmt_vec(self.offset),
                "source_dim": self.source_dim}

    @classmethod
    def from_json(cls, data, source_dim: int | None = None) -> "AffineMap":
        matrix = [parse_vec(r) for r in data["matrix"]]
        if source_dim is None:
            source_dim = data.get("source_dim", len(matrix[0]) if matrix else 0)
        return cls(tuple(matrix), parse_vec(data["offset"]), source_dim)


def affine_image(P: Polytope, f: AffineMap) -> Polytope:
    if P.ambient_dim != f.source_dim:
        raise DimensionMismatch("map source dimension differs from polytope")
    return Polytope(f(v) for v in P.vertices)


def _distance_lp(points, x):
    """LP data for min t s.t. |x - sum l_i p_i|_inf <= t, l in simplex."""
    m, d = len(points), len(x)
    n = m + 1
    A_ub, b_ub = [], []
    for j in range(d):
        row = [p[j] for p in points]
        A_ub.append([-v for v in row] + [-1])
        b_ub.append(-x[j])
        A_ub.append(row + [-1])
        b_ub.append(x[j])
    A_eq = [[1] * m + [0]]
    b_eq = [1]
    cost = [0] * m + [1]
    return n, cost, A_eq, b_eq, A_ub, b_ub


def point_distance(x, P: Polytope) -> Fraction:
    """Max-norm distance from a point to a polytope (exact)."""
    x = _pt(x)
    if len(x) != P.ambient_dim:
        raise DimensionMismatch("point dimension differs from polytope")
    if P.contains(x):
        return Fraction(0)
    n, cost, Ae, be, Au, bu = _distance_lp(P.vertices, x)
    return solve_lp(cost, Ae, be, Au, bu, nvars=n).value


def nearest_point(region, x):
    """A max-norm nearest point of ``region`` (Polytope or HPolytope) to ``x``.

    Returns ``(point, distance)``. Ties resolve to the lexicographically
    smallest optimal point so results are canonical.
    """
    x = _pt(x)
    H = region.as_hpolytope() if isinstance(region, Polytope) else region
    d = H.dim
    if len(x) != d:
        raise DimensionMismatch("point dimension differs from region")
    if H.contains(x):
        return x, Fraction(0)
    Ae, be, Au, bu = H.lp_data()
    # variables: y (free), t = max-norm gap, s_j >= |y_j - x_j|
    nv = 2 * d + 1
    Ae = [list(a) + [0] * (d + 1) for a in Ae]
    Au = [list(a) + [0] * (d + 1) for a in Au]
    for j in range(d):
        for sign in (1, -1):
            e = [0] * nv
            e[j], e[d] = sign, -1
            Au.append(e)
            bu.append(sign * x[j])
            e = [0] * nv
            e[j], e[d + 1 + j] = sign, -1
            Au.append(e)
            bu.append(sign * x[j])
    # ties: smallest max-norm gap, then smallest L1 gap, then lexicographic
    objs = [[0] * d + [1] + [0] * d, [0] * (d + 1) + [1] * d]
    for j in range(d):
        c = [0] * nv
        c[j] = 1
        objs.append(c)
    res = solve_lp(objs, Ae, be, Au, bu, free=range(d), nvars=nv)
    return res.x[:d], res.value


def hausdorff_distance(P: Polytope, Q_: Polytope) -> Fraction:
    """Exact Hausdorff distance under the max-coordinate norm.

    Distance to a convex set is convex, so the supremum over each polytope is
    attained at a vertex; each vertex distance is one small LP.
    """
    if P.ambient_dim != Q_.ambient_dim:
        raise DimensionMismatch("ambient dimensions differ")
    if P == Q_:
        return Fraction(0)
    a = max(point_distance(v, Q_) for v in P.vertices)
    b = max(point_distance(w, P) for w in Q_.vertices)
    return max(a, b)


def pointset_hausdorff(A, B) -> Fraction:
    A = [_pt(a) for a in A]
    B = [_pt(b) for b in B]

    def one(X, Y):
        return max(min(max_norm(_sub(x, y)) for y in Y) for x in X)

    return max(one(A, B), one(B, A))
