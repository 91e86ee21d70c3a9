"""Acceptance criteria, each checked at its stated scale, tolerance and time limit."""
import random
import subprocess
import sys
import time
from fractions import Fraction as F
from itertools import combinations, product
from pathlib import Path

import pytest

from multicomm.category import compute_limit, EmptyLimit, free_diagram, PolytopeMap
from multicomm.certify import bicommutative_square, certify_composition, certify_open
from multicomm.convex import (
    ConvexFamily,
    PointFamily,
    VietorisBasicSet,
    OpenBox,
    WitnessProjectionMismatch,
    G_cc_action,
    G_cc_map,
    cc_action,
    cc_map,
    chi_cc,
    d_c_witness,
    lemma1_check,
    open_lift_cc,
    polytope_square,
    r_cc,
    random_point,
    random_subpolytope,
    sample_cc_target,
    vietoris_member,
)
from multicomm.hyperspace import G_map, G_space, exp_map, exp_space, lambda_space, DiscreteSubset, UpFamily
from multicomm.prob import (
    CompatibleTuple,
    CouplingProblem,
    coupling_polytope,
    measure_tuple,
    product_measure,
    pushforward,
    random_measure,
)
from multicomm.spaces import AffineMap, FiniteSpace, Measure, Polytope, TableMap, affine_image, conv_hull
from oracles import all_families, brute_limit, in_hull, maximal_linked_families, random_finite_diagram

DATA = Path(__file__).parent / "data"
I = Polytope.box((0,), (1,))
SQ = Polytope.box((0, 0), (1, 1))
TRI = conv_hull([(0, 0), (1, 0), (0, 1)])


class Clock:
    def __init__(self, limit):
        self.limit = limit
        self.start = time.perf_counter()

    def check(self):
        spent = time.perf_counter() - self.start
        assert spent < self.limit, f"took {spent:.1f}s, limit {self.limit}s"
        return spent


def stable(Ks, factor=2):
    pos = [k for k in Ks if k > 0]
    return not pos or max(pos) / min(pos) <= factor


@pytest.mark.acceptance(1, "limit equals brute-force filtering on 100 random diagrams")
def test_limit_oracle_equivalence(record):
    clock = Clock(10)
    rng = random.Random(2024)
    nonempty = 0
    for _ in range(100):
        d = random_finite_diagram(rng, max_objects=4, max_points=5)
        try:
            got = compute_limit(d).carrier
            nonempty += 1
        except EmptyLimit:
            got = []
        assert got == brute_limit(d)
    record(f"100/100 equal, {nonempty} nonempty, {clock.check():.1f}s")


@pytest.mark.acceptance(2, "exp, G and lambda enumerations match definition filters for n <= 4")
def test_hyperspace_enumeration(record):
    clock = Clock(30)
    counts = {}
    for n in range(1, 5):
        subsets = {frozenset(i for i in range(n) if m >> i & 1) for m in range(1, 1 << n)}
        assert {frozenset(s.elements) for s in exp_space(n)} == subsets
        assert {frozenset(f.members()) for f in G_space(n)} == set(all_families(n))
        lam = {frozenset(f.members()) for f in lambda_space(n)}
        assert lam == set(maximal_linked_families(n))
        counts[n] = len(lam)
    assert [counts[n] for n in range(1, 5)] == [1, 2, 4, 12]
    record(f"lambda counts {[counts[n] for n in range(1, 5)]}, {clock.check():.1f}s")


def _random_table(rng, n, m):
    return TableMap(FiniteSpace.of_size(n), FiniteSpace.of_size(m), tuple(rng.randrange(m) for _ in range(n)))


def _random_affine(rng, src, dst):
    mat = tuple(tuple(F(rng.randint(-3, 3), rng.randint(1, 3)) for _ in range(src)) for _ in range(dst))
    return AffineMap(mat, tuple(F(rng.randint(-3, 3), rng.randint(1, 3)) for _ in range(dst)), src)


def _random_subset_mask(rng, n):
    return rng.randrange(1, 1 << n)


@pytest.mark.acceptance(3, "functor laws for exp, G, P, cc, G_cc on 200 morphism pairs")
def test_functor_laws(record):
    clock = Clock(30)
    rng = random.Random(7)
    violations = 0
    for _ in range(200):
        a, b, c = (rng.randint(1, 4) for _ in range(3))
        f, g = _random_table(rng, a, b), _random_table(rng, b, c)
        gf = g.compose(f)
        S = DiscreteSubset.of(a, [i for i in range(a) if _random_subset_mask(rng, a) >> i & 1] or [0])
        fam = UpFamily.of(a, [[i for i in range(a) if m >> i & 1] for m in
                              (_random_subset_mask(rng, a) for _ in range(rng.randint(1, 3)))])
        mu = random_measure(f.source, rng)
        ident = TableMap.identity(f.source)
        checks = [
            exp_map(gf)(S) == exp_map(g)(exp_map(f)(S)), exp_map(ident)(S) == S,
            G_map(gf)(fam) == G_map(g)(G_map(f)(fam)), G_map(ident)(fam) == fam,
            pushforward(gf, mu) == pushforward(g, pushforward(f, mu)), pushforward(ident, mu) == mu,
        ]
        da, db, dc = (rng.randint(1, 3) for _ in range(3))
        p, q = _random_affine(rng, da, db), _random_affine(rng, db, dc)
        box = Polytope.box((0,) * da, (1,) * da)
        P = random_subpolytope(box, rng)
        cfam = ConvexFamily([random_subpolytope(box, rng) for _ in range(rng.randint(1, 3))])
        checks += [
            cc_map(q.compose(p))(P) == cc_map(q)(cc_map(p)(P)), cc_map(AffineMap.identity(da))(P) == P,
            G_cc_map(q.compose(p))(cfam) == G_cc_map(q)(G_cc_map(p)(cfam)),
            G_cc_map(AffineMap.identity(da))(cfam) == cfam,
        ]
        violations += checks.count(False)
    assert violations == 0
    record(f"0 violations over 200 pairs x 5 functors, {clock.check():.1f}s")


def _lemma1_oracle(B, C, idx):
    pB = [tuple(b[i] for i in idx) for b in B]
    inside = all(in_hull(p, C.vertices) for p in pB)
    covers = all(in_hull(v, pB) for v in C.vertices)
    return inside, covers


@pytest.mark.acceptance(4, "projection-of-hull lemma on 500 random product instances")
def test_lemma1_suite(record):
    clock = Clock(60)
    rng = random.Random(11)
    factors = [SQ, TRI, conv_hull([(0, 0), (2, 1), (1, 2)])]
    tally = {"inside": 0, "equality": 0}
    for k in range(500):
        P1, P2 = rng.choice(factors), rng.choice(factors)
        prod_pts = [tuple(a) + tuple(b) for a, b in product(P1.vertices, P2.vertices)]
        B = [tuple(random_point(P1, rng)) + tuple(random_point(P2, rng)) for _ in range(rng.randint(1, 5))]
        if k % 3 == 0:
            B += rng.sample(prod_pts, 2)
        pB = conv_hull([b[:2] for b in B])
        mode = k % 4
        if mode == 0:
            C = pB
        elif mode == 1:
            C = conv_hull(list(pB.vertices) + [random_point(P1, rng)])
        elif mode == 2:
            C = random_subpolytope(pB, rng, k=3)
        else:
            C = random_subpolytope(P1, rng, k=3)
        v = lemma1_check(B, C, [0, 1])
        inside, covers = _lemma1_oracle(B, C, [0, 1])
        assert (v.projection_inside, v.covers) == (inside, covers)
        assert v.hull_projection_inside == inside
        assert not v.violated
        if covers:
            assert v.equality == (affine_image(conv_hull(B), AffineMap.coordinates(4, [0, 1])) == C)
        tally["inside"] += inside
        tally["equality"] += bool(v.equality)
    record(f"0 violations, {tally['inside']} inside cases, {tally['equality']} equality cases, "
           f"{clock.check():.1f}s")


@pytest.mark.acceptance(5, "1000 compatible measure tuples on the 3x4 square are all coupled")
def test_coupling_surjectivity(record):
    clock = Clock(60)
    d = bicommutative_square(FiniteSpace.of_size(3), FiniteSpace.of_size(4))
    rng = random.Random(5)
    feasible = 0
    for _ in range(1000):
        t = measure_tuple(d, {"X": random_measure(d.spaces["X"], rng), "Y": random_measure(d.spaces["Y"], rng),
                              "*": Measure.uniform(d.spaces["*"])})
        assert t.compatible
        feasible += not coupling_polytope(CouplingProblem.of(d, t)).is_empty()
    assert feasible == 1000
    record(f"{feasible}/1000 feasible, {clock.check():.1f}s")


@pytest.mark.acceptance(6, "P openness modulus on the 3x4 square, 200 samples per eps")
def test_P_openness(record):
    clock = Clock(300)
    d = bicommutative_square(FiniteSpace.of_size(3), FiniteSpace.of_size(4))
    rng = random.Random(6)
    base = product_measure(d, {o: random_measure(d.spaces[o], rng, positive=True) for o in d.objects})
    rep = certify_open("P", d, base=base, samples=200, seed=6)
    for row in rep.rows:
        assert row.samples == 200 and row.successes == 200 and row.failures == 0
        assert row.max_distance <= rep.K * row.eps
    assert rep.stable
    record(f"K per eps {[str(r.K) for r in rep.rows]}, ratio {rep.stability_ratio}, {clock.check():.1f}s")


@pytest.mark.acceptance(7, "cc lifts on 100 random product instances with eps <= 1/10")
def test_cc_lifting(record):
    clock = Clock(300)
    rng = random.Random(77)
    diagrams = [polytope_square(I, I), polytope_square(TRI, I), polytope_square(SQ, TRI)]
    grid = [F(1, 10), F(1, 100), F(1, 1000)]
    worst = {e: F(0) for e in grid}
    for k in range(100):
        d = diagrams[k % 3]
        eps = grid[k % 3 if k % 2 else (k // 2) % 3]
        B = random_subpolytope(d.limit().space, rng, k=rng.randint(1, 5))
        target = CompatibleTuple(d, tuple(sample_cc_target(d, B, eps, rng)), cc_action)
        res = open_lift_cc(B, target, d)
        assert chi_cc(res.polytope, d) == target
        worst[eps] = max(worst[eps], res.distance / eps)
    Ks = list(worst.values())
    assert stable(Ks)
    record(f"100/100 exact, K per eps {[str(k) for k in Ks]}, {clock.check():.1f}s")


def _grid_points(step):
    vals = [F(i, step) for i in range(step + 1)]
    return [(a, b) for a in vals for b in vals]


def _linked_point_family(rng, pts):
    m = rng.randint(1, 4)
    shared = {pair: rng.choice(pts) for pair in combinations(range(m), 2)}
    gens = []
    for i in range(m):
        g = {p for pair, p in shared.items() if i in pair} or {rng.choice(pts)}
        g |= set(rng.sample(pts, rng.randint(0, 2)))
        gens.append(sorted(g))
    return PointFamily(gens)


def _up_closure_decides(gens, grid, U, sign):
    inside = frozenset(p for p in grid if all(l < c < h for l, c, h in zip(U.lo, p, U.hi)))
    members = [frozenset(g) for g in gens]
    n = len(grid)
    index = {p: i for i, p in enumerate(grid)}
    masks = [sum(1 << index[p] for p in m) for m in members]
    in_mask = sum(1 << index[p] for p in inside)
    up = [s for s in range(1, 1 << n) if any(s & m == m for m in masks)]
    if sign == "+":
        return any(s & ~in_mask == 0 for s in up)
    return all(s & in_mask for s in up)


@pytest.mark.acceptance(8, "r_cc retraction, linkedness and Vietoris decisions")
def test_retraction_suite(record):
    clock = Clock(120)
    rng = random.Random(8)
    pts = _grid_points(4)
    for _ in range(200):
        fam = PointFamily([rng.sample(pts, rng.randint(1, 4)) for _ in range(rng.randint(1, 3))])
        once = r_cc(fam)
        assert r_cc(once) == once
        conv = ConvexFamily([random_subpolytope(SQ, rng) for _ in range(rng.randint(1, 3))])
        assert r_cc(conv) == conv
    for _ in range(200):
        fam = _linked_point_family(rng, pts)
        assert fam.is_linked
        assert r_cc(fam).is_linked
    small = _grid_points(2)
    decisions = 0
    for _ in range(200):
        gens = [rng.sample(small, rng.randint(1, 3)) for _ in range(rng.randint(1, 3))]
        a = [F(rng.randint(-1, 4), 4) for _ in range(2)]
        b = [F(rng.randint(-1, 4), 4) for _ in range(2)]
        lo = tuple(min(x, y) - F(1, 8) for x, y in zip(a, b))
        hi = tuple(max(x, y) + F(1, 8) for x, y in zip(a, b))
        U = OpenBox(lo, hi)
        for sign in "+-":
            got = vietoris_member(PointFamily(gens), VietorisBasicSet(U, sign))
            assert got == _up_closure_decides(gens, small, U, sign)
            decisions += 1
    record(f"400 retraction checks, 200 linked families, {decisions} Vietoris decisions, {clock.check():.1f}s")


def _random_family(rng, P, max_gens=2):
    return ConvexFamily([random_subpolytope(P, rng, k=rng.randint(1, 3)) for _ in range(rng.randint(1, max_gens))])


@pytest.mark.acceptance(9, "D_C witness on 100 product family tuples")
def test_dc_witness(record):
    clock = Clock(120)
    rng = random.Random(9)
    diagrams = [polytope_square(I, I), polytope_square(TRI, I), polytope_square(SQ, I)]
    for k in range(100):
        d = diagrams[k % 3]
        fams = [_random_family(rng, d.spaces["X"]), _random_family(rng, d.spaces["Y"]),
                ConvexFamily([d.spaces["*"]])]
        t = CompatibleTuple(d, tuple(fams), G_cc_action)
        assert t.compatible
        d_c_witness(t, d)
    # the same construction on an equalizer must report its mismatch rather than pass it
    neg = PolytopeMap(I, I, AffineMap(((-1,),), (1,), 1))
    eq = free_diagram({"A": I, "B": I}, {"f": ("A", "B", PolytopeMap.identity(I)), "g": ("A", "B", neg)})
    t = CompatibleTuple(eq, (ConvexFamily([I]), ConvexFamily([I])), G_cc_action)
    with pytest.raises(WitnessProjectionMismatch) as exc:
        d_c_witness(t, eq)
    record(f"100/100 product witnesses exact; equalizer mismatch reported "
           f"(witness {exc.value.witness.generators[0].to_json()}), {clock.check():.1f}s")


@pytest.mark.acceptance(10, "composition factorization for ccP, G_ccP, lambda_ccP")
def test_composition_factorization(record):
    clock = Clock(180)
    d = bicommutative_square(FiniteSpace.of_size(2), FiniteSpace.of_size(2))
    parts = []
    for name in ("ccP", "G_ccP", "lambda_ccP"):
        rep = certify_composition(name, d, samples=50, seed=10)
        assert rep.samples == 50 and rep.equal == 50 and not rep.mismatches
        assert rep.ok
        parts.append(f"{name} 50/50")
    record(", ".join(parts) + f", {clock.check():.1f}s")


def _certify(out, diagram, functor, seed):
    return subprocess.run([sys.executable, "-m", "multicomm", "certify", "--diagram", str(DATA / diagram),
                           "--functor", functor, "--seed", str(seed), "--samples", "5", "--out", str(out)],
                          capture_output=True, text=True, timeout=600)


@pytest.mark.acceptance(11, "certify reruns with the same seed are byte-identical")
def test_determinism(tmp_path, record):
    cases = [("square_3x4.json", "P"), ("cospan_2x2.json", "lambda"), ("triangle_interval.json", "cc"),
             ("interval_equalizer.json", "cc"), ("cospan_2x2.json", "lambda_ccP")]
    for k, (diagram, functor) in enumerate(cases):
        outs = []
        for run in range(2):
            target = tmp_path / f"{k}_{run}.json"
            proc = _certify(target, diagram, functor, seed=31)
            assert proc.returncode in (0, 1), proc.stderr
            outs.append(target.read_bytes())
        assert outs[0] == outs[1]
    record(f"{len(cases)} reports byte-identical across reruns")
