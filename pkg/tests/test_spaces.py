import random
from fractions import Fraction as F

import pytest

from multicomm.spaces import (
    AffineMap,
    BaseMismatch,
    DimensionMismatch,
    FiniteSpace,
    HPolytope,
    Infeasible,
    Measure,
    Polytope,
    Q,
    UnboundedPolyhedron,
    Unbounded,
    affine_image,
    conv_hull,
    fmt,
    hausdorff_distance,
    l1_distance,
    nearest_point,
    solve_lp,
    vertex_enumeration,
)
from oracles import basic_solutions, extreme_points


# rationals

def test_rational_parsing_and_formatting():
    assert Q("3/6") == F(1, 2)
    assert fmt(F(2)) == "2/1"
    assert fmt(F(-3, 9)) == "-1/3"
    with pytest.raises((TypeError, ValueError)):
        Q(0.5)


# conv_hull

def test_hull_of_single_point():
    assert conv_hull([(0, 0)]).vertices == ((0, 0),)


def test_hull_drops_collinear_middle_point():
    assert conv_hull([(0, 0), (1, 0), (F(1, 2), 0)]).vertices == ((0, 0), (1, 0))


def test_hull_drops_interior_point_matches_extremality_oracle():
    pts = [(0, 0), (1, 0), (0, 1), (F(1, 4), F(1, 4))]
    assert list(conv_hull(pts).vertices) == extreme_points(pts)
    assert conv_hull(pts).vertices == ((0, 0), (0, 1), (1, 0))


def test_hull_rejects_mixed_dimensions():
    with pytest.raises(DimensionMismatch):
        conv_hull([(0, 0), (1,)])


@pytest.mark.parametrize("seed", range(15))
def test_hull_agrees_with_extremality_oracle(seed):
    rng = random.Random(seed)
    d = rng.choice([1, 2, 3])
    pts = [tuple(F(rng.randint(0, 4), rng.choice([1, 2])) for _ in range(d)) for _ in range(rng.randint(1, 7))]
    assert list(conv_hull(pts).vertices) == extreme_points(pts)


def test_degenerate_polytope_in_space():
    seg = conv_hull([(0, 0, 0), (1, 1, 1)])
    assert seg.affine_dim == 1
    assert seg.contains((F(1, 2),) * 3)
    assert not seg.contains((F(1, 2), 0, F(1, 2)))


# affine_image

def test_affine_identity_image():
    T = conv_hull([(0, 0), (2, 0), (0, 2)])
    assert affine_image(T, AffineMap.identity(2)) == T


def test_projection_of_square_is_segment():
    sq = Polytope.box((0, 0), (1, 1))
    assert affine_image(sq, AffineMap.coordinates(2, [0])) == Polytope.box((0,), (1,))


def test_halving_triangle():
    T = conv_hull([(0, 0), (2, 0), (0, 2)])
    half = AffineMap(((F(1, 2), 0), (0, F(1, 2))), (0, 0), 2)
    assert affine_image(T, half) == conv_hull([(0, 0), (1, 0), (0, 1)])


def test_affine_dimension_mismatch():
    with pytest.raises(DimensionMismatch):
        affine_image(Polytope.box((0,), (1,)), AffineMap.identity(2))


# Hausdorff

def test_hausdorff_identity():
    sq = Polytope.box((0, 0), (1, 1))
    assert hausdorff_distance(sq, sq) == 0


def test_hausdorff_segments():
    assert hausdorff_distance(Polytope.box((0,), (1,)), Polytope.box((0,), (2,))) == 1


def test_hausdorff_square_and_extended_hull():
    sq = Polytope.box((0, 0), (1, 1))
    big = conv_hull(list(sq.vertices) + [(2, 2)])
    assert hausdorff_distance(sq, big) == 1
    # the farthest point of the larger hull is (2,2); its max-norm gap to the square is 1
    assert nearest_point(sq, (2, 2))[1] == 1


def test_hausdorff_dimension_mismatch():
    with pytest.raises(DimensionMismatch):
        hausdorff_distance(Polytope.box((0,), (1,)), Polytope.box((0, 0), (1, 1)))


# L1

def test_l1_distance_examples():
    X = FiniteSpace.of_size(2)
    mu = Measure(X, (F(1, 2), F(1, 2)))
    assert l1_distance(mu, mu) == 0
    assert l1_distance(Measure(X, (1, 0)), Measure(X, (0, 1))) == 2
    assert l1_distance(mu, Measure(X, (F(3, 4), F(1, 4)))) == F(1, 2)


def test_l1_base_mismatch():
    with pytest.raises(BaseMismatch):
        l1_distance(Measure.uniform(FiniteSpace.of_size(2)), Measure.uniform(FiniteSpace.of_size(3)))


def test_measure_must_sum_to_one():
    with pytest.raises(ValueError):
        Measure(FiniteSpace.of_size(2), (F(1, 2), F(1, 3)))


# LP

def test_lp_minimize_with_lower_bound():
    assert solve_lp([1], A_ub=[[-1]], b_ub=[-3]).value == 3


def test_lp_transportation_feasible_with_product_witness():
    A = [[1, 1, 0, 0], [0, 0, 1, 1], [1, 0, 1, 0], [0, 1, 0, 1]]
    b = [F(1, 2)] * 4
    res = solve_lp([0] * 4, A, b)
    x = res.x
    assert all(v >= 0 for v in x)
    assert all(sum(a * v for a, v in zip(row, x)) == bi for row, bi in zip(A, b))


def test_lp_unequal_totals_infeasible():
    A = [[1, 1, 0, 0], [0, 0, 1, 1], [1, 0, 1, 0], [0, 1, 0, 1]]
    with pytest.raises(Infeasible):
        solve_lp([0] * 4, A, [F(1, 2), F(1, 2), F(1, 2), F(1, 3)])


def test_lp_unbounded():
    with pytest.raises(Unbounded):
        solve_lp([-1], A_ub=[[-1]], b_ub=[0])


def test_lp_lexicographic_objectives():
    # min x+y on the segment x+y=1, then min x
    res = solve_lp([[1, 1], [1, 0]], A_eq=[[1, 1]], b_eq=[1])
    assert res.x == (0, 1)


# vertex enumeration

def test_vertex_enumeration_interval():
    assert vertex_enumeration(1, (), [((1,), 1), ((-1,), 0)]) == [(0,), (1,)]


def test_vertex_enumeration_square():
    sq = Polytope.box((0, 0), (1, 1))
    eqs, ineqs = sq.hrep
    assert len(ineqs) == 4
    assert sorted(vertex_enumeration(2, eqs, ineqs)) == sorted(sq.vertices)


def test_transportation_polytope_two_vertices_matches_basis_scan():
    A = [[1, 1, 0, 0], [0, 0, 1, 1], [1, 0, 1, 0], [0, 1, 0, 1]]
    b = [F(1, 2)] * 4
    oracle = basic_solutions(A, b, 4)
    assert len(oracle) == 2
    ineqs = [(tuple(-int(i == j) for i in range(4)), 0) for j in range(4)]
    got = sorted(vertex_enumeration(4, list(zip(A, b)), ineqs))
    assert got == oracle


def test_vertex_enumeration_unbounded():
    with pytest.raises(UnboundedPolyhedron):
        vertex_enumeration(2, (), [((-1, 0), 0), ((0, -1), 0)])


def test_hpolytope_round_trip_cube():
    cube = Polytope.box((0, 0, 0), (1, 1, 1))
    assert len(cube.hrep[1]) == 6
    assert cube.as_hpolytope().to_polytope() == cube


def test_hpolytope_empty():
    H = HPolytope(1, (), [((1,), 0), ((-1,), -1)])
    assert H.is_empty()
    assert H.to_polytope() is None
