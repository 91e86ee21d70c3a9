"""Exact rational geometry: polytopes, affine maps, finite spaces, measures, LP."""
from .finite import BaseMismatch, FiniteSpace, Measure, TableMap, l1, l1_distance
from .lp import Infeasible, LPError, LPResult, Unbounded, is_feasible, solve_lp
from .polytope import (
    AffineMap,
    DimensionMismatch,
    HPolytope,
    Polytope,
    UnboundedPolyhedron,
    affine_image,
    conv_hull,
    hausdorff_distance,
    max_norm,
    nearest_point,
    point_distance,
    pointset_hausdorff,
    vertex_enumeration,
)
from .rational import Q, fmt, fmt_vec, parse_vec

__all__ = [
    "AffineMap", "BaseMismatch", "DimensionMismatch", "FiniteSpace", "HPolytope",
    "Infeasible", "LPError", "LPResult", "Measure", "Polytope", "Q", "TableMap",
    "Unbounded", "UnboundedPolyhedron", "affine_image", "conv_hull", "fmt", "fmt_vec",
    "hausdorff_distance", "is_feasible", "l1", "l1_distance", "max_norm", "nearest_point",
    "parse_vec", "point_distance", "pointset_hausdorff", "solve_lp", "vertex_enumeration",
]
