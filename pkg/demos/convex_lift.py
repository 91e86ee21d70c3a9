"""Lifting a shrunk target back into the limit of an interval square.

The limit of [0,1] -> {0} <- [0,1] is the unit square. Shrinking the first
factor image of the square to [0, 9/10] is matched by a lift at Hausdorff
distance 1/10 whose images are exactly the targets.
"""
from fractions import Fraction

from multicomm.convex import cc_action, chi_cc, open_lift_cc, polytope_square
from multicomm.prob import CompatibleTuple
from multicomm.spaces import Polytope, fmt


def main():
    I = Polytope.box((0,), (1,))
    d = polytope_square(I, I)
    B = d.limit().space
    target = CompatibleTuple(d, (Polytope.box((0,), (Fraction(9, 10),)), I, Polytope.point((0,))), cc_action)
    res = open_lift_cc(B, target, d)
    print("lift vertices:", res.polytope.to_json())
    print("distance:", fmt(res.distance))
    print("images match targets:", chi_cc(res.polytope, d) == target)


if __name__ == "__main__":
    main()
