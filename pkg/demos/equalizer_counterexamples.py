"""Diagrams that are not products, where characteristic maps fail to be onto.

On the parallel pair f = (1,1,2), g = (1,2,2) the limit is {(1,1), (3,2)} and
the full subsets of both objects have no preimage under exp. On the interval
equalizer of id and 1 - x the limit is the single point (1/2, 1/2), so the
full intervals are compatible but not hit by cc.
"""
from multicomm.category import PolytopeMap, free_diagram
from multicomm.certify import certify_surjective, report_json
from multicomm.convex import WitnessProjectionMismatch, cc_action, surjectivity_witness_cc
from multicomm.prob import CompatibleTuple
from multicomm.spaces import AffineMap, FiniteSpace, Polytope, TableMap


def main():
    A, B = FiniteSpace.of_size(3), FiniteSpace.of_size(2)
    pair = free_diagram({"A": A, "B": B}, {"f": ("A", "B", TableMap(A, B, (0, 0, 1))),
                                           "g": ("A", "B", TableMap(A, B, (0, 1, 1)))})
    rep = certify_surjective("exp", pair)
    print(f"exp on the parallel pair: {len(rep.misses)} of {rep.tested} compatible tuples missed")

    I = Polytope.box((0,), (1,))
    flip = PolytopeMap(I, I, AffineMap(((-1,),), (1,), 1))
    eq = free_diagram({"A": I, "B": I}, {"f": ("A", "B", PolytopeMap.identity(I)), "g": ("A", "B", flip)})
    try:
        surjectivity_witness_cc(CompatibleTuple(eq, (I, I), cc_action), eq)
    except WitnessProjectionMismatch as exc:
        print("cc on the interval equalizer: best witness", exc.witness.to_json(),
              "projects to", [p.to_json() for p in exc.projections])
    print(report_json(certify_surjective("cc", eq, budget=5, seed=0)), end="")


if __name__ == "__main__":
    main()
