"""Couplings on a finite product square.

Builds the square X -> * <- Y for |X| = 3, |Y| = 4, takes a product measure on
the limit, perturbs its marginals and finds the nearest joint measure with the
new marginals. The distance never exceeds the perturbation size.
"""
import random
from fractions import Fraction

from multicomm.certify import bicommutative_square
from multicomm.prob import (
    CouplingProblem,
    chi_P,
    nearest_coupling,
    product_measure,
    random_measure,
    sample_compatible_tuple,
)
from multicomm.spaces import FiniteSpace, fmt


def main():
    d = bicommutative_square(FiniteSpace.of_size(3), FiniteSpace.of_size(4))
    rng = random.Random(1)
    base = product_measure(d, {o: random_measure(d.spaces[o], rng, positive=True) for o in d.objects})
    center = chi_P(base, d)
    print("base marginal on X:", [fmt(w) for w in center.values[0].weights])
    for eps in (Fraction(1, 10), Fraction(1, 100), Fraction(1, 1000)):
        target = sample_compatible_tuple(d, center, eps, seed=f"demo:{eps}")
        nu, dist = nearest_coupling(CouplingProblem.of(d, target, base))
        print(f"eps={fmt(eps):>7}  nearest coupling at L1 distance {fmt(dist)}")


if __name__ == "__main__":
    main()
