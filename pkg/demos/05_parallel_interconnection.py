"""Parallel interconnections: sums always work, products need disjoint
parameters and letters.

Two systems share the input u; adding their outputs corresponds to the
coefficient-wise series sum.  Multiplying the outputs corresponds to the
shuffle product, but only when the systems act on disjoint theta
coordinates and disjoint input letters.  On a shared parameter the naive
shuffle produces a genuinely different map, so the product raises.
"""

import numpy as np

from cfpde import diffop as do
from cfpde import expr as ex
from cfpde import iterint as ii
from cfpde import series as se
from cfpde.words import Letter, word


def main():
    # two one-parameter systems embedded in a joint two-parameter space
    c = se.series_from_coeffs(2, {word("x1"): do.monomial(ex.ONE, (1, 0))})
    d = se.series_from_coeffs(2, {word("x2"): do.monomial(ex.ONE, (0, 1))})

    total = se.parallel_sum(c, d)
    print("sum words    :", [w.text() for w in total.sorted_words()])

    product = se.shuffle_series(c, d)
    print("product words:", {w.text(): str(op)
                             for w, op in product.coeffs.items()})

    grid = ii.Grid(((0.0, 1.0, 65), (0.0, 1.0, 65)), 1.0, 129)
    binding = {1: ii.InputSignal.symbolic(ex.parse("0.2*t*sin(theta_1)", 2)),
               2: ii.InputSignal.symbolic(ex.parse("0.2*cos(theta_2)", 2))}
    lhs = ii.evaluate_series(product, binding, grid).values
    rhs = (ii.evaluate_series(c, binding, grid).values
           * ii.evaluate_series(d, binding, grid).values)
    print(f"product morphism error: {np.max(np.abs(lhs - rhs)):.2e}")

    # the same construction on a shared parameter is rejected
    c1 = se.series_from_coeffs(1, {word("x1"): do.monomial(ex.ONE, (1,))})
    try:
        se.shuffle_series(c1, c1)
    except se.OverlappingSupport as e:
        print("shared parameter:", e)

    # relabeling utilities set up disjointness explicitly
    d1 = se.relabel_letters(c1, {Letter(1): Letter(2)})
    joint = se.shuffle_series(se.embed(c1, 2, 0), se.embed(d1, 2, 1))
    print("after relabel+embed:", [w.text() for w in joint.sorted_words()])


if __name__ == "__main__":
    main()
