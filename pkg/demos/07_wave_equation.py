"""The wave equation through three equivalent series representations.

d2y/dt2 - d2y/dtheta2 = u with zero initial data factors through
(I + d)(I - d); the direct geometric expansion, the cascade of the two
first-order factors, and the half-weight partial fraction form all give
the same coefficients.  For u = sin(theta) the output separates into
sin(theta) (1 - cos t).
"""

import numpy as np

from cfpde import expr as ex
from cfpde import iterint as ii
from cfpde import pde


def main():
    n = 9
    for form in pde.SecondOrderForm:
        c = pde.second_order_series(pde.SecondOrderSpec(0, -1, 0, 0, n, form))
        words = [w.text() for w in c.sorted_words()]
        print(f"{form.value:17s}: {words}")

    c = pde.wave_series(13)
    grid = ii.Grid.from_spec("0:6.283185307179586:257,0:1:513")
    u = ii.InputSignal.symbolic(ex.parse("sin(theta_1)", 1))
    y = ii.evaluate_series(c, u, grid)

    th = grid.theta_points(0)[:, None]
    t = grid.t_points[None, :]
    exact = np.sin(th) * (1 - np.cos(t))
    print(f"max error vs sin(theta)(1 - cos t): "
          f"{np.max(np.abs(y.values - exact)):.2e}")

    # a damped variant: the factor roots become complex but the three
    # forms still agree; complex constants stay inside the coefficients
    c2 = pde.second_order_series(pde.SecondOrderSpec(
        1.0, 1.0, 0, 0, 5, pde.SecondOrderForm.PARTIAL_FRACTION))
    w = c2.sorted_words()[2]
    print(f"complex-root example, coefficient of {w.text()}:",
          c2.coefficient(w))


if __name__ == "__main__":
    main()
