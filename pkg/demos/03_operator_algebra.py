"""The noncommutative ring of differential operators with symbolic
coefficients: normal ordering, the Leibniz product, operator powers.
"""

from cfpde import diffop as do
from cfpde import expr as ex


def main():
    theta = ex.var("theta_1")
    D = do.partial(1)                    # d/dtheta_1
    M = do.from_expr(theta, 1)           # multiplication by theta_1

    print("D o (theta .)      :", do.op_mul(D, M))
    print("(theta .) o D      :", do.op_mul(M, D))
    commutator = do.op_add(do.op_mul(D, M), do.op_neg(do.op_mul(M, D)))
    print("[D, theta]         :", commutator, " (acts as the identity)")

    # the cascade of theta d/dtheta after theta^2 d/dtheta
    A = do.monomial(theta, (1,))
    B = do.monomial(ex.intpow(theta, 2), (1,))
    AB = do.op_mul(A, B)
    print("theta D o theta^2 D:", AB)

    f = ex.sin(theta)
    print("applied to sin     :", ex.to_string(do.op_apply(AB, f)))
    print("two-step check     :", ex.to_string(
        do.op_apply(A, do.op_apply(B, f))))

    # powers of the transport step with a theta-dependent velocity
    V = ex.add(1, ex.mul(0.5, ex.sin(theta)))
    step = do.op_scale(ex.neg(V), do.partial(1))
    print("(-V D)^2           :", do.op_pow(step, 2))


if __name__ == "__main__":
    main()
