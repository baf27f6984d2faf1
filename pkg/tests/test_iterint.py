import io
import math

import numpy as np
import pytest

from cfpde import diffop as do
from cfpde import expr as ex
from cfpde import iterint as ii
from cfpde import series as se
from cfpde.words import DRIFT, Letter, Word, word

X1 = Letter(1)
THETA = ex.var("theta_1")


def small_grid(n_theta=33, n_t=129, t_end=1.0, theta=(0.0, 1.0)):
    return ii.Grid(((theta[0], theta[1], n_theta),), t_end, n_t)


def drift_input_word(i, j):
    return Word((DRIFT,) * i + (X1,) + (DRIFT,) * j)


class TestIteratedIntegral:
    def test_empty_word_is_one(self):
        g = small_grid()
        f = ii.iterated_integral(Word(), ii.InputSignal.symbolic(ex.ONE), g)
        assert np.allclose(f.values, 1.0)

    def test_single_letter_with_unit_input_is_t(self):
        g = small_grid()
        f = ii.iterated_integral(word("x1"), ii.InputSignal.symbolic(ex.ONE), g)
        assert np.max(np.abs(f.values - g.t_points)) < 1e-14

    @pytest.mark.parametrize("i,j", [(0, 0), (1, 0), (0, 1), (2, 1), (1, 2), (3, 3)])
    def test_unit_input_linear_words_match_beta_integral(self, i, j):
        # oracle: int_0^t (t - s)^i s^j ds / (i! j!) = t^(i+j+1)/(i+j+1)!
        g = small_grid(n_t=513)
        f = ii.iterated_integral(drift_input_word(i, j),
                                 ii.InputSignal.symbolic(ex.ONE), g)
        t = g.t_points
        oracle = t ** (i + j + 1) / math.factorial(i + j + 1)
        assert np.max(np.abs(f.values - oracle)) < 5e-6

    def test_unbound_letter(self):
        g = small_grid()
        with pytest.raises(ii.EvaluationError, match="not bound"):
            ii.iterated_integral(word("x2"), {1: ii.InputSignal.symbolic(ex.ONE)}, g)

    def test_sampled_derivative_order_cap(self):
        g = small_grid()
        base = ii.iterated_integral(Word(), ii.InputSignal.symbolic(ex.ONE), g)
        sig = ii.InputSignal.sampled(base)
        with pytest.raises(ii.EvaluationError, match="cap"):
            sig.derivative_values(g, (5,))

    def test_chen_differential_identity(self):
        # d/dt E_{x_i w} = u_i E_w, via central differences in t
        g = small_grid(n_theta=17, n_t=2001)
        u = ii.InputSignal.symbolic(ex.parse("sin(theta_1) + t*cos(theta_1)", 1))
        cache = {}
        for w in (word("x1"), word("x0", "x1"), word("x1", "x0"),
                  word("x1", "x1")):
            for head in (DRIFT, X1):
                full = Word((head,) + w.letters)
                outer = ii.iterated_integral(full, u, g, cache).values
                inner = ii.iterated_integral(w, u, g, cache).values
                dt = g.dt
                lhs = (outer[:, 2:] - outer[:, :-2]) / (2 * dt)
                u_vals = (u.derivative_values(g, (0,)) if head is X1
                          else np.ones(g.shape))
                rhs = (u_vals * inner)[:, 1:-1]
                scale = np.maximum(np.abs(rhs), 1.0)
                assert np.max(np.abs(lhs - rhs) / scale) <= 1e-3

    def test_quadrature_second_order_convergence(self):
        # for u polynomial in t the error of E_{x1}[u] halves twice per
        # grid refinement
        u_expr = ex.parse("t^2 + 0.5*t + 1", 1)
        errors = []
        for n_t in (65, 129, 257):
            g = small_grid(n_theta=3, n_t=n_t)
            f = ii.iterated_integral(word("x1"), ii.InputSignal.symbolic(u_expr), g)
            t = g.t_points
            exact = t ** 3 / 3 + 0.25 * t ** 2 + t
            errors.append(np.max(np.abs(f.values[0] - exact)))
        rate1 = math.log2(errors[0] / errors[1])
        rate2 = math.log2(errors[1] / errors[2])
        assert 1.8 <= rate1 <= 2.2
        assert 1.8 <= rate2 <= 2.2

    def test_cache_shared_between_suffixes(self):
        g = small_grid()
        u = ii.InputSignal.symbolic(ex.parse("t", 1))
        cache = {}
        ii.iterated_integral(word("x0", "x1"), u, g, cache)
        before = len(cache)
        ii.iterated_integral(word("x0", "x0", "x1"), u, g, cache)
        # only the new outermost integral should be added
        assert len(cache) == before + 1


class TestExpandDerivative:
    def test_linear_word_single_term(self):
        for i in range(6):
            for j in range(6):
                for k in range(6):
                    terms = ii.expand_derivative(drift_input_word(i, j), (k,))
                    assert len(terms) == 1
                    weight, dw = terms[0]
                    assert weight == 1
                    orders = [o for (l, o) in dw if not l.is_drift]
                    assert orders == [(k,)]

    def test_pure_drift_word_vanishes(self):
        assert ii.expand_derivative(Word((DRIFT,) * 3), (2,)) == []

    def test_two_occurrences_split(self):
        terms = ii.expand_derivative(word("x1", "x1"), (1,))
        assert len(terms) == 2
        assert all(weight == 1 for weight, _ in terms)
        orders = sorted(tuple(o for (l, o) in dw) for _, dw in terms)
        assert orders == [((0,), (1,)), ((1,), (0,))]

    def test_two_occurrences_match_finite_differences(self):
        # oracle: finite-difference in theta of the numerically computed
        # E_{x1 x1}[u] for u = sin(theta) * t
        g = small_grid(n_theta=201, n_t=201, theta=(0.2, 1.2))
        u = ii.InputSignal.symbolic(ex.parse("sin(theta_1)*t", 1))
        plain = ii.iterated_integral(word("x1", "x1"), u, g).values
        h = g.theta_spacing(0)
        fd = np.gradient(plain, h, axis=0, edge_order=2)
        total = np.zeros_like(plain)
        for weight, dw in ii.expand_derivative(word("x1", "x1"), (1,)):
            total = total + weight * ii.iterated_integral(dw, u, g).values
        assert np.max(np.abs(fd - total)) <= 2e-4

    def test_multinomial_weights(self):
        terms = ii.expand_derivative(word("x1", "x1"), (2,))
        weights = sorted(w for w, _ in terms)
        assert weights == [1, 1, 2]  # (2,0), (0,2) and the cross term


class TestEvaluateSeries:
    def test_unit_series(self):
        g = small_grid()
        c = se.one_series(1)
        out = ii.evaluate_series(c, ii.InputSignal.symbolic(ex.ONE), g)
        assert np.allclose(out.values, 1.0)

    def test_operator_on_single_word_matches_symbolic_integration(self):
        # c = (theta D) on x1 with u = theta^2 t: the output is
        # theta d/dtheta int u = theta * 2 theta t^2/2 = theta^2 t^2
        g = small_grid(theta=(0.3, 1.3), n_t=257)
        c = se.series_from_coeffs(1, {word("x1"): do.monomial(THETA, (1,))})
        u = ii.InputSignal.symbolic(ex.parse("theta_1^2*t", 1))
        out = ii.evaluate_series(c, u, g)
        th = g.theta_points(0)[:, None]
        t = g.t_points[None, :]
        assert np.max(np.abs(out.values - th ** 2 * t ** 2)) < 1e-12

    def test_numeric_vs_symbolic_theta_derivative(self):
        # derivative of the evaluated output by finite differences agrees
        # with the decorated-word path
        g = small_grid(n_theta=401, n_t=201, theta=(0.2, 1.4))
        base = se.series_from_coeffs(
            1, {word("x1"): do.identity(1),
                word("x0", "x1"): do.from_expr(THETA, 1)})
        deriv = se.series_from_coeffs(
            1, {w: do.op_mul(do.partial(1), op) for w, op in base.coeffs.items()})
        u = ii.InputSignal.symbolic(ex.parse("t*sin(theta_1) + cos(theta_1)", 1))
        plain = ii.evaluate_series(base, u, g).values
        h = g.theta_spacing(0)
        fd = np.gradient(plain, h, axis=0, edge_order=2)
        sym = ii.evaluate_series(deriv, u, g).values
        scale = np.maximum(np.abs(sym), 1.0)
        assert np.max(np.abs(fd - sym) / scale) <= 1e-4

    def test_missing_binding_raises(self):
        g = small_grid()
        c = se.series_from_coeffs(1, {word("x2"): do.identity(1)})
        with pytest.raises(ii.EvaluationError, match="unbound"):
            ii.evaluate_series(c, {1: ii.InputSignal.symbolic(ex.ONE)}, g)


class TestChenCoefficients:
    def test_level_zero(self):
        g = small_grid()
        out = ii.chen_coefficients(0, ii.InputSignal.symbolic(ex.ONE), g)
        assert set(out) == {Word()}
        assert np.allclose(out[Word()].values, 1.0)

    def test_level_one_unit_input(self):
        g = small_grid()
        out = ii.chen_coefficients(1, ii.InputSignal.symbolic(ex.ONE), g)
        assert set(out) == {Word(), word("x0"), word("x1")}
        for w in (word("x0"), word("x1")):
            assert np.max(np.abs(out[w].values - g.t_points)) < 1e-14

    def test_level_two_unit_input_beta_oracle(self):
        g = small_grid(n_t=513)
        out = ii.chen_coefficients(2, ii.InputSignal.symbolic(ex.ONE), g)
        t = g.t_points
        for w in (word("x0", "x0"), word("x0", "x1"),
                  word("x1", "x0"), word("x1", "x1")):
            assert np.max(np.abs(out[w].values - t ** 2 / 2)) < 1e-5


class TestGridAndCsv:
    def test_grid_spec_parse(self):
        g = ii.Grid.from_spec("0:6.283:257,0:1:513")
        assert g.dim == 1
        assert g.theta_axes == ((0.0, 6.283, 257),)
        assert g.t_end == 1.0 and g.n_t == 513

    def test_grid_spec_requires_zero_time_origin(self):
        with pytest.raises(ii.EvaluationError, match="start at 0"):
            ii.Grid.from_spec("0:1:9,1:2:9")

    def test_csv_layout(self):
        g = ii.Grid(((0.0, 1.0, 2),), 1.0, 2)
        f = ii.GridField(g, np.array([[1 + 2j, 3.0], [0.25, -1.5]]))
        buf = io.StringIO()
        ii.write_csv(f, buf)
        lines = buf.getvalue().splitlines()
        assert lines[0] == "theta_1,t,re,im"
        assert lines[1] == "0,0,1,2"
        assert lines[2] == "0,1,3,0"
        assert lines[3] == "1,0,0.25,0"
        assert lines[4] == "1,1,-1.5,0"
        assert len(lines) == 5

    def test_csv_seventeen_digits(self):
        g = ii.Grid(((0.0, 1.0, 2),), 1.0, 2)
        f = ii.GridField(g, np.full((2, 2), 1 / 3))
        buf = io.StringIO()
        ii.write_csv(f, buf)
        assert "0.33333333333333331" in buf.getvalue()
