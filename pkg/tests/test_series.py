import math

import pytest

from starcalc import (
    Constant, EvalDomainError, SeriesDivergenceWarning, TaylorProduct,
    log_identity_residual, parse, taylor_coefficients, taylor_evaluate,
)


class TestCoefficients:
    def test_exponential_terminates(self):
        # log e^x = x: first derivative 1, all higher ones 0
        tp = taylor_coefficients(parse("e^x"), 0.0, 4)
        assert tp.coefficients == pytest.approx((1.0, math.e, 1.0, 1.0, 1.0))

    def test_identity_at_one(self):
        # d^i/dx^i log x = (-1)^(i-1) (i-1)!/x^i, so a_i = exp((-1)^(i-1)/i)
        tp = taylor_coefficients(parse("x"), 1.0, 3)
        expected = (1.0,) + tuple(
            math.exp((-1.0) ** (i - 1) / i) for i in (1, 2, 3)
        )
        assert tp.coefficients == pytest.approx(expected, rel=1e-13)

    def test_constant(self):
        tp = taylor_coefficients(Constant(5.0), 2.3, 3)
        assert tp.coefficients == (5.0, 1.0, 1.0, 1.0)

    def test_all_coefficients_positive(self):
        tp = taylor_coefficients(parse("x^x"), 2.0, 8)
        assert all(a > 0 and math.isfinite(a) for a in tp.coefficients)

    def test_coefficient_identity_consistency(self):
        # log(a_i) * i! equals the i-th derivative of log f at c
        from starcalc import Log, differentiate, evaluate, simplify

        f = parse("x^x")
        c = 1.5
        tp = taylor_coefficients(f, c, 6)
        deriv = simplify(Log(f))
        for i in range(1, 7):
            deriv = simplify(differentiate(deriv))
            want = evaluate(deriv, c)
            got = math.log(tp.coefficients[i]) * math.factorial(i)
            assert got == pytest.approx(want, rel=1e-10, abs=1e-12)

    def test_nonpositive_center_raises(self):
        with pytest.raises(EvalDomainError):
            taylor_coefficients(parse("x"), -1.0, 3)

    def test_overflow_reported(self):
        from starcalc import CoefficientOverflowError

        with pytest.raises(CoefficientOverflowError):
            taylor_coefficients(parse("x"), 1e-130, 3)


class TestEvaluate:
    def test_terminating_series_is_exact(self):
        tp = taylor_coefficients(parse("e^x"), 0.0, 4)
        assert taylor_evaluate(tp, 2.0) == pytest.approx(math.e**2, abs=1e-12)

    def test_log_series_at_half_radius(self):
        tp = taylor_coefficients(parse("x"), 1.0, 30)
        assert taylor_evaluate(tp, 1.5) == pytest.approx(1.5, abs=1e-6)

    def test_at_center_returns_a0(self):
        tp = taylor_coefficients(parse("x^x"), 2.0, 5)
        assert taylor_evaluate(tp, 2.0) == tp.coefficients[0]

    def test_degenerate_zero_terms(self):
        tp = taylor_coefficients(parse("x^2+1"), 1.0, 0)
        for x in (0.5, 1.0, 7.0):
            assert taylor_evaluate(tp, x) == tp.coefficients[0]

    def test_growth_warning_outside_radius(self):
        tp = taylor_coefficients(parse("x"), 1.0, 20)
        with pytest.warns(SeriesDivergenceWarning):
            taylor_evaluate(tp, 3.5)  # |x-c| = 2.5 > radius 1

    @pytest.mark.parametrize(
        ("src", "c", "xs", "radius"),
        [
            ("e^x", 0.0, (0.5, 1.0, -0.7), math.inf),
            ("x", 1.0, (1.3, 0.8, 1.45), 1.0),
            ("x+1", 0.0, (0.3, -0.2, 0.45), 1.0),
        ],
    )
    def test_reconstruction_within_half_radius(self, src, c, xs, radius):
        from starcalc import evaluate

        n = 25
        f = parse(src)
        tp = taylor_coefficients(f, c, n)
        for x in xs:
            u = abs(x - c)
            assert u <= radius / 2 or math.isinf(radius)
            if math.isinf(radius):
                tail = 0.0
            else:
                # geometric bound on the log-series tail sum_{i>n} u^i/i
                tail = u ** (n + 1) / ((n + 1) * (1 - u / radius))
            got = taylor_evaluate(tp, x)
            want = evaluate(f, x)
            assert abs(got - want) <= 10 * tail * max(1.0, abs(want)) + 1e-12


class TestLogIdentity:
    def test_identity_at_one(self):
        # both sides equal 1: d/dx log x at 1, and log(e^(1/x)) at 1
        assert log_identity_residual(parse("x"), 1.0, 1) <= 1e-12

    def test_linear_log(self):
        assert log_identity_residual(parse("e^x"), 0.0, 2) == 0.0

    def test_x_to_x(self):
        # d/dx (x log x) = log x + 1 = log(e x)
        r = log_identity_residual(parse("x^x"), 2.0, 1)
        assert r <= 1e-12

    @pytest.mark.parametrize("src", ["x", "e^x", "x^x"])
    @pytest.mark.parametrize("i", [1, 2, 3, 4, 5, 6])
    def test_residual_tiny_for_all_orders(self, src, i):
        assert log_identity_residual(parse(src), 1.7, i) <= 1e-10

    def test_invalid_order(self):
        with pytest.raises(ValueError):
            log_identity_residual(parse("x"), 1.0, 0)


def test_term_count_property():
    tp = TaylorProduct(0.0, (1.0, 2.0, 3.0), (0.0, math.log(2), math.log(3)))
    assert tp.term_count == 2
