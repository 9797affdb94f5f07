import math

import numpy as np
import pytest

from starcalc import (
    Add, Constant, EvalDomainError, Exp, Interval, Log, Mul, NonConvergenceError,
    Pow, QuadSettings, StarClass, X,
    by_parts_residual, closed_form_entry, evaluate, ftc_evaluate, parse,
    pow_expr, simplify, star_derivative, star_derivative_closed,
    star_integral_closed, star_integral_definite,
)

E = math.e

# the seven tabulated integrand patterns, with safe evaluation bands
TABLE_CASES = [
    ("x^2", "PowerN", (0.4, 3.0)),
    ("e^x", "ExpX", (-1.5, 2.0)),
    ("e^(2/x)", "ExpKOverX", (0.4, 3.0)),
    ("e^(e^x)", "ExpExpX", (-1.5, 1.5)),
    ("x^x", "XToX", (0.4, 3.0)),
    ("3^x", "AToX", (-1.5, 2.0)),
    ("2*x+3", "Linear", (0.4, 3.0)),
]


def _random_positive_expr(rng):
    c = rng.uniform(-1.0, 1.0, size=3)
    poly = Constant(float(c[0]))
    poly = Add(poly, Mul(Constant(float(c[1])), X))
    poly = Add(poly, Mul(Constant(float(c[2])), Mul(X, X)))
    return Exp(poly)


class TestStarIntegralDefinite:
    def test_identity_function(self):
        r = star_integral_definite(parse("x"), Interval(0.0, 1.0))
        assert r.star_class is StarClass.FINITE
        assert r.value == pytest.approx(1 / E, abs=1e-9)

    def test_exp_reciprocal(self):
        r = star_integral_definite(parse("e^(1/x)"), Interval(1.0, 2.0))
        assert r.value == pytest.approx(2.0, abs=1e-10)

    def test_linear_shift_against_closed_form_oracle(self):
        # oracle: antiderivative ((x+1)/e)^x * (x+1) evaluated at both ends
        F = parse("((x+1)/e)^x * (x+1)")
        expected = evaluate(F, 1.0) / evaluate(F, 0.0)
        assert expected == pytest.approx(4 / E, rel=1e-12)
        r = star_integral_definite(parse("x+1"), Interval(0.0, 1.0))
        assert r.value == pytest.approx(expected, rel=1e-10)

    def test_empty_interval_is_exactly_one(self):
        r = star_integral_definite(parse("log(x)"), Interval(2.0, 2.0))
        assert r.value == 1.0
        assert r.star_class is StarClass.FINITE

    def test_negative_integrand_raises_domain_error(self):
        with pytest.raises(EvalDomainError):
            star_integral_definite(parse("x-10"), Interval(0.0, 1.0))

    def test_divergence_to_infinity(self):
        # inner log-integral is 1000*log(3) ~ 1099 > 709: exp() would overflow
        r = star_integral_definite(Constant(3.0), Interval(0.0, 1000.0))
        assert r.star_class is StarClass.DIVERGENT_TO_INFINITY
        assert r.value == math.inf

    def test_divergence_to_zero(self):
        r = star_integral_definite(Constant(1.0 / 3.0), Interval(0.0, 1000.0))
        assert r.star_class is StarClass.DIVERGENT_TO_ZERO
        assert r.value == 0.0

    def test_nonconvergence_raises(self):
        with pytest.raises(NonConvergenceError):
            star_integral_definite(
                parse("x"), Interval(1.0, 2.0), QuadSettings(max_levels=1)
            )

    def test_log_homomorphism_on_random_cases(self):
        from starcalc import integrate

        rng = np.random.default_rng(17)
        for _ in range(50):
            f = _random_positive_expr(rng)
            a = rng.uniform(-1.0, 1.0)
            iv = Interval(a, a + rng.uniform(0.2, 1.5))
            star = star_integral_definite(f, iv).value
            from starcalc import compile_evaluator

            plain = integrate(compile_evaluator(Log(f)), iv).value
            assert math.log(star) == pytest.approx(plain, rel=1e-10, abs=1e-12)

    def test_monotonicity(self):
        rng = np.random.default_rng(23)
        for _ in range(20):
            f = _random_positive_expr(rng)
            bump = Exp(Mul(Constant(float(rng.uniform(-1, 1))), X))
            g = Add(f, bump)  # g > f pointwise
            iv = Interval(0.0, float(rng.uniform(0.3, 1.5)))
            assert (
                star_integral_definite(f, iv).value
                <= star_integral_definite(g, iv).value * (1 + 1e-12)
            )

    def test_power_rule(self):
        rng = np.random.default_rng(29)
        iv = Interval(0.2, 1.1)
        for _ in range(10):
            f = _random_positive_expr(rng)
            g = _random_positive_expr(rng)
            n = float(rng.uniform(-3.0, 3.0))
            m = float(rng.uniform(-3.0, 3.0))
            lhs = star_integral_definite(
                Mul(pow_expr(f, Constant(n)), pow_expr(g, Constant(m))), iv
            ).value
            rhs = (
                star_integral_definite(f, iv).value ** n
                * star_integral_definite(g, iv).value ** m
            )
            assert lhs == pytest.approx(rhs, rel=1e-9)

    def test_constant_rule_definite(self):
        rng = np.random.default_rng(31)
        for _ in range(10):
            f = _random_positive_expr(rng)
            c = float(rng.uniform(0.2, 4.0))
            a = float(rng.uniform(-1.0, 0.0))
            b = a + float(rng.uniform(0.3, 1.5))
            iv = Interval(a, b)
            lhs = star_integral_definite(Mul(Constant(c), f), iv).value
            rhs = c ** (b - a) * star_integral_definite(f, iv).value
            assert lhs == pytest.approx(rhs, rel=1e-10)

    def test_reversal(self):
        rng = np.random.default_rng(37)
        for _ in range(10):
            f = _random_positive_expr(rng)
            iv = Interval(0.1, 1.3)
            fwd = star_integral_definite(f, iv).value
            rev = star_integral_definite(f, Interval(iv.b, iv.a)).value
            assert rev == pytest.approx(1.0 / fwd, rel=1e-10)

    def test_chaining(self):
        rng = np.random.default_rng(41)
        for _ in range(10):
            f = _random_positive_expr(rng)
            a, b, c = np.sort(rng.uniform(-1.0, 1.5, size=3))
            whole = star_integral_definite(f, Interval(a, c)).value
            split = (
                star_integral_definite(f, Interval(a, b)).value
                * star_integral_definite(f, Interval(b, c)).value
            )
            assert whole == pytest.approx(split, rel=1e-10)


class TestClosedFormTable:
    @pytest.mark.parametrize(("src", "pattern", "band"), TABLE_CASES)
    def test_patterns_match(self, src, pattern, band):
        entry = closed_form_entry(parse(src))
        assert entry is not None
        assert entry.pattern == pattern

    @pytest.mark.parametrize(("src", "pattern", "band"), TABLE_CASES)
    def test_ftc_roundtrip(self, src, pattern, band):
        f = parse(src)
        F = star_integral_closed(f)
        fstar = star_derivative_closed(F)
        for x in np.linspace(band[0], band[1], 20):
            got = evaluate(fstar, float(x))
            want = evaluate(f, float(x))
            assert got == pytest.approx(want, rel=1e-9), (src, x)

    def test_power_n(self):
        # closed form: the star-antiderivative of x^n is C*(x/e)^(n*x)
        F = star_integral_closed(parse("x^3"))
        for x in (0.5, 1.0, 2.0):
            assert evaluate(F, x) == pytest.approx((x / E) ** (3 * x), rel=1e-12)

    def test_exp_k_over_x(self):
        assert star_integral_closed(parse("e^(2/x)")) == Pow(X, Constant(2.0))

    def test_x_to_x(self):
        F = star_integral_closed(parse("x^x"))
        for x in (0.5, 1.0, 2.0):
            assert evaluate(F, x) == pytest.approx(
                (x * x / E) ** (x * x / 4), rel=1e-12
            )

    def test_no_match_returns_none(self):
        assert star_integral_closed(parse("log(x)")) is None
        assert star_integral_closed(parse("x^2+x")) is None

    def test_constant_entry(self):
        F = star_integral_closed(parse("5"))
        for x in (0.0, 1.0, 2.5):
            assert evaluate(F, x) == pytest.approx(5.0 ** x, rel=1e-12)

    def test_definite_against_quadrature(self):
        # closed antiderivative and the quadrature route agree through F(b)/F(a)
        for src, _, band in TABLE_CASES:
            f = parse(src)
            F = star_integral_closed(f)
            a, b = band[0] + 0.1, band[0] + 0.9
            want = star_integral_definite(f, Interval(a, b)).value
            got = ftc_evaluate(F, Interval(a, b))
            assert got == pytest.approx(want, rel=1e-9), src


class TestStarDerivative:
    def test_identity_at_two(self):
        assert star_derivative(parse("x"), 2.0) == pytest.approx(
            math.exp(0.5), rel=1e-12
        )

    def test_exp_is_constant_e(self):
        for x in (-1.0, 0.0, 2.5):
            assert star_derivative(parse("e^x"), x) == pytest.approx(E, rel=1e-12)

    def test_x_to_x(self):
        assert star_derivative(parse("x^x"), 3.0) == pytest.approx(3 * E, rel=1e-12)

    @pytest.mark.parametrize("src", ["x", "e^x", "x^2", "x+1", "x^x", "e^(1/x)"])
    def test_methods_agree_order_one(self, src):
        f = parse(src)
        for x in (0.6, 1.1, 2.3):
            s = star_derivative(f, x, order=1, method="symbolic")
            n = star_derivative(f, x, order=1, method="numeric")
            assert n == pytest.approx(s, rel=1e-6), (src, x)

    @pytest.mark.parametrize("order", [2, 3])
    @pytest.mark.parametrize("src", ["x", "x^x", "e^(1/x)"])
    def test_methods_agree_higher_orders(self, src, order):
        f = parse(src)
        for x in (0.8, 1.7):
            s = star_derivative(f, x, order=order, method="symbolic")
            n = star_derivative(f, x, order=order, method="numeric")
            assert n == pytest.approx(s, rel=1e-4), (src, x, order)

    def test_one_sided_quotient(self):
        v = star_derivative(parse("x"), 2.0, method="numeric", one_sided=True)
        assert v == pytest.approx(math.exp(0.5), rel=1e-4)

    def test_invalid_arguments(self):
        with pytest.raises(ValueError):
            star_derivative(parse("x"), 1.0, order=0)
        with pytest.raises(ValueError):
            star_derivative(parse("x"), 1.0, method="magic")

    def test_domain_error_near_nonpositive(self):
        with pytest.raises(EvalDomainError):
            star_derivative(parse("log(x)"), 0.5, method="numeric")
        # log(0.5) < 0, so the geometric quotient is undefined there


class TestStarDerivativeClosed:
    def test_constant_is_one(self):
        assert star_derivative_closed(Constant(7.5)) == Constant(1.0)

    def test_linear(self):
        f = parse("2*x+3")
        fstar = star_derivative_closed(f)
        for x in (0.0, 1.0, 4.0):
            assert evaluate(fstar, x) == pytest.approx(
                math.exp(2 / (2 * x + 3)), rel=1e-12
            )

    def test_double_exponential_self_reproducing(self):
        f = parse("e^(e^x)")
        assert star_derivative_closed(f) == f

    def test_exponent_rule(self):
        # (f^g)* = f^(g') * (f*)^g, checked pointwise
        rng = np.random.default_rng(43)
        f = parse("x+1")
        g = parse("x^2")
        lhs = star_derivative_closed(pow_expr(f, g))
        fstar = star_derivative_closed(f)
        from starcalc import differentiate

        rhs = Mul(pow_expr(f, simplify(differentiate(g))), pow_expr(fstar, g))
        for _ in range(10):
            x = float(rng.uniform(0.2, 2.0))
            assert evaluate(lhs, x) == pytest.approx(evaluate(rhs, x), rel=1e-9)


class TestFtc:
    def test_power_antiderivative(self):
        # (2/e)^2 / (1/e) = 4/e
        F = parse("(x/e)^x")
        assert ftc_evaluate(F, Interval(1.0, 2.0)) == pytest.approx(4 / E, rel=1e-12)

    def test_against_definite_quadrature(self):
        F = parse("e^(x^2/2)")
        want = star_integral_definite(parse("e^x"), Interval(0.0, 1.0)).value
        assert ftc_evaluate(F, Interval(0.0, 1.0)) == pytest.approx(want, rel=1e-10)
        assert ftc_evaluate(F, Interval(0.0, 1.0)) == pytest.approx(
            math.exp(0.5), rel=1e-12
        )

    def test_empty_interval(self):
        assert ftc_evaluate(parse("(x/e)^x"), Interval(2.0, 2.0)) == 1.0

    def test_zero_at_lower_end_raises(self):
        with pytest.raises(EvalDomainError):
            ftc_evaluate(parse("x"), Interval(0.0, 1.0))


class TestByParts:
    @pytest.mark.parametrize(
        ("f", "g", "x"),
        [("x", "x", 2.0), ("e^x", "x^2", 1.0), ("x+1", "x^2+x", 0.7)],
    )
    def test_residual_vanishes(self, f, g, x):
        r = by_parts_residual(parse(f), parse(g), x)
        assert r <= 1e-10

    def test_constant_g(self):
        assert by_parts_residual(parse("x+1"), Constant(4.0), 1.3) == 0.0
