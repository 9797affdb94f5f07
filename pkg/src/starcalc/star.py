"""Star-integrals and star-derivatives.

The star-integral (multiplicative integral) of a positive function is
``exp(integral of log f)``; the star-derivative (geometric derivative) is
``exp(f'/f)``, the limit of ``(f(x+h)/f(x))^(1/h)``.  This module holds the
definite evaluator, the closed-form antiderivative table, the numeric and
symbolic star-derivatives, the fundamental-theorem evaluator ``F(b)/F(a)``
and the integration-by-parts residual.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum

from .backend import compile_evaluator
from .errors import (
    DomainReason,
    EvalDomainError,
    NonConvergenceError,
    NonFiniteSampleError,
    StepUnderflowError,
)
from .expr import (
    Add, Constant, Div, E, Exp, Expression, Log, Mul, Neg, Pow, Sqrt, Sub,
    Variable, X, differentiate, evaluate, pow_expr, simplify,
)
from .quad import DEFAULT_SETTINGS, Interval, QuadSettings, integrate

# exp() saturates outside these bounds; the inner log-integral is classified
# as divergent rather than silently returning 0.0 or inf from a Finite label
LOG_UNDERFLOW = -708.0
LOG_OVERFLOW = 709.0

_EPS = 2.0 ** -52
_H_FLOOR = 2.0 ** -40


class StarClass(Enum):
    FINITE = "Finite"
    DIVERGENT_TO_ZERO = "DivergentToZero"
    DIVERGENT_TO_INFINITY = "DivergentToInfinity"


@dataclass(frozen=True)
class StarResult:
    value: float
    star_class: StarClass
    error_estimate: float


@dataclass(frozen=True)
class ClosedFormEntry:
    """One row of the closed-form star-antiderivative table (C fixed to 1)."""

    pattern: str
    params: dict
    antiderivative: Expression


def star_integral_definite(
    f: Expression,
    iv: Interval,
    settings: QuadSettings = DEFAULT_SETTINGS,
) -> StarResult:
    """exp(integral of log f) over ``iv`` with divergence classification.

    ``a == b`` returns exactly 1 (the empty product).  Sampling log f where
    f <= 0 on more than a negligible set raises :class:`EvalDomainError`.
    """
    if iv.a == iv.b:
        return StarResult(1.0, StarClass.FINITE, 0.0)
    integrand = compile_evaluator(Log(f))
    try:
        q = integrate(integrand, iv, settings)
    except NonFiniteSampleError as exc:
        raise EvalDomainError("log", exc.point, DomainReason.LOG_NON_POSITIVE) from exc
    if q.value < LOG_UNDERFLOW:
        return StarResult(0.0, StarClass.DIVERGENT_TO_ZERO, 0.0)
    if q.value > LOG_OVERFLOW:
        return StarResult(math.inf, StarClass.DIVERGENT_TO_INFINITY, math.inf)
    if not q.converged:
        raise NonConvergenceError(math.exp(q.value), q.error_estimate)
    value = math.exp(q.value)
    return StarResult(value, StarClass.FINITE, abs(value) * q.error_estimate)


# ---------------------------------------------------------------------------
# Closed-form table


def _mul_c(c: float, e: Expression) -> Expression:
    if c == 1.0:
        return e
    if c == -1.0:
        return Neg(e)
    return Mul(Constant(c), e)


def _linear_tree(a: float, b: float) -> Expression:
    if a == 0.0:
        return Constant(b)
    if b == 0.0:
        return _mul_c(a, X)
    return Add(_mul_c(a, X), Constant(b))


def _linear_coeffs(e: Expression):
    """Read e as a*x + b, or return None if it is not linear."""
    if isinstance(e, Constant):
        return 0.0, e.value
    if isinstance(e, Variable):
        return 1.0, 0.0
    if isinstance(e, Neg):
        inner = _linear_coeffs(e.arg)
        if inner is None:
            return None
        return -inner[0], -inner[1]
    if isinstance(e, (Add, Sub)):
        lhs = _linear_coeffs(e.left)
        rhs = _linear_coeffs(e.right)
        if lhs is None or rhs is None:
            return None
        sign = 1.0 if isinstance(e, Add) else -1.0
        return lhs[0] + sign * rhs[0], lhs[1] + sign * rhs[1]
    if isinstance(e, Mul):
        if isinstance(e.left, Constant):
            inner = _linear_coeffs(e.right)
            c = e.left.value
        elif isinstance(e.right, Constant):
            inner = _linear_coeffs(e.left)
            c = e.right.value
        else:
            return None
        if inner is None:
            return None
        return c * inner[0], c * inner[1]
    if isinstance(e, Div) and isinstance(e.right, Constant) and e.right.value != 0.0:
        inner = _linear_coeffs(e.left)
        if inner is None:
            return None
        return inner[0] / e.right.value, inner[1] / e.right.value
    return None


def _match_power_n(g: Expression):
    if isinstance(g, Variable):
        return 1.0
    if isinstance(g, Pow) and isinstance(g.base, Variable) and isinstance(g.exponent, Constant):
        return g.exponent.value
    if isinstance(g, Sqrt) and isinstance(g.arg, Variable):
        return 0.5
    return None


def _match_k_over_x(arg: Expression):
    # shapes produced by parse/simplify for k/x
    if isinstance(arg, Div) and isinstance(arg.left, Constant) and isinstance(arg.right, Variable):
        return arg.left.value
    if (
        isinstance(arg, Pow)
        and isinstance(arg.base, Variable)
        and arg.exponent == Constant(-1.0)
    ):
        return 1.0
    if isinstance(arg, Mul) and isinstance(arg.left, Constant):
        inner = _match_k_over_x(arg.right)
        if inner is not None:
            return arg.left.value * inner
    return None


def _match_c_times_x(arg: Expression):
    if isinstance(arg, Mul):
        if isinstance(arg.left, Constant) and isinstance(arg.right, Variable):
            return arg.left.value
        if isinstance(arg.right, Constant) and isinstance(arg.left, Variable):
            return arg.right.value
    return None


def _is_x_log_x(arg: Expression) -> bool:
    if isinstance(arg, Mul):
        l, r = arg.left, arg.right
        if isinstance(l, Variable) and isinstance(r, Log) and isinstance(r.arg, Variable):
            return True
        if isinstance(r, Variable) and isinstance(l, Log) and isinstance(l.arg, Variable):
            return True
    return False


def closed_form_entry(f: Expression) -> ClosedFormEntry | None:
    """Match ``f`` against the antiderivative table, or return None."""
    g = simplify(f)

    n = _match_power_n(g)
    if n is not None:
        anti = pow_expr(Div(X, E), _mul_c(n, X))
        return ClosedFormEntry("PowerN", {"n": n}, anti)

    if isinstance(g, Exp):
        arg = g.arg
        if isinstance(arg, Exp) and isinstance(arg.arg, Variable):
            return ClosedFormEntry("ExpExpX", {}, Exp(Exp(X)))
        if isinstance(arg, Variable):
            return ClosedFormEntry("ExpX", {}, Exp(Div(Pow(X, Constant(2.0)), Constant(2.0))))
        k = _match_k_over_x(arg)
        if k is not None:
            anti = X if k == 1.0 else Pow(X, Constant(k))
            return ClosedFormEntry("ExpKOverX", {"k": k}, anti)
        if _is_x_log_x(arg):
            x2 = Pow(X, Constant(2.0))
            anti = pow_expr(Div(x2, E), Div(x2, Constant(4.0)))
            return ClosedFormEntry("XToX", {}, anti)
        c = _match_c_times_x(arg)
        if c is not None:
            a = math.exp(c)
            if math.isfinite(a) and a > 0.0:
                anti = pow_expr(Constant(a), Div(Pow(X, Constant(2.0)), Constant(2.0)))
                return ClosedFormEntry("AToX", {"a": a}, anti)

    lin = _linear_coeffs(g)
    if lin is not None:
        a, b = lin
        if a == 0.0:
            if b <= 0.0:
                return None
            anti = simplify(pow_expr(Constant(b), X))
            return ClosedFormEntry("Linear", {"a": 0.0, "b": b}, anti)
        line = _linear_tree(a, b)
        anti = pow_expr(Div(line, E), X)
        if b != 0.0:
            anti = Mul(anti, Pow(line, Constant(b / a)))
        return ClosedFormEntry("Linear", {"a": a, "b": b}, anti)

    return None


def star_integral_closed(f: Expression) -> Expression | None:
    """Closed-form star-antiderivative with C = 1, or None when unmatched."""
    entry = closed_form_entry(f)
    return entry.antiderivative if entry is not None else None


# ---------------------------------------------------------------------------
# Star-derivatives


def star_derivative_closed(f: Expression) -> Expression:
    """The symbolic star-derivative exp(f'/f), simplified."""
    return simplify(Exp(Div(differentiate(f), f)))


def _log_derivative_chain(f: Expression, order: int) -> Expression:
    d = simplify(Log(f))
    for _ in range(order):
        d = simplify(differentiate(d))
    return d


def _central_stencil(order: int):
    # binomial central differences; odd orders use half-integer offsets
    coeffs = []
    offsets = []
    for j in range(order + 1):
        coeffs.append((-1.0) ** j * math.comb(order, j))
        offsets.append(order / 2.0 - j)
    return coeffs, offsets


def star_derivative(
    f: Expression,
    x: float,
    order: int = 1,
    method: str = "symbolic",
    one_sided: bool = False,
) -> float:
    """Order-``order`` star-derivative of ``f`` at ``x``.

    ``symbolic`` evaluates exp(d^order/dx^order log f) through repeated
    symbolic differentiation.  ``numeric`` uses the central geometric
    quotient ``(f(x+h)/f(x-h))^(1/(2h))`` at order 1 (the defining one-sided
    quotient behind ``one_sided=True``) and a central stencil on log f for
    higher orders.
    """
    x = float(x)
    order = int(order)
    if order < 1:
        raise ValueError("order must be >= 1")
    if not math.isfinite(x):
        raise ValueError("x must be finite")
    if method == "symbolic":
        v = evaluate(_log_derivative_chain(f, order), x)
        try:
            return math.exp(v)
        except OverflowError:
            return math.inf
    if method != "numeric":
        raise ValueError(f"unknown method {method!r}")

    def sample(t: float) -> float:
        v = evaluate(f, t)
        if v <= 0.0:
            raise EvalDomainError("log", t, DomainReason.LOG_NON_POSITIVE)
        return v

    if order == 1:
        h = max(_EPS ** (1.0 / 3.0) * (1.0 + abs(x)), _H_FLOOR)
        if h < _H_FLOOR * (1.0 + abs(x)) * 0.5:
            raise StepUnderflowError(f"step {h!r} underflowed at x={x!r}")
        if one_sided:
            exponent = math.log(sample(x + h) / sample(x)) / h
        else:
            exponent = math.log(sample(x + h) / sample(x - h)) / (2.0 * h)
        try:
            return math.exp(exponent)
        except OverflowError:
            return math.inf

    # 0.3 shrinks truncation error ~10x while roundoff stays subdominant
    h = max(0.3 * _EPS ** (1.0 / (order + 2.0)) * (1.0 + abs(x)), _H_FLOOR)
    if h < _H_FLOOR * (1.0 + abs(x)) * 0.5:
        raise StepUnderflowError(f"step {h!r} underflowed at x={x!r}")
    coeffs, offsets = _central_stencil(order)
    acc = 0.0
    for c, o in zip(coeffs, offsets):
        acc += c * math.log(sample(x + o * h))
    try:
        return math.exp(acc / h ** order)
    except OverflowError:
        return math.inf


# ---------------------------------------------------------------------------
# Fundamental theorem and integration by parts


def ftc_evaluate(F: Expression, iv: Interval) -> float:
    """F(b)/F(a): the definite star-integral from its star-antiderivative.

    Endpoint values must be finite and F(a) nonzero; removable forms at an
    endpoint (e.g. a limit value) must be resolved by the caller before
    invoking this.
    """
    if iv.a == iv.b:
        return 1.0
    fa = evaluate(F, iv.a)
    if fa == 0.0:
        raise EvalDomainError("div", iv.a, DomainReason.DIV_BY_ZERO)
    return evaluate(F, iv.b) / fa


def by_parts_residual(f: Expression, g: Expression, x: float) -> float:
    """|g'*log f - (g*log f)' + g*f'/f| at ``x``.

    This is the derivative form of the star-integration-by-parts identity;
    it vanishes identically, so the returned number measures only rounding.
    """
    x = float(x)
    dg = differentiate(g)
    term_a = evaluate(Mul(dg, Log(f)), x)
    term_b = evaluate(differentiate(Mul(g, Log(f))), x)
    term_c = evaluate(Mul(g, Div(differentiate(f), f)), x)
    return abs(term_a - term_b + term_c)
