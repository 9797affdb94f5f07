"""Product-form Taylor expansions.

A positive function expands around ``c`` as the product
``prod_i a_i ** ((x-c)^i)`` with ``a_0 = f(c)`` and, for i >= 1,
``a_i = exp((d^i/dx^i log f)(c) / i!)`` — equivalently the i-th
star-derivative raised to ``1/i!``.  Taking logs turns the product into the
ordinary Taylor series of log f, which is how both construction and
evaluation work internally (storing the raw log-series coefficients avoids
exp/log round-trips; the public ``coefficients`` are the ``a_i``).
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field

from .errors import CoefficientOverflowError, DomainReason, EvalDomainError
from .expr import Expression, Log, differentiate, evaluate, simplify
from .star import star_derivative


class SeriesDivergenceWarning(UserWarning):
    """Partial sums are growing; the point is likely outside convergence."""


@dataclass(frozen=True)
class TaylorProduct:
    center: float
    coefficients: tuple[float, ...]       # a_0 .. a_n, all positive
    log_coefficients: tuple[float, ...] = field(repr=False)  # log(a_i)

    @property
    def term_count(self) -> int:
        return len(self.coefficients) - 1


def taylor_coefficients(f: Expression, c: float, n: int) -> TaylorProduct:
    """Coefficients a_0..a_n of the product expansion of ``f`` around ``c``."""
    c = float(c)
    n = int(n)
    if n < 0:
        raise ValueError("n must be >= 0")
    fc = evaluate(f, c)
    if fc <= 0.0:
        raise EvalDomainError("log", c, DomainReason.LOG_NON_POSITIVE)

    log_coeffs = [math.log(fc)]
    deriv = simplify(Log(f))
    factorial = 1.0
    for i in range(1, n + 1):
        deriv = simplify(differentiate(deriv))
        factorial *= i
        raw = evaluate(deriv, c)
        b = raw / factorial
        if abs(b) > 709.0:
            raise CoefficientOverflowError(
                f"|d^{i} log f({c!r})|/{i}! = {abs(b):.3g} exceeds exp() range"
            )
        log_coeffs.append(b)

    coeffs = (fc,) + tuple(math.exp(b) for b in log_coeffs[1:])
    return TaylorProduct(c, coeffs, tuple(log_coeffs))


def taylor_evaluate(tp: TaylorProduct, x: float) -> float:
    """Evaluate the product expansion at ``x``.

    Overflow of the exponent returns ``inf`` (the divergent-to-infinity
    marker); points that appear to lie outside the convergence region raise
    :class:`SeriesDivergenceWarning` but still return the partial value.
    """
    x = float(x)
    u = x - tp.center
    total = 0.0
    magnitudes = []
    power = 1.0
    for b in tp.log_coefficients:
        term = b * power
        total += term
        magnitudes.append(abs(term))
        power *= u
    tail = [m for m in magnitudes[-3:] if m > 0.0]
    if len(tail) == 3 and tail[0] < tail[1] < tail[2]:
        warnings.warn(
            "trailing terms are growing; point may be outside the "
            "convergence region",
            SeriesDivergenceWarning,
            stacklevel=2,
        )
    if total > 709.0:
        return math.inf
    return math.exp(total)


def log_identity_residual(f: Expression, c: float, i: int) -> float:
    """|d^i/dx^i log f at c  -  log(i-th star-derivative of f at c)|.

    The two sides are the same object written differently; the residual is
    pure floating-point noise.
    """
    c = float(c)
    i = int(i)
    if i < 1:
        raise ValueError("i must be >= 1")
    deriv = simplify(Log(f))
    for _ in range(i):
        deriv = simplify(differentiate(deriv))
    lhs = evaluate(deriv, c)
    rhs = math.log(star_derivative(f, c, order=i, method="symbolic"))
    return abs(lhs - rhs)
