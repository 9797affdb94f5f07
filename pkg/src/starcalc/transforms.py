"""Generalized integrals G(integral of G^{-1}(f)) and nested star-integrals.

Conjugating the ordinary integral by an invertible monotone map G gives a
family of integrals: G = exp recovers the star-integral, G = identity the
ordinary integral, and log / square give two further named members.  The
square transform uses the positive root and therefore requires f >= 0 and a
forward-oriented interval.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable

import numpy as np

from .backend import compile_evaluator
from .errors import (
    DomainReason,
    EvalDomainError,
    NonConvergenceError,
    NonFiniteSampleError,
    TransformDomainError,
)
from .expr import Exp, Expression, Log, Sqrt
from .quad import DEFAULT_SETTINGS, Interval, QuadSettings, integrate
from .star import LOG_OVERFLOW, LOG_UNDERFLOW


@dataclass(frozen=True)
class GTransform:
    """Invertible map G with its inverse and the inverse's validity domain."""

    name: str
    forward: Callable[[float], float]
    inverse: Callable[[float], float]
    in_domain: Callable[[float], bool]
    compose_inverse: Callable[[Expression], Expression]
    domain_reason: DomainReason | None = None


def _exp_saturating(v: float) -> float:
    try:
        return math.exp(v)
    except OverflowError:
        return math.inf


EXP = GTransform(
    name="Exp",
    forward=_exp_saturating,
    inverse=math.log,
    in_domain=lambda y: y > 0.0,
    compose_inverse=Log,
    domain_reason=DomainReason.LOG_NON_POSITIVE,
)

IDENTITY = GTransform(
    name="Identity",
    forward=lambda u: u,
    inverse=lambda y: y,
    in_domain=lambda y: True,
    compose_inverse=lambda f: f,
)

LOG = GTransform(
    name="Log",
    forward=math.log,
    inverse=_exp_saturating,
    in_domain=lambda y: True,
    compose_inverse=Exp,
)

SQUARE = GTransform(
    name="Square",
    forward=lambda u: u * u,
    inverse=math.sqrt,
    in_domain=lambda y: y >= 0.0,
    compose_inverse=Sqrt,
    domain_reason=DomainReason.SQRT_NEGATIVE,
)

TRANSFORMS = {"exp": EXP, "id": IDENTITY, "log": LOG, "square": SQUARE}


def g_integral(
    f: Expression,
    transform: GTransform,
    iv: Interval,
    settings: QuadSettings = DEFAULT_SETTINGS,
) -> float:
    """G(integral of G^{-1}(f(x))) over ``iv``."""
    if transform.name == "Square" and iv.a > iv.b:
        raise TransformDomainError(
            "the Square transform has no sign convention for reversed intervals"
        )
    integrand = compile_evaluator(transform.compose_inverse(f))
    try:
        q = integrate(integrand, iv, settings)
    except NonFiniteSampleError as exc:
        reason = transform.domain_reason or DomainReason.POW_INDETERMINATE
        raise EvalDomainError(transform.name.lower(), exc.point, reason) from exc
    if not q.converged:
        raise NonConvergenceError(q.value, q.error_estimate)
    return transform.forward(q.value)


def double_star_integral(
    f,
    inner_lower: float,
    iv: Interval,
    settings: QuadSettings = DEFAULT_SETTINGS,
) -> float:
    """Nested star-integral: outer over y in ``iv`` of the inner star-integral
    of f(., y) from ``inner_lower`` to y.

    ``f(xs, y)`` is a two-argument positive function, vectorized over its
    first argument.  In log space this is exp of the iterated double
    integral of log f; the cost is quadratic in the quadrature effort.
    Divergence beyond the exp() range is reported as 0.0 / inf.
    """
    inner_lower = float(inner_lower)

    def inner_log(y: float) -> float:
        def integrand(xs: np.ndarray) -> np.ndarray:
            with np.errstate(all="ignore"):
                return np.log(np.asarray(f(xs, y), dtype=np.float64))

        q = integrate(integrand, Interval(inner_lower, y), settings)
        if not q.converged:
            raise NonConvergenceError(q.value, q.error_estimate)
        return q.value

    def outer_integrand(ys) -> np.ndarray:
        return np.array([inner_log(float(t)) for t in np.atleast_1d(ys)])

    q = integrate(outer_integrand, iv, settings)
    if q.value < LOG_UNDERFLOW:
        return 0.0
    if q.value > LOG_OVERFLOW:
        return math.inf
    if not q.converged:
        raise NonConvergenceError(math.exp(q.value), q.error_estimate)
    return math.exp(q.value)
