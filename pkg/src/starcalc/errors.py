"""Exception types shared across the package."""

from __future__ import annotations

from enum import Enum


class StarCalcError(Exception):
    """Base class for all package-specific errors."""


class DomainReason(Enum):
    LOG_NON_POSITIVE = "LogNonPositive"
    DIV_BY_ZERO = "DivByZero"
    POW_INDETERMINATE = "PowIndeterminate"
    SQRT_NEGATIVE = "SqrtNegative"


class ParseError(StarCalcError):
    """Syntax error with byte offset and the set of tokens that were legal there."""

    def __init__(self, message: str, offset: int, expected=()):
        self.offset = int(offset)
        self.expected = frozenset(expected)
        detail = f"{message} at offset {self.offset}"
        if self.expected:
            detail += f" (expected: {', '.join(sorted(self.expected))})"
        super().__init__(detail)


class EvalDomainError(StarCalcError):
    """Evaluation left the expression's domain at a concrete point."""

    def __init__(self, node_kind: str, point: float, reason: DomainReason):
        self.node_kind = node_kind
        self.point = float(point)
        self.reason = reason
        super().__init__(f"{reason.value} in {node_kind} at x={self.point!r}")


class NonFiniteSampleError(StarCalcError):
    """The integrand returned NaN at an interior sample point."""

    def __init__(self, point: float):
        self.point = float(point)
        super().__init__(f"integrand returned NaN at x={self.point!r}")


class NonPositiveSampleError(StarCalcError):
    """A product-Riemann sample was <= 0 (or NaN)."""

    def __init__(self, point: float):
        self.point = float(point)
        super().__init__(f"non-positive sample at t={self.point!r}")


class NonConvergenceError(StarCalcError):
    """Quadrature levels were exhausted before the tolerance was met."""

    def __init__(self, value: float, error_estimate: float):
        self.value = float(value)
        self.error_estimate = float(error_estimate)
        super().__init__(
            f"quadrature did not converge (best estimate {self.value!r}, "
            f"error ~{self.error_estimate:.3g})"
        )


class NoClosedFormError(StarCalcError):
    """The integrand matches no entry of the closed-form table."""


class StepUnderflowError(StarCalcError):
    """Finite-difference step collapsed below the representable floor."""


class TransformDomainError(StarCalcError):
    """Input outside the validity domain of a G-transform integral."""


class CoefficientOverflowError(StarCalcError):
    """A product-series coefficient exponent exceeded the double range."""
