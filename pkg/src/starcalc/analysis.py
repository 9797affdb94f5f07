"""Executable analytic results: mean-value solvers, the randomized
inequality suite, improper-integral classification, the area-integrand
mismatch construction and the multiplicative metric."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .backend import compile_evaluator
from .errors import NoClosedFormError, StarCalcError
from .expr import (
    Add, Constant, Div, Exp, Expression, Log, Mul, X, differentiate,
    evaluate, pow_expr, simplify,
)
from .quad import DEFAULT_SETTINGS, Interval, integrate
from .star import closed_form_entry, star_integral_definite

VIOLATION_TOL = 1e-9


@dataclass(frozen=True)
class InequalityReport:
    inequality: str
    trials: int
    violations: int
    worst_margin: float
    seed: int

    def to_dict(self) -> dict:
        return {
            "inequality": self.inequality,
            "trials": self.trials,
            "violations": self.violations,
            "worstMargin": self.worst_margin,
            "seed": self.seed,
        }


@dataclass(frozen=True)
class MvtResult:
    c: float
    constant_function: bool


@dataclass(frozen=True)
class ImproperClassification:
    converges: bool
    limit: float | None

    def __str__(self):
        if self.converges:
            return f"ConvergesToValue({self.limit})"
        return "DivergesToInfinity"


class NoBracketError(StarCalcError):
    """The scan found no sign change for a non-degenerate target."""


_SCAN_POINTS = 64
_BISECT_WIDTH = 1e-12


def _scan_then_bisect(target_scalar, target_array, a: float, b: float):
    """Leftmost root of a continuous target on (a, b), or None if no
    bracketing sign change is visible on the 64-point interior scan."""
    xs = a + (np.arange(_SCAN_POINTS) + 0.5) * (b - a) / _SCAN_POINTS
    vals = target_array(xs)
    for j in range(_SCAN_POINTS):
        if vals[j] == 0.0:
            return float(xs[j])
        if j + 1 < _SCAN_POINTS and vals[j] * vals[j + 1] < 0.0:
            lo, hi = float(xs[j]), float(xs[j + 1])
            flo = float(vals[j])
            while hi - lo > _BISECT_WIDTH:
                mid = 0.5 * (lo + hi)
                fm = target_scalar(mid)
                if fm == 0.0:
                    return mid
                if flo * fm < 0.0:
                    hi = mid
                else:
                    lo, flo = mid, fm
            return 0.5 * (lo + hi)
    return None


def mvt_star_integral(f: Expression, iv: Interval, tol: float = 1e-8) -> MvtResult:
    """Find c in (a,b) with f(c)^(b-a) equal to the star-integral of f.

    Equivalently log f(c) equals the mean of log f; existence comes from the
    intermediate value theorem.  A numerically constant log f returns the
    midpoint with the constant-function flag set.
    """
    a, b = iv.a, iv.b
    if not a < b:
        raise ValueError("interval must satisfy a < b")
    logf = compile_evaluator(Log(f))
    q = integrate(logf, iv, DEFAULT_SETTINGS)
    mean = q.value / (b - a)

    def scalar(t: float) -> float:
        return math.log(evaluate(f, t)) - mean

    def array(xs: np.ndarray) -> np.ndarray:
        return logf(xs) - mean

    xs = a + (np.arange(_SCAN_POINTS) + 0.5) * (b - a) / _SCAN_POINTS
    spread = float(np.ptp(logf(xs)))
    if spread <= 1e-13 * (1.0 + abs(mean)):
        return MvtResult(0.5 * (a + b), True)

    c = _scan_then_bisect(scalar, array, a, b)
    if c is None:
        return MvtResult(0.5 * (a + b), True)
    if abs(scalar(c)) > tol:
        raise NoBracketError(f"root at {c!r} verifies only to {abs(scalar(c)):.3g}")
    return MvtResult(c, False)


def mvt_star_derivative(f: Expression, iv: Interval, tol: float = 1e-8) -> MvtResult:
    """Find c in (a,b) with f*(c) = (f(b)/f(a))^(1/(b-a)).

    In log form: f'(c)/f(c) equals the mean slope of log f, the ordinary
    mean value theorem for log f.
    """
    a, b = iv.a, iv.b
    if not a < b:
        raise ValueError("interval must satisfy a < b")
    slope = (math.log(evaluate(f, b)) - math.log(evaluate(f, a))) / (b - a)
    ratio = simplify(Div(differentiate(f), f))
    compiled = compile_evaluator(ratio)

    def scalar(t: float) -> float:
        return evaluate(ratio, t) - slope

    def array(xs: np.ndarray) -> np.ndarray:
        return compiled(xs) - slope

    xs = a + (np.arange(_SCAN_POINTS) + 0.5) * (b - a) / _SCAN_POINTS
    spread = float(np.ptp(compiled(xs)))
    if spread <= 1e-13 * (1.0 + abs(slope)):
        return MvtResult(0.5 * (a + b), True)

    c = _scan_then_bisect(scalar, array, a, b)
    if c is None:
        return MvtResult(0.5 * (a + b), True)
    if abs(scalar(c)) > tol:
        raise NoBracketError(f"root at {c!r} verifies only to {abs(scalar(c)):.3g}")
    return MvtResult(c, False)


# ---------------------------------------------------------------------------
# Inequality suite


_CANONICAL_IDS = {
    "concavity": "Concavity_g",
    "concavity_g": "Concavity_g",
    "eq3": "CauchySchwarz_Eq3",
    "cauchyschwarz_eq3": "CauchySchwarz_Eq3",
    "eq4": "Lemma_Eq4",
    "lemma_eq4": "Lemma_Eq4",
    "eq5": "Theorem_Eq5",
    "theorem_eq5": "Theorem_Eq5",
    "amgm": "AMGM_n",
    "amgm_n": "AMGM_n",
}

INEQUALITY_IDS = ("Concavity_g", "CauchySchwarz_Eq3", "Lemma_Eq4", "Theorem_Eq5", "AMGM_n")


def _random_exp_poly(rng: np.random.Generator) -> Expression:
    # exp of a cubic with coefficients in [-1, 1]: positive and smooth by
    # construction, so every draw satisfies the inequality hypotheses
    c = rng.uniform(-1.0, 1.0, size=4)
    poly = Constant(c[0])
    power: Expression = X
    for k in (1, 2, 3):
        poly = Add(poly, Mul(Constant(c[k]), power) if c[k] != 1.0 else power)
        power = Mul(power, X)
    return Exp(poly)


def _random_interval(rng: np.random.Generator) -> Interval:
    a = rng.uniform(-1.5, 1.5)
    return Interval(a, a + rng.uniform(0.1, 1.5))


def _trial_concavity(rng):
    f = _random_exp_poly(rng)
    g = _random_exp_poly(rng)
    s = float(rng.uniform(0.0, 1.0))
    iv = _random_interval(rng)
    blend = Add(Mul(Constant(s), f), Mul(Constant(1.0 - s), g))
    lhs = star_integral_definite(blend, iv).value
    rhs = (
        star_integral_definite(pow_expr(f, Constant(s)), iv).value
        * star_integral_definite(pow_expr(g, Constant(1.0 - s)), iv).value
    )
    return lhs, rhs


def _trial_eq3(rng):
    f = _random_exp_poly(rng)
    g = _random_exp_poly(rng)
    iv = _random_interval(rng)
    lhs = star_integral_definite(Add(f, g), iv).value
    prod = star_integral_definite(Mul(f, g), iv).value
    rhs = 2.0 ** (iv.b - iv.a) * math.sqrt(prod)
    return lhs, rhs


def _trial_eq4(rng):
    gamma, beta, alpha = np.sort(rng.uniform(0.01, 10.0, size=3))
    lhs = (alpha + beta + gamma) ** 2
    rhs = 8.0 * alpha * math.sqrt(beta * gamma)
    return float(lhs), float(rhs)


def _trial_eq5(rng):
    k = int(rng.integers(1, 7))
    a = np.sort(rng.uniform(0.05, 10.0, size=k + 1))
    lhs = float(a.sum()) ** (2.0 ** (k - 1))
    rhs = 2.0 ** (2.0 ** k - 1.0) * math.sqrt(a[0])
    for i in range(1, k + 1):
        rhs *= float(a[i]) ** (2.0 ** (i - 2))
    return lhs, rhs


def _trial_amgm(rng):
    n = int(rng.integers(2, 9))
    a = rng.uniform(0.01, 10.0, size=n)
    lhs = float(a.mean())
    rhs = float(np.exp(np.log(a).mean()))
    return lhs, rhs


_TRIALS = {
    "Concavity_g": _trial_concavity,
    "CauchySchwarz_Eq3": _trial_eq3,
    "Lemma_Eq4": _trial_eq4,
    "Theorem_Eq5": _trial_eq5,
    "AMGM_n": _trial_amgm,
}


def inequality_suite(inequality: str, trials: int, seed: int) -> InequalityReport:
    """Run ``trials`` randomized checks of one inequality.

    Each trial draws inputs satisfying the inequality's hypotheses from a
    per-trial RNG keyed by (seed, trial index), so reports are reproducible
    regardless of execution order.  A trial counts as a violation when
    LHS < RHS - 1e-9*(1+|RHS|).
    """
    key = _CANONICAL_IDS.get(inequality.strip().lower())
    if key is None:
        raise ValueError(
            f"unknown inequality {inequality!r}; choose one of {sorted(set(_CANONICAL_IDS))}"
        )
    trials = int(trials)
    if trials < 1:
        raise ValueError("trials must be >= 1")
    seed = int(seed)
    if seed < 0:
        raise ValueError("seed must be >= 0")
    run = _TRIALS[key]
    violations = 0
    worst = math.inf
    for t in range(trials):
        rng = np.random.default_rng(np.random.SeedSequence(entropy=seed, spawn_key=(t,)))
        lhs, rhs = run(rng)
        margin = (lhs - rhs) / (1.0 + abs(rhs))
        if margin < -VIOLATION_TOL:
            violations += 1
        worst = min(worst, margin)
    return InequalityReport(key, trials, violations, worst, seed)


# ---------------------------------------------------------------------------
# Improper star-integrals of constants


def classify_improper_constant(k: float) -> ImproperClassification:
    """Limit of the star-integral of the constant k over [0, X] as X grows.

    That integral is k^X: it tends to 0 for k < 1, is identically 1 for
    k = 1, and diverges to infinity for k > 1.
    """
    k = float(k)
    if not (k > 0.0) or not math.isfinite(k):
        raise ValueError("k must be a positive finite real")
    if k < 1.0:
        return ImproperClassification(True, 0.0)
    if k == 1.0:
        return ImproperClassification(True, 1.0)
    return ImproperClassification(False, None)


# ---------------------------------------------------------------------------
# Geometric mismatch and the multiplicative metric


def area_integrand(f: Expression) -> Expression:
    """The ordinary derivative of the star-antiderivative: log(f) * F.

    Integrating this with the ordinary integral reproduces F(b) - F(a),
    which differs from the star-integral F(b)/F(a); the construction makes
    that mismatch executable.
    """
    entry = closed_form_entry(f)
    if entry is None:
        raise NoClosedFormError(f"no closed star-antiderivative for {f!r}")
    return simplify(Mul(Log(f), entry.antiderivative))


def mult_metric(x: float, y: float) -> float:
    """max(x/y, y/x): a multiplicative distance on the positive reals.

    Satisfies d >= 1 with equality iff x == y, symmetry, and the
    multiplicative triangle inequality d(x,z) <= d(x,y)*d(y,z).
    """
    x = float(x)
    y = float(y)
    if not (x > 0.0 and y > 0.0):
        raise ValueError("mult_metric requires positive inputs")
    return max(x / y, y / x)
