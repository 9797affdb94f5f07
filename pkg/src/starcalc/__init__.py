"""Multiplicative ("star") calculus engine.

Star-integrals (product integrals), star-derivatives (geometric
derivatives), their closed forms and product-form Taylor expansions, plus a
tanh-sinh integrator, G-transform generalizations, executable mean-value
theorems and a randomized inequality suite.  Everything is pure and
immutable; expression evaluation over sample arrays runs on a numba kernel
with a numpy fallback (``STARCALC_BACKEND`` selects).
"""

__version__ = "0.1.0"

from .analysis import (
    ImproperClassification,
    InequalityReport,
    MvtResult,
    NoBracketError,
    area_integrand,
    classify_improper_constant,
    inequality_suite,
    INEQUALITY_IDS,
    mult_metric,
    mvt_star_derivative,
    mvt_star_integral,
)
from .backend import backend_name, compile_evaluator, evaluate_array, set_backend
from .errors import (
    CoefficientOverflowError,
    DomainReason,
    EvalDomainError,
    NoClosedFormError,
    NonConvergenceError,
    NonFiniteSampleError,
    NonPositiveSampleError,
    ParseError,
    StarCalcError,
    StepUnderflowError,
    TransformDomainError,
)
from .expr import (
    Add, Constant, Div, E, Exp, Expression, Log, Mul, Neg, PI, Pow, Sqrt,
    Sub, Variable, X, differentiate, evaluate, parse, pow_expr, render,
    simplify,
)
from .quad import Interval, QuadResult, QuadSettings, integrate, product_riemann
from .series import (
    SeriesDivergenceWarning,
    TaylorProduct,
    log_identity_residual,
    taylor_coefficients,
    taylor_evaluate,
)
from .star import (
    ClosedFormEntry,
    StarClass,
    StarResult,
    by_parts_residual,
    closed_form_entry,
    ftc_evaluate,
    star_derivative,
    star_derivative_closed,
    star_integral_closed,
    star_integral_definite,
)
from .transforms import (
    EXP, GTransform, IDENTITY, LOG, SQUARE, TRANSFORMS,
    double_star_integral, g_integral,
)
