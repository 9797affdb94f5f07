"""Command-line interface.

Every subcommand emits an output envelope — command, echoed inputs, result,
diagnostics, version — rendered as human-readable text (default), canonical
JSON (sorted keys, 17 significant digits, LF) or CSV.  Exit codes are a
stable contract: 0 success, 2 parse error, 3 domain error, 4 quadrature
non-convergence, 5 no closed form.
"""

from __future__ import annotations

import argparse
import json
import math
import sys

import numpy as np

from . import __version__
from .analysis import (
    inequality_suite, mvt_star_derivative, mvt_star_integral,
)
from .backend import compile_evaluator
from .errors import (
    EvalDomainError,
    NoClosedFormError,
    NonConvergenceError,
    NonFiniteSampleError,
    NonPositiveSampleError,
    ParseError,
    StarCalcError,
    TransformDomainError,
)
from .expr import Constant, Log, differentiate, evaluate, parse, render, simplify
from .quad import Interval, QuadSettings, integrate, product_riemann
from .series import taylor_coefficients, taylor_evaluate
from .star import (
    StarClass, closed_form_entry, star_derivative, star_integral_definite,
)
from .transforms import TRANSFORMS, g_integral

EXIT_OK = 0
EXIT_PARSE = 2
EXIT_DOMAIN = 3
EXIT_NONCONVERGENCE = 4
EXIT_NO_CLOSED_FORM = 5

ENVELOPE_SCHEMA = {
    "type": "object",
    "required": ["command", "inputs", "result", "diagnostics", "version"],
    "properties": {
        "command": {"type": "string"},
        "inputs": {"type": "object"},
        "result": {},
        "diagnostics": {
            "type": "array",
            "items": {
                "type": "object",
                "required": ["level", "message"],
                "properties": {
                    "level": {"enum": ["info", "warning", "error"]},
                    "message": {"type": "string"},
                },
                "additionalProperties": False,
            },
        },
        "version": {"type": "string"},
    },
    "additionalProperties": False,
}


def _fmt17(v: float) -> str:
    if math.isnan(v):
        return '"NaN"'
    if math.isinf(v):
        return '"Infinity"' if v > 0 else '"-Infinity"'
    return format(v, ".17g")


def dumps_canonical(obj) -> str:
    """Deterministic JSON: sorted keys, floats at 17 significant digits."""
    if obj is None:
        return "null"
    if isinstance(obj, bool):
        return "true" if obj else "false"
    if isinstance(obj, (int, np.integer)):
        return str(int(obj))
    if isinstance(obj, (float, np.floating)):
        return _fmt17(float(obj))
    if isinstance(obj, str):
        return json.dumps(obj)
    if isinstance(obj, (list, tuple)):
        return "[" + ",".join(dumps_canonical(v) for v in obj) + "]"
    if isinstance(obj, dict):
        items = sorted(obj.items())
        return "{" + ",".join(f"{json.dumps(str(k))}:{dumps_canonical(v)}" for k, v in items) + "}"
    raise TypeError(f"cannot serialize {type(obj).__name__}")


def _envelope(command: str, inputs: dict, result, diagnostics: list) -> dict:
    return {
        "command": command,
        "inputs": inputs,
        "result": result,
        "diagnostics": diagnostics,
        "version": __version__,
    }


def _flatten(prefix: str, obj, out: list):
    if isinstance(obj, dict):
        for k in sorted(obj):
            _flatten(f"{prefix}.{k}" if prefix else str(k), obj[k], out)
    elif isinstance(obj, (list, tuple)):
        for i, v in enumerate(obj):
            _flatten(f"{prefix}[{i}]", v, out)
    else:
        out.append((prefix, obj))


def _scalar_text(v) -> str:
    if isinstance(v, float):
        return _fmt17(v).strip('"')
    return str(v)


def _emit(env: dict, fmt: str, rows=None) -> None:
    out = sys.stdout
    if fmt == "json":
        out.write(dumps_canonical(env) + "\n")
        return
    if rows is not None:
        out.write("x,value\n")
        for x, v in rows:
            out.write(f"{format(x, '.17g')},{format(v, '.17g')}\n")
        if fmt == "text":
            for d in env["diagnostics"]:
                out.write(f"# {d['level']}: {d['message']}\n")
        return
    if fmt == "csv":
        pairs: list = []
        _flatten("", {"command": env["command"], "result": env["result"]}, pairs)
        out.write("key,value\n")
        for k, v in pairs:
            out.write(f"{k},{_scalar_text(v)}\n")
        return
    # text
    out.write(f"command: {env['command']}\n")
    pairs = []
    _flatten("", env["result"], pairs)
    if len(pairs) == 1 and pairs[0][0] == "":
        out.write(f"result: {_scalar_text(pairs[0][1])}\n")
    else:
        for k, v in pairs:
            out.write(f"{k}: {_scalar_text(v)}\n")
    for d in env["diagnostics"]:
        out.write(f"{d['level']}: {d['message']}\n")


def _quad_settings(args) -> QuadSettings:
    return QuadSettings(
        rel_tol=args.rel_tol, abs_tol=args.abs_tol, max_levels=args.max_levels
    )


def _add_quad_options(p: argparse.ArgumentParser) -> None:
    p.add_argument("--rel-tol", type=float, default=1e-10, dest="rel_tol")
    p.add_argument("--abs-tol", type=float, default=1e-12, dest="abs_tol")
    p.add_argument("--max-levels", type=int, default=12, dest="max_levels")


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(
        prog="starcalc",
        description="Multiplicative (star) calculus engine: star-integrals, "
        "star-derivatives, product Taylor series, G-transform integrals and "
        "randomized inequality checks.",
    )
    p.add_argument("--version", action="version", version=__version__)
    sub = p.add_subparsers(dest="command", required=True)

    def new(name: str, help_: str) -> argparse.ArgumentParser:
        q = sub.add_parser(name, help=help_)
        q.add_argument("--format", choices=["text", "json", "csv"], default="text")
        return q

    q = new("starint", "definite star-integral of an expression")
    q.add_argument("expr")
    q.add_argument("--from", dest="lower", type=float, required=True)
    q.add_argument("--to", dest="upper", type=float, required=True)
    q.add_argument("--method", choices=["quad", "riemann"], default="quad")
    q.add_argument("--n", type=int, default=10_000)
    _add_quad_options(q)

    q = new("starderiv", "star-derivative at a point")
    q.add_argument("expr")
    q.add_argument("--at", dest="at", type=float, required=True)
    q.add_argument("--order", type=int, default=1)
    q.add_argument("--method", choices=["symbolic", "numeric"], default="symbolic")
    q.add_argument("--one-sided", action="store_true", dest="one_sided")

    q = new("antiderivative", "closed-form star-antiderivative, if tabulated")
    q.add_argument("expr")

    q = new("taylor", "product-form Taylor coefficients")
    q.add_argument("expr")
    q.add_argument("--center", type=float, required=True)
    q.add_argument("--terms", type=int, required=True)
    q.add_argument("--eval", dest="eval_at", type=float, default=None)

    q = new("mvt", "mean-value point for star-integral or star-derivative")
    q.add_argument("expr")
    q.add_argument("--from", dest="lower", type=float, required=True)
    q.add_argument("--to", dest="upper", type=float, required=True)
    q.add_argument("--kind", choices=["integral", "derivative"], required=True)
    q.add_argument("--tol", type=float, default=1e-8)

    q = new("check", "randomized inequality suite")
    q.add_argument("--inequality", required=True,
                   choices=["concavity", "eq3", "eq4", "eq5", "amgm"])
    q.add_argument("--trials", type=int, default=1000)
    q.add_argument("--seed", type=int, default=0)

    q = new("gtransform", "generalized integral G(integral of G^-1(f))")
    q.add_argument("expr")
    q.add_argument("--g", choices=["exp", "id", "log", "square"], required=True)
    q.add_argument("--from", dest="lower", type=float, required=True)
    q.add_argument("--to", dest="upper", type=float, required=True)
    _add_quad_options(q)

    q = new("sample", "CSV samples of a cumulative star-integral or star-derivative")
    q.add_argument("expr")
    q.add_argument("--op", choices=["starint-cumulative", "starderiv"], required=True)
    q.add_argument("--from", dest="lower", type=float, required=True)
    q.add_argument("--to", dest="upper", type=float, required=True)
    q.add_argument("--points", type=int, default=50)
    _add_quad_options(q)

    return p


def _classify_value(v: float) -> str:
    if v == 0.0:
        return StarClass.DIVERGENT_TO_ZERO.value
    if math.isinf(v):
        return StarClass.DIVERGENT_TO_INFINITY.value
    return StarClass.FINITE.value


def _run_starint(args, diagnostics):
    e = parse(args.expr)
    iv = Interval(args.lower, args.upper)
    if args.method == "riemann":
        value = product_riemann(compile_evaluator(e), iv, args.n)
        return {
            "value": value,
            "class": _classify_value(value),
            "errorEstimate": None,
        }
    r = star_integral_definite(e, iv, _quad_settings(args))
    if r.star_class is not StarClass.FINITE:
        diagnostics.append({"level": "info", "message": r.star_class.value})
    return {
        "value": r.value,
        "class": r.star_class.value,
        "errorEstimate": r.error_estimate,
    }


def _run_starderiv(args, diagnostics):
    e = parse(args.expr)
    return star_derivative(
        e, args.at, order=args.order, method=args.method, one_sided=args.one_sided
    )


def _run_antiderivative(args, diagnostics):
    e = parse(args.expr)
    entry = closed_form_entry(e)
    if entry is None:
        raise NoClosedFormError(f"no closed-form star-antiderivative for {args.expr!r}")
    diagnostics.append({"level": "info", "message": f"pattern: {entry.pattern}"})
    anti = entry.antiderivative
    if anti == Constant(1.0):
        return "C"
    return "C*" + render(anti)


def _run_taylor(args, diagnostics):
    e = parse(args.expr)
    tp = taylor_coefficients(e, args.center, args.terms)
    result = {
        "center": tp.center,
        "coefficients": list(tp.coefficients),
        "termCount": tp.term_count,
        "evaluation": None,
    }
    if args.eval_at is not None:
        result["evaluation"] = {"x": args.eval_at, "value": taylor_evaluate(tp, args.eval_at)}
    return result


def _run_mvt(args, diagnostics):
    e = parse(args.expr)
    iv = Interval(args.lower, args.upper)
    if args.kind == "integral":
        r = mvt_star_integral(e, iv, tol=args.tol)
    else:
        r = mvt_star_derivative(e, iv, tol=args.tol)
    if r.constant_function:
        diagnostics.append({"level": "info", "message": "ConstantFunction"})
    return {"c": r.c, "constantFunction": r.constant_function}


def _run_check(args, diagnostics):
    report = inequality_suite(args.inequality, args.trials, args.seed)
    return report.to_dict()


def _run_gtransform(args, diagnostics):
    e = parse(args.expr)
    iv = Interval(args.lower, args.upper)
    return g_integral(e, TRANSFORMS[args.g], iv, _quad_settings(args))


def _run_sample(args, diagnostics):
    e = parse(args.expr)
    if args.points < 1:
        raise ValueError("--points must be >= 1")
    xs = np.linspace(args.lower, args.upper, args.points)
    rows = []
    if args.op == "starint-cumulative":
        settings = _quad_settings(args)
        logf = compile_evaluator(Log(e))
        acc = 0.0
        prev = args.lower
        for x in xs:
            acc += integrate(logf, Interval(prev, float(x)), settings).value
            rows.append((float(x), float(math.exp(acc))))
            prev = float(x)
    else:
        d = simplify(differentiate(simplify(Log(e))))
        for x in xs:
            rows.append((float(x), float(math.exp(evaluate(d, float(x))))))
    return rows


_HANDLERS = {
    "starint": _run_starint,
    "starderiv": _run_starderiv,
    "antiderivative": _run_antiderivative,
    "taylor": _run_taylor,
    "mvt": _run_mvt,
    "check": _run_check,
    "gtransform": _run_gtransform,
    "sample": _run_sample,
}

_ERROR_EXIT = (
    (ParseError, EXIT_PARSE),
    (NonConvergenceError, EXIT_NONCONVERGENCE),
    (NoClosedFormError, EXIT_NO_CLOSED_FORM),
    (
        (EvalDomainError, NonFiniteSampleError, NonPositiveSampleError,
         TransformDomainError, ValueError),
        EXIT_DOMAIN,
    ),
)


def _echo_inputs(args) -> dict:
    skip = {"command", "format"}
    return {k: v for k, v in sorted(vars(args).items()) if k not in skip}


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    diagnostics: list = []
    rows = None
    try:
        result = _HANDLERS[args.command](args, diagnostics)
        if args.command == "sample":
            rows = result
            result = {"rows": [[x, v] for x, v in rows]}
        code = EXIT_OK
    except (StarCalcError, ValueError) as exc:
        result = None
        code = EXIT_DOMAIN
        for types, exit_code in _ERROR_EXIT:
            if isinstance(exc, types):
                code = exit_code
                break
        diagnostics.append(
            {"level": "error", "message": f"{type(exc).__name__}: {exc}"}
        )
        print(str(exc), file=sys.stderr)
    env = _envelope(args.command, _echo_inputs(args), result, diagnostics)
    _emit(env, args.format, rows)
    return code


if __name__ == "__main__":
    sys.exit(main())
