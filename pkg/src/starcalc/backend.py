"""Vectorized expression evaluation over sample arrays.

Expression trees are compiled once into a flat postfix tape (opcode /
argument / constant-pool arrays); the tape is then executed for whole arrays
of sample points.  This is the hot inner loop of the package: quadrature,
product-Riemann sums and the property suites all evaluate the same small
expression at thousands to millions of points.

Two interchangeable executors exist:

* a numba ``@njit`` stack machine that walks the tape point by point, and
* a pure-numpy executor that replays the tape with whole-array operations.

The ``STARCALC_BACKEND`` environment variable selects the default
(``numba`` or ``numpy``; unset means numba when importable).  Both follow
IEEE semantics: out-of-domain samples yield NaN/inf instead of raising —
callers interpret those markers.  ``benchmarks/bench_backends.py`` compares
the two.
"""

from __future__ import annotations

import os
from dataclasses import dataclass

import numpy as np

from .expr import (
    Add, Constant, Div, Exp, Expression, Log, Mul, Neg, Pow, Sqrt, Sub,
    Variable,
)

OP_CONST = 0
OP_VAR = 1
OP_ADD = 2
OP_SUB = 3
OP_MUL = 4
OP_DIV = 5
OP_POW = 6
OP_EXP = 7
OP_LOG = 8
OP_SQRT = 9
OP_NEG = 10

_BINARY = {Add: OP_ADD, Sub: OP_SUB, Mul: OP_MUL, Div: OP_DIV, Pow: OP_POW}
_UNARY = {Exp: OP_EXP, Log: OP_LOG, Sqrt: OP_SQRT, Neg: OP_NEG}


@dataclass(frozen=True)
class Tape:
    code: np.ndarray      # int64 opcodes, postfix order
    arg: np.ndarray       # int64 constant-pool index, -1 elsewhere
    consts: np.ndarray    # float64 constant pool
    stack_need: int


def compile_tape(e: Expression) -> Tape:
    code: list[int] = []
    arg: list[int] = []
    consts: list[float] = []

    def emit(node: Expression) -> int:
        if isinstance(node, Constant):
            code.append(OP_CONST)
            arg.append(len(consts))
            consts.append(node.value)
            return 1
        if isinstance(node, Variable):
            code.append(OP_VAR)
            arg.append(-1)
            return 1
        op = _BINARY.get(type(node))
        if op is not None:
            if isinstance(node, Pow):
                left, right = node.base, node.exponent
            else:
                left, right = node.left, node.right
            dl = emit(left)
            dr = emit(right)
            code.append(op)
            arg.append(-1)
            return max(dl, 1 + dr)
        op = _UNARY.get(type(node))
        if op is not None:
            d = emit(node.arg)
            code.append(op)
            arg.append(-1)
            return d
        raise TypeError(f"not an Expression: {node!r}")

    depth = emit(e)
    return Tape(
        code=np.asarray(code, dtype=np.int64),
        arg=np.asarray(arg, dtype=np.int64),
        consts=np.asarray(consts, dtype=np.float64),
        stack_need=depth,
    )


# ---------------------------------------------------------------------------
# Executors


def eval_tape_numpy(tape: Tape, xs: np.ndarray) -> np.ndarray:
    """Replay the tape with whole-array numpy operations."""
    xs = np.asarray(xs, dtype=np.float64)
    stack: list[np.ndarray] = []
    code, arg, consts = tape.code, tape.arg, tape.consts
    with np.errstate(all="ignore"):
        for j in range(code.shape[0]):
            op = code[j]
            if op == OP_CONST:
                stack.append(np.full(xs.shape, consts[arg[j]]))
            elif op == OP_VAR:
                stack.append(xs.copy())
            elif op <= OP_POW:  # binary
                r = stack.pop()
                l = stack.pop()
                if op == OP_ADD:
                    stack.append(l + r)
                elif op == OP_SUB:
                    stack.append(l - r)
                elif op == OP_MUL:
                    stack.append(l * r)
                elif op == OP_DIV:
                    stack.append(l / r)
                else:
                    stack.append(np.power(l, r))
            else:
                u = stack.pop()
                if op == OP_EXP:
                    stack.append(np.exp(u))
                elif op == OP_LOG:
                    stack.append(np.log(u))
                elif op == OP_SQRT:
                    stack.append(np.sqrt(u))
                else:
                    stack.append(-u)
    return stack[0]


_numba_kernel = None


def _get_numba_kernel():
    global _numba_kernel
    if _numba_kernel is None:
        from numba import njit

        @njit(cache=True, error_model="numpy")
        def kernel(code, arg, consts, xs, stack_need):  # pragma: no cover
            n = xs.shape[0]
            m = code.shape[0]
            out = np.empty(n, dtype=np.float64)
            stack = np.empty(stack_need, dtype=np.float64)
            for i in range(n):
                x = xs[i]
                sp = 0
                for j in range(m):
                    op = code[j]
                    if op == 0:
                        stack[sp] = consts[arg[j]]
                        sp += 1
                    elif op == 1:
                        stack[sp] = x
                        sp += 1
                    elif op == 2:
                        sp -= 1
                        stack[sp - 1] = stack[sp - 1] + stack[sp]
                    elif op == 3:
                        sp -= 1
                        stack[sp - 1] = stack[sp - 1] - stack[sp]
                    elif op == 4:
                        sp -= 1
                        stack[sp - 1] = stack[sp - 1] * stack[sp]
                    elif op == 5:
                        sp -= 1
                        stack[sp - 1] = stack[sp - 1] / stack[sp]
                    elif op == 6:
                        sp -= 1
                        stack[sp - 1] = stack[sp - 1] ** stack[sp]
                    elif op == 7:
                        stack[sp - 1] = np.exp(stack[sp - 1])
                    elif op == 8:
                        v = stack[sp - 1]
                        if v > 0.0:
                            stack[sp - 1] = np.log(v)
                        elif v == 0.0:
                            stack[sp - 1] = -np.inf
                        else:
                            stack[sp - 1] = np.nan
                    elif op == 9:
                        v = stack[sp - 1]
                        stack[sp - 1] = np.sqrt(v) if v >= 0.0 else np.nan
                    else:
                        stack[sp - 1] = -stack[sp - 1]
                out[i] = stack[0]
            return out

        _numba_kernel = kernel
    return _numba_kernel


def eval_tape_numba(tape: Tape, xs: np.ndarray) -> np.ndarray:
    xs = np.ascontiguousarray(xs, dtype=np.float64)
    kernel = _get_numba_kernel()
    return kernel(tape.code, tape.arg, tape.consts, xs, tape.stack_need)


# ---------------------------------------------------------------------------
# Backend selection


def _numba_available() -> bool:
    try:
        import numba  # noqa: F401
    except ImportError:
        return False
    return True


def _resolve_backend() -> str:
    choice = os.environ.get("STARCALC_BACKEND", "").strip().lower()
    if choice == "numpy":
        return "numpy"
    if choice == "numba":
        if not _numba_available():
            raise RuntimeError("STARCALC_BACKEND=numba but numba is not importable")
        return "numba"
    if choice not in ("", "auto"):
        raise RuntimeError(f"unknown STARCALC_BACKEND {choice!r}")
    return "numba" if _numba_available() else "numpy"


_active: str | None = None


def backend_name() -> str:
    """Name of the executor in use: 'numba' or 'numpy'."""
    global _active
    if _active is None:
        _active = _resolve_backend()
    return _active


def set_backend(name: str) -> None:
    """Override the executor for this process (mainly for tests/benchmarks)."""
    global _active
    if name not in ("numba", "numpy"):
        raise ValueError(f"unknown backend {name!r}")
    if name == "numba" and not _numba_available():
        raise RuntimeError("numba is not importable")
    _active = name


class CompiledFunction:
    """Callable wrapper around a tape: ndarray in, ndarray out.

    Scalar input returns a Python float.  Out-of-domain samples produce
    NaN/inf markers; no exceptions are raised from the hot path.
    """

    __slots__ = ("expression", "tape")

    def __init__(self, expression: Expression):
        self.expression = expression
        self.tape = compile_tape(expression)

    def __call__(self, xs):
        scalar = np.isscalar(xs) or getattr(xs, "ndim", 1) == 0
        arr = np.atleast_1d(np.asarray(xs, dtype=np.float64))
        if backend_name() == "numba":
            out = eval_tape_numba(self.tape, arr)
        else:
            out = eval_tape_numpy(self.tape, arr)
        if scalar:
            return float(out[0])
        return out


def compile_evaluator(e: Expression) -> CompiledFunction:
    """Compile ``e`` for repeated array evaluation."""
    return CompiledFunction(e)


def evaluate_array(e: Expression, xs: np.ndarray) -> np.ndarray:
    """One-shot array evaluation (compiles a throwaway tape)."""
    return compile_evaluator(e)(xs)


EPS = float(np.finfo(np.float64).eps)
