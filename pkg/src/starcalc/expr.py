"""Expression trees for univariate real-valued functions.

The node set is deliberately small: constants, the variable ``x``, the four
arithmetic operators, powers, ``exp``, ``log``, ``sqrt`` and unary minus.
Trees are immutable and compare structurally, so they are safe to share
between threads and to use as dict keys.

Grammar accepted by :func:`parse` (EBNF)::

    expr   := term (('+'|'-') term)*
    term   := factor (('*'|'/') factor)*
    factor := unary ('^' factor)?          # '^' right-associative
    unary  := '-' unary | atom             # unary minus binds looser than '^'
    atom   := NUMBER | 'x' | 'e' | 'pi' | IDENT '(' expr ')' | '(' expr ')'
    IDENT  := 'exp' | 'log' | 'sqrt'

Powers with a non-constant exponent are rewritten at construction time as
``exp(g*log(f))``; this keeps :func:`differentiate` total and matches the
positive-function regime every consumer of these trees works in.
"""

from __future__ import annotations

import math
import re
from dataclasses import dataclass
from typing import Mapping

from .errors import DomainReason, EvalDomainError, ParseError


class Expression:
    """Base class for all nodes. Instances are immutable value objects."""

    __slots__ = ()

    def __add__(self, other):
        return Add(self, _coerce(other))

    def __radd__(self, other):
        return Add(_coerce(other), self)

    def __sub__(self, other):
        return Sub(self, _coerce(other))

    def __rsub__(self, other):
        return Sub(_coerce(other), self)

    def __mul__(self, other):
        return Mul(self, _coerce(other))

    def __rmul__(self, other):
        return Mul(_coerce(other), self)

    def __truediv__(self, other):
        return Div(self, _coerce(other))

    def __rtruediv__(self, other):
        return Div(_coerce(other), self)

    def __pow__(self, other):
        return pow_expr(self, _coerce(other))

    def __rpow__(self, other):
        return pow_expr(_coerce(other), self)

    def __neg__(self):
        return Neg(self)

    def __str__(self):
        return render(self)


@dataclass(frozen=True, repr=True)
class Constant(Expression):
    value: float

    def __post_init__(self):
        object.__setattr__(self, "value", float(self.value))
        if not math.isfinite(self.value):
            raise ValueError(f"Constant must be finite, got {self.value!r}")


@dataclass(frozen=True)
class Variable(Expression):
    pass


@dataclass(frozen=True)
class Add(Expression):
    left: Expression
    right: Expression


@dataclass(frozen=True)
class Sub(Expression):
    left: Expression
    right: Expression


@dataclass(frozen=True)
class Mul(Expression):
    left: Expression
    right: Expression


@dataclass(frozen=True)
class Div(Expression):
    left: Expression
    right: Expression


@dataclass(frozen=True)
class Pow(Expression):
    base: Expression
    exponent: Expression


@dataclass(frozen=True)
class Exp(Expression):
    arg: Expression


@dataclass(frozen=True)
class Log(Expression):
    arg: Expression


@dataclass(frozen=True)
class Sqrt(Expression):
    arg: Expression


@dataclass(frozen=True)
class Neg(Expression):
    arg: Expression


X = Variable()
E = Constant(math.e)
PI = Constant(math.pi)
ONE = Constant(1.0)
ZERO = Constant(0.0)


def _coerce(v) -> Expression:
    if isinstance(v, Expression):
        return v
    return Constant(float(v))


def _constant_value(e: Expression) -> Constant | None:
    """Fold a variable-free tree to a Constant, or return None."""
    if isinstance(e, Constant):
        return e
    try:
        v = evaluate(e, math.nan)
    except EvalDomainError:
        return None
    return Constant(v) if math.isfinite(v) else None


def pow_expr(base: Expression, exponent: Expression) -> Expression:
    """Power with the canonical rewrites applied.

    ``e^u`` becomes ``Exp(u)``; a non-constant exponent becomes
    ``exp(exponent * log(base))``; a constant exponent stays a ``Pow`` node.
    """
    base = _coerce(base)
    exponent = _coerce(exponent)
    folded = _constant_value(exponent)
    if folded is not None:
        exponent = folded
    if base == E:
        return Exp(exponent)
    if isinstance(exponent, Constant):
        return Pow(base, exponent)
    return Exp(Mul(exponent, Log(base)))


# ---------------------------------------------------------------------------
# Parsing


_TOKEN_RE = re.compile(
    r"""
    (?P<num>(?:\d+(?:\.\d*)?|\.\d+)(?:[eE][+-]?\d+)?)
  | (?P<ident>[A-Za-z_][A-Za-z_0-9]*)
  | (?P<op>[-+*/^()])
  | (?P<ws>\s+)
    """,
    re.VERBOSE,
)

_FUNCTIONS = {"exp": Exp, "log": Log, "sqrt": Sqrt}
_NAMED_CONSTANTS = {"e": E, "pi": PI}


class _Token:
    __slots__ = ("kind", "text", "pos")

    def __init__(self, kind, text, pos):
        self.kind = kind
        self.text = text
        self.pos = pos


def _tokenize(text: str) -> list[_Token]:
    tokens = []
    i = 0
    while i < len(text):
        m = _TOKEN_RE.match(text, i)
        if m is None:
            raise ParseError(f"unexpected character {text[i]!r}", i)
        if m.lastgroup == "num":
            tokens.append(_Token("num", m.group(), i))
        elif m.lastgroup == "ident":
            tokens.append(_Token("ident", m.group(), i))
        elif m.lastgroup == "op":
            tokens.append(_Token(m.group(), m.group(), i))
        i = m.end()
    tokens.append(_Token("eof", "", len(text)))
    return tokens


class _Parser:
    def __init__(self, tokens: list[_Token], constants: Mapping[str, float]):
        self.tokens = tokens
        self.pos = 0
        self.constants = constants

    def peek(self) -> _Token:
        return self.tokens[self.pos]

    def advance(self) -> _Token:
        tok = self.tokens[self.pos]
        self.pos += 1
        return tok

    def expect(self, kind: str, expected: str) -> _Token:
        tok = self.peek()
        if tok.kind != kind:
            raise ParseError(f"unexpected {tok.text or 'end of input'!r}", tok.pos, {expected})
        return self.advance()

    def parse_expr(self) -> Expression:
        node = self.parse_term()
        while self.peek().kind in ("+", "-"):
            op = self.advance().kind
            rhs = self.parse_term()
            node = Add(node, rhs) if op == "+" else Sub(node, rhs)
        return node

    def parse_term(self) -> Expression:
        node = self.parse_factor()
        while self.peek().kind in ("*", "/"):
            op = self.advance().kind
            rhs = self.parse_factor()
            node = Mul(node, rhs) if op == "*" else Div(node, rhs)
        return node

    def parse_factor(self) -> Expression:
        if self.peek().kind == "-":
            self.advance()
            return Neg(self.parse_factor())
        return self.parse_power()

    def parse_power(self) -> Expression:
        base = self.parse_atom()
        if self.peek().kind == "^":
            self.advance()
            exponent = self.parse_factor()
            return pow_expr(base, exponent)
        return base

    def parse_atom(self) -> Expression:
        tok = self.peek()
        if tok.kind == "num":
            self.advance()
            return Constant(float(tok.text))
        if tok.kind == "(":
            self.advance()
            inner = self.parse_expr()
            self.expect(")", "')'")
            return inner
        if tok.kind == "ident":
            self.advance()
            name = tok.text
            if name == "x":
                return X
            if name in _NAMED_CONSTANTS:
                return _NAMED_CONSTANTS[name]
            if name in _FUNCTIONS:
                self.expect("(", "'('")
                inner = self.parse_expr()
                self.expect(")", "')'")
                return _FUNCTIONS[name](inner)
            if name in self.constants:
                return Constant(float(self.constants[name]))
            raise ParseError(
                f"unknown identifier {name!r}", tok.pos,
                {"'x'", "'e'", "'pi'", "'exp'", "'log'", "'sqrt'"},
            )
        raise ParseError(
            f"unexpected {tok.text or 'end of input'!r}", tok.pos,
            {"NUMBER", "'x'", "'('", "'-'", "IDENT"},
        )


def parse(text: str, constants: Mapping[str, float] | None = None) -> Expression:
    """Parse ``text`` into an expression tree.

    ``constants`` optionally binds extra identifiers (single names) to fixed
    numeric values; they are folded to :class:`Constant` nodes during parsing.
    """
    parser = _Parser(_tokenize(text), constants or {})
    node = parser.parse_expr()
    tok = parser.peek()
    if tok.kind != "eof":
        raise ParseError(f"trailing input {tok.text!r}", tok.pos, {"end of input"})
    return node


# ---------------------------------------------------------------------------
# Rendering


def _fmt_number(v: float) -> str:
    if v == math.e:
        return "e"
    if v == math.pi:
        return "pi"
    if v == int(v) and abs(v) < 1e16:
        return str(int(v))
    return repr(v)


def _prec(e: Expression) -> int:
    if isinstance(e, (Add, Sub)):
        return 1
    if isinstance(e, (Mul, Div)):
        return 2
    if isinstance(e, Neg):
        return 3
    if isinstance(e, Constant) and e.value < 0:
        return 3
    if isinstance(e, (Pow, Exp)):
        return 4
    return 5


def render(e: Expression) -> str:
    """Render a tree to a string the parser maps back to the same structure."""

    def child(node: Expression, min_prec: int) -> str:
        s = render(node)
        if _prec(node) < min_prec:
            return f"({s})"
        return s

    if isinstance(e, Constant):
        return _fmt_number(e.value)
    if isinstance(e, Variable):
        return "x"
    if isinstance(e, Add):
        return f"{child(e.left, 1)}+{child(e.right, 2)}"
    if isinstance(e, Sub):
        return f"{child(e.left, 1)}-{child(e.right, 2)}"
    if isinstance(e, Mul):
        return f"{child(e.left, 2)}*{child(e.right, 3)}"
    if isinstance(e, Div):
        return f"{child(e.left, 2)}/{child(e.right, 3)}"
    if isinstance(e, Neg):
        return f"-{child(e.arg, 3)}"
    if isinstance(e, Pow):
        return f"{child(e.base, 5)}^{child(e.exponent, 3)}"
    if isinstance(e, Exp):
        return f"e^{child(e.arg, 3)}"
    if isinstance(e, Log):
        return f"log({render(e.arg)})"
    if isinstance(e, Sqrt):
        return f"sqrt({render(e.arg)})"
    raise TypeError(f"not an Expression: {e!r}")


# ---------------------------------------------------------------------------
# Evaluation (checked, scalar)


def evaluate(e: Expression, x: float) -> float:
    """Evaluate ``e`` at the point ``x`` with full domain checking.

    Raises :class:`EvalDomainError` carrying the offending node kind, the
    point ``x`` and the reason whenever evaluation leaves the domain.
    Overflow saturates to ``inf`` rather than raising.
    """
    x = float(x)

    def go(node: Expression) -> float:
        if isinstance(node, Constant):
            return node.value
        if isinstance(node, Variable):
            return x
        if isinstance(node, Add):
            return go(node.left) + go(node.right)
        if isinstance(node, Sub):
            return go(node.left) - go(node.right)
        if isinstance(node, Mul):
            return go(node.left) * go(node.right)
        if isinstance(node, Div):
            num, den = go(node.left), go(node.right)
            if den == 0.0:
                raise EvalDomainError("div", x, DomainReason.DIV_BY_ZERO)
            return num / den
        if isinstance(node, Pow):
            return _pow_checked(go(node.base), go(node.exponent), x)
        if isinstance(node, Exp):
            v = go(node.arg)
            try:
                return math.exp(v)
            except OverflowError:
                return math.inf
        if isinstance(node, Log):
            v = go(node.arg)
            if math.isnan(v):
                return math.nan
            if v <= 0.0:
                raise EvalDomainError("log", x, DomainReason.LOG_NON_POSITIVE)
            return math.log(v)
        if isinstance(node, Sqrt):
            v = go(node.arg)
            if math.isnan(v):
                return math.nan
            if v < 0.0:
                raise EvalDomainError("sqrt", x, DomainReason.SQRT_NEGATIVE)
            return math.sqrt(v)
        if isinstance(node, Neg):
            return -go(node.arg)
        raise TypeError(f"not an Expression: {node!r}")

    return go(e)


def _pow_checked(base: float, expo: float, x: float) -> float:
    if math.isnan(base) or math.isnan(expo):
        return math.nan
    if base == 0.0:
        if expo < 0.0:
            raise EvalDomainError("pow", x, DomainReason.DIV_BY_ZERO)
        return 1.0 if expo == 0.0 else 0.0
    if base < 0.0 and not float(expo).is_integer():
        raise EvalDomainError("pow", x, DomainReason.POW_INDETERMINATE)
    try:
        return base ** expo
    except OverflowError:
        if base < 0.0 and int(expo) % 2 == 1:
            return -math.inf
        return math.inf


# ---------------------------------------------------------------------------
# Differentiation


def differentiate(e: Expression) -> Expression:
    """Symbolic derivative with respect to ``x``.

    The result is unsimplified; feed it through :func:`simplify` when the
    tree is reused (e.g. when differentiating repeatedly).
    """
    if isinstance(e, Constant):
        return ZERO
    if isinstance(e, Variable):
        return ONE
    if isinstance(e, Add):
        return Add(differentiate(e.left), differentiate(e.right))
    if isinstance(e, Sub):
        return Sub(differentiate(e.left), differentiate(e.right))
    if isinstance(e, Mul):
        return Add(
            Mul(differentiate(e.left), e.right),
            Mul(e.left, differentiate(e.right)),
        )
    if isinstance(e, Div):
        return Div(
            Sub(
                Mul(differentiate(e.left), e.right),
                Mul(e.left, differentiate(e.right)),
            ),
            Pow(e.right, Constant(2.0)),
        )
    if isinstance(e, Pow):
        if isinstance(e.exponent, Constant):
            c = e.exponent.value
            return Mul(
                Mul(Constant(c), Pow(e.base, Constant(c - 1.0))),
                differentiate(e.base),
            )
        return differentiate(pow_expr(e.base, e.exponent))
    if isinstance(e, Exp):
        return Mul(Exp(e.arg), differentiate(e.arg))
    if isinstance(e, Log):
        return Div(differentiate(e.arg), e.arg)
    if isinstance(e, Sqrt):
        return Div(differentiate(e.arg), Mul(Constant(2.0), Sqrt(e.arg)))
    if isinstance(e, Neg):
        return Neg(differentiate(e.arg))
    raise TypeError(f"not an Expression: {e!r}")


# ---------------------------------------------------------------------------
# Simplification


def simplify(e: Expression) -> Expression:
    """Pointwise-value-preserving cleanup.

    Applies constant folding, the 0/1 identities, ``log(exp(u)) -> u`` and
    ``exp(log(u)) -> u`` (the latter valid for ``u > 0``), double-negation
    removal, and same-base power combination.  A handful of rules
    (``0*u -> 0``, ``u/u -> 1``, power cancellation) may enlarge the domain
    at isolated points, in the usual CAS sense; values are preserved
    everywhere the input was defined.
    """
    if isinstance(e, (Constant, Variable)):
        return e
    if isinstance(e, (Add, Sub, Mul, Div)):
        node = type(e)(simplify(e.left), simplify(e.right))
    elif isinstance(e, Pow):
        node = Pow(simplify(e.base), simplify(e.exponent))
    elif isinstance(e, (Exp, Log, Sqrt, Neg)):
        node = type(e)(simplify(e.arg))
    else:
        raise TypeError(f"not an Expression: {e!r}")

    # every rewrite either shrinks the tree, reaches the canonical
    # constant-left form in one step, or eliminates a non-constant-exponent
    # Pow for good, so this loop terminates well inside the cap
    for _ in range(64):
        new = _rewrite(node)
        if new == node:
            return node
        node = simplify(new)
    return node


def _const(e: Expression) -> float | None:
    return e.value if isinstance(e, Constant) else None


def _is_int(v: float) -> bool:
    return float(v).is_integer() and abs(v) < 1e15


class _Parts:
    """Decomposition of a factor as coeff * base**exponent."""

    __slots__ = ("coeff", "base", "exp")

    def __init__(self, coeff: float, base: Expression | None, exp: float):
        self.coeff = coeff
        self.base = base
        self.exp = exp


def _parts(e: Expression) -> _Parts:
    if isinstance(e, Constant):
        return _Parts(e.value, None, 0.0)
    if isinstance(e, Neg):
        p = _parts(e.arg)
        return _Parts(-p.coeff, p.base, p.exp)
    if isinstance(e, Pow) and isinstance(e.exponent, Constant):
        return _Parts(1.0, e.base, e.exponent.value)
    if isinstance(e, Mul):
        lc, rc = _const(e.left), _const(e.right)
        if lc is not None:
            p = _parts(e.right)
            return _Parts(lc * p.coeff, p.base, p.exp)
        if rc is not None:
            p = _parts(e.left)
            return _Parts(rc * p.coeff, p.base, p.exp)
    if isinstance(e, Div):
        lc = _const(e.left)
        if lc is not None:
            p = _parts(e.right)
            if p.coeff != 0.0:
                return _Parts(lc / p.coeff, p.base, -p.exp)
    return _Parts(1.0, e, 1.0)


def _rebuild(coeff: float, base: Expression | None, exp: float) -> Expression:
    if not math.isfinite(coeff):
        raise _NoRewrite
    if base is None or exp == 0.0:
        return Constant(coeff)
    if exp == 1.0:
        body = base
    else:
        body = Pow(base, Constant(exp))
    if coeff == 1.0:
        return body
    if coeff == -1.0:
        return Neg(body)
    return Mul(Constant(coeff), body)


class _NoRewrite(Exception):
    pass


def _fold(node: Expression) -> Expression | None:
    """Constant-fold a node whose children are all constants, when legal."""
    try:
        v = evaluate(node, math.nan)
    except EvalDomainError:
        return None
    if not math.isfinite(v):
        return None
    return Constant(v)


def _rewrite(e: Expression) -> Expression:
    # children are already simplified when this runs
    if isinstance(e, Add):
        l, r = e.left, e.right
        if _const(l) is not None and _const(r) is not None:
            return _fold(e) or e
        if _const(l) == 0.0:
            return r
        if _const(r) == 0.0:
            return l
        return e

    if isinstance(e, Sub):
        l, r = e.left, e.right
        if _const(l) is not None and _const(r) is not None:
            return _fold(e) or e
        if _const(r) == 0.0:
            return l
        if _const(l) == 0.0:
            return Neg(r)
        return e

    if isinstance(e, Mul):
        l, r = e.left, e.right
        if _const(l) == 0.0 or _const(r) == 0.0:
            return ZERO
        if _const(l) == 1.0:
            return r
        if _const(r) == 1.0:
            return l
        pl, pr = _parts(l), _parts(r)
        try:
            if pl.base is None and pr.base is None:
                return _rebuild(pl.coeff * pr.coeff, None, 0.0)
            if pl.base is None:
                cand = _rebuild(pl.coeff * pr.coeff, pr.base, pr.exp)
            elif pr.base is None:
                cand = _rebuild(pl.coeff * pr.coeff, pl.base, pl.exp)
            elif pl.base == pr.base:
                cand = _rebuild(pl.coeff * pr.coeff, pl.base, pl.exp + pr.exp)
            else:
                return e
        except _NoRewrite:
            return e
        return cand if cand != e else e

    if isinstance(e, Div):
        l, r = e.left, e.right
        if l == r:
            return ONE
        if isinstance(l, Mul) and l.left == r:
            return l.right
        if isinstance(l, Mul) and l.right == r:
            return l.left
        if _const(r) == 1.0:
            return l
        if _const(l) == 0.0 and _const(r) != 0.0:
            return ZERO
        pl, pr = _parts(l), _parts(r)
        try:
            if pr.base is None:
                if pr.coeff == 0.0:
                    return e
                cand = _rebuild(pl.coeff / pr.coeff, pl.base, pl.exp)
            elif pl.base is not None and pl.base == pr.base:
                cand = _rebuild(pl.coeff / pr.coeff, pl.base, pl.exp - pr.exp)
            else:
                return e
        except _NoRewrite:
            return e
        return cand if cand != e else e

    if isinstance(e, Pow):
        b, c = e.base, e.exponent
        if not isinstance(c, Constant):
            return pow_expr(b, c)
        if _const(b) is not None:
            folded = _fold(e)
            if folded is not None:
                return folded
        if c.value == 1.0:
            return b
        if c.value == 0.0:
            return ONE
        if (
            isinstance(b, Pow)
            and isinstance(b.exponent, Constant)
            and _is_int(c.value)
        ):
            return Pow(b.base, Constant(b.exponent.value * c.value))
        return e

    if isinstance(e, Exp):
        if isinstance(e.arg, Log):
            return e.arg.arg
        if _const(e.arg) is not None:
            return _fold(e) or e
        return e

    if isinstance(e, Log):
        if isinstance(e.arg, Exp):
            return e.arg.arg
        if _const(e.arg) is not None:
            return _fold(e) or e
        return e

    if isinstance(e, Sqrt):
        if _const(e.arg) is not None:
            return _fold(e) or e
        return e

    if isinstance(e, Neg):
        u = e.arg
        if isinstance(u, Constant):
            return Constant(-u.value)
        if isinstance(u, Neg):
            return u.arg
        if isinstance(u, Mul) and isinstance(u.left, Constant):
            return Mul(Constant(-u.left.value), u.right)
        return e

    return e
