"""A small expression language for exponent and smoothness functions.

Grammar::

    expr   := term (('+' | '-') term)*
    term   := factor (('*' | '/') factor)*
    factor := unary ('^' factor)?
    unary  := '-' unary | atom
    atom   := number | 'x' | 'y' | 'pi' | 'inf'
            | ident '(' expr (',' expr)* ')' | '(' expr ')'

``^`` is right-associative. Unary minus binds tighter than ``^``, so
``-2^2`` is ``(-2)^2 = 4``; write ``-(2^2)`` for the other reading.
"""

from __future__ import annotations

import math
import re
from dataclasses import dataclass

import numpy as np

from .exceptions import ExpressionDomainError, ExpressionSyntaxError, InvalidInputError

__all__ = [
    "Num",
    "Var",
    "Const",
    "Neg",
    "BinOp",
    "Call",
    "ExponentExpression",
    "parse_expression",
    "evaluate",
    "evaluate_on_grid",
    "validate_role",
]

MAX_SOURCE_BYTES = 64 * 1024

# name -> (min args, max args or None)
FUNCTIONS = {
    "sin": (1, 1),
    "cos": (1, 1),
    "exp": (1, 1),
    "log": (1, 1),
    "abs": (1, 1),
    "sqrt": (1, 1),
    "min": (2, None),
    "max": (2, None),
    "clamp": (3, 3),
}


@dataclass(frozen=True)
class Num:
    value: float


@dataclass(frozen=True)
class Var:
    name: str


@dataclass(frozen=True)
class Const:
    name: str


@dataclass(frozen=True)
class Neg:
    operand: object


@dataclass(frozen=True)
class BinOp:
    op: str
    left: object
    right: object


@dataclass(frozen=True)
class Call:
    name: str
    args: tuple


_TOKEN = re.compile(
    r"\s*(?:(?P<num>(?:\d+\.?\d*|\.\d+)(?:[eE][+-]?\d+)?)|(?P<ident>[A-Za-z_][A-Za-z_0-9]*)|(?P<op>[-+*/^(),]))"
)


def _tokenize(text: str):
    tokens = []
    pos = 0
    while pos < len(text):
        if text[pos:].strip() == "":
            break
        m = _TOKEN.match(text, pos)
        if not m or m.end() == pos:
            start = pos + (len(text[pos:]) - len(text[pos:].lstrip()))
            raise ExpressionSyntaxError(f"unexpected character {text[start]!r}", _byte_offset(text, start))
        kind = m.lastgroup
        start = m.start(kind)
        tokens.append((kind, m.group(kind), _byte_offset(text, start)))
        pos = m.end()
    tokens.append(("end", "", len(text.encode("utf-8"))))
    return tokens


def _byte_offset(text, index):
    return len(text[:index].encode("utf-8"))


class _Parser:
    def __init__(self, text):
        self.tokens = _tokenize(text)
        self.i = 0

    def peek(self):
        return self.tokens[self.i]

    def take(self):
        tok = self.tokens[self.i]
        self.i += 1
        return tok

    def expect(self, value):
        kind, text, offset = self.take()
        if text != value or kind == "end":
            found = "end of input" if kind == "end" else repr(text)
            raise ExpressionSyntaxError(f"expected {value!r}, found {found}", offset)

    def parse(self):
        node = self.expr()
        kind, text, offset = self.peek()
        if kind != "end":
            raise ExpressionSyntaxError(f"unexpected {text!r}", offset)
        return node

    def expr(self):
        node = self.term()
        while self.peek()[1] in ("+", "-") and self.peek()[0] == "op":
            op = self.take()[1]
            node = BinOp(op, node, self.term())
        return node

    def term(self):
        node = self.factor()
        while self.peek()[1] in ("*", "/") and self.peek()[0] == "op":
            op = self.take()[1]
            node = BinOp(op, node, self.factor())
        return node

    def factor(self):
        base = self.unary()
        if self.peek()[1] == "^" and self.peek()[0] == "op":
            self.take()
            return BinOp("^", base, self.factor())
        return base

    def unary(self):
        if self.peek()[1] == "-" and self.peek()[0] == "op":
            self.take()
            return Neg(self.unary())
        return self.atom()

    def atom(self):
        kind, text, offset = self.take()
        if kind == "num":
            return Num(float(text))
        if kind == "ident":
            if text in ("x", "y"):
                return Var(text)
            if text in ("pi", "inf"):
                return Const(text)
            if text not in FUNCTIONS:
                raise ExpressionSyntaxError(f"unknown identifier {text!r}", offset)
            self.expect("(")
            args = [self.expr()]
            while self.peek()[1] == ",":
                self.take()
                args.append(self.expr())
            self.expect(")")
            lo, hi = FUNCTIONS[text]
            if len(args) < lo or (hi is not None and len(args) > hi):
                want = str(lo) if lo == hi else f"at least {lo}"
                raise ExpressionSyntaxError(f"{text}() takes {want} arguments, got {len(args)}", offset)
            return Call(text, tuple(args))
        if text == "(":
            node = self.expr()
            self.expect(")")
            return node
        found = "end of input" if kind == "end" else repr(text)
        raise ExpressionSyntaxError(f"unexpected {found}", offset)


def _format_number(v: float) -> str:
    if v.is_integer() and abs(v) < 1e15:
        return str(int(v))
    return repr(v)


def to_source(node) -> str:
    """Canonical text; every compound subexpression is parenthesized."""
    if isinstance(node, Num):
        return _format_number(node.value)
    if isinstance(node, (Var, Const)):
        return node.name
    if isinstance(node, Neg):
        return f"-({to_source(node.operand)})"
    if isinstance(node, BinOp):
        return f"({to_source(node.left)} {node.op} {to_source(node.right)})"
    if isinstance(node, Call):
        return f"{node.name}({', '.join(to_source(a) for a in node.args)})"
    raise TypeError(f"not an expression node: {node!r}")


@dataclass(frozen=True)
class ExponentExpression:
    source: str
    ast: object

    def __str__(self):
        return to_source(self.ast)


def parse_expression(text: str) -> ExponentExpression:
    if not isinstance(text, str):
        raise InvalidInputError("expression must be text")
    if len(text.encode("utf-8")) > MAX_SOURCE_BYTES:
        raise InvalidInputError(f"expression longer than {MAX_SOURCE_BYTES} bytes")
    return ExponentExpression(text, _Parser(text).parse())


class _Domain(Exception):
    def __init__(self, message, mask):
        super().__init__(message)
        self.mask = mask


def _eval(node, env):
    if isinstance(node, Num):
        return np.full(env["shape"], node.value)
    if isinstance(node, Var):
        if node.name not in env:
            raise _Domain(f"variable {node.name!r} is not defined on a {env['dim']}D grid", None)
        return env[node.name]
    if isinstance(node, Const):
        return np.full(env["shape"], math.pi if node.name == "pi" else math.inf)
    if isinstance(node, Neg):
        return -_eval(node.operand, env)
    if isinstance(node, BinOp):
        a = _eval(node.left, env)
        b = _eval(node.right, env)
        if node.op == "+":
            return a + b
        if node.op == "-":
            return a - b
        if node.op == "*":
            return a * b
        if node.op == "/":
            return a / b
        return np.power(a, b)
    args = [_eval(a, env) for a in node.args]
    name = node.name
    if name == "log":
        bad = args[0] <= 0
        if np.any(bad):
            raise _Domain("log of a nonpositive value", bad)
        return np.log(args[0])
    if name == "sqrt":
        bad = args[0] < 0
        if np.any(bad):
            raise _Domain("sqrt of a negative value", bad)
        return np.sqrt(args[0])
    if name == "min":
        return np.minimum.reduce(args)
    if name == "max":
        return np.maximum.reduce(args)
    if name == "clamp":
        return np.minimum(np.maximum(args[0], args[1]), args[2])
    return {"sin": np.sin, "cos": np.cos, "exp": np.exp, "abs": np.abs}[name](args[0])


def _locate(mask, coords):
    idx = tuple(int(i) for i in np.argwhere(mask)[0])
    point = ", ".join(f"{c[idx]:g}" for c in coords)
    return idx, point


def evaluate(expr: ExponentExpression, *coords) -> np.ndarray:
    """Evaluate at coordinate arrays (``x`` and optionally ``y``).

    Division by zero gives ``inf``; a ``nan`` result or a domain violation
    raises :class:`ExpressionDomainError` naming the first offending point.
    """
    coords = [np.asarray(c, dtype=float) for c in coords]
    shape = np.broadcast_shapes(*(c.shape for c in coords)) if coords else ()
    coords = [np.broadcast_to(c, shape) for c in coords]
    env = {"shape": shape, "dim": len(coords)}
    env.update(zip(("x", "y"), coords))
    try:
        with np.errstate(all="ignore"):
            out = _eval(expr.ast, env)
    except _Domain as err:
        if err.mask is None:
            raise ExpressionDomainError(str(err)) from None
        idx, point = _locate(err.mask, coords)
        raise ExpressionDomainError(f"{err} at grid index {idx} (point {point})") from None
    out = np.array(np.broadcast_to(out, shape), dtype=float)
    bad = np.isnan(out)
    if np.any(bad):
        idx, point = _locate(bad, coords)
        raise ExpressionDomainError(f"expression is undefined at grid index {idx} (point {point})")
    return out


def evaluate_on_grid(expr: ExponentExpression, grid) -> np.ndarray:
    return evaluate(expr, *grid.coordinates())


def validate_role(values, role: str, flavor: str = "besov", floor: float | None = None) -> np.ndarray:
    """Check evaluated samples against their role.

    ``p``: values in ``(0, inf]``; ``q``: the same, with ``inf`` only in the
    Besov flavor; ``s``: finite reals.
    """
    v = np.asarray(values, dtype=float)
    if role == "s":
        if not np.all(np.isfinite(v)):
            raise InvalidInputError("smoothness must be finite everywhere")
        return v
    if role not in ("p", "q"):
        raise InvalidInputError(f"unknown role {role!r}")
    if np.any(v <= 0):
        raise InvalidInputError(f"{role} must be positive, found {v.min():g}")
    if floor is not None and np.any(v < floor):
        raise InvalidInputError(f"{role} falls below the declared floor {floor:g}")
    if role == "q" and flavor == "tl" and np.any(np.isinf(v)):
        raise InvalidInputError("q = inf is only supported for the besov flavor")
    return v
