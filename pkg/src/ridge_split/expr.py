"""Closed-form real expressions: parsing, evaluation, symbolic differentiation.

Expressions are immutable trees. They evaluate on floats or on numpy arrays
(elementwise, with broadcasting), which is how the rest of the package sweeps
grids. Differentiation is exact and purely structural; the simplifier only folds
constants and 0/1 identities, so derivative trees may stay unsimplified.

Grammar (whitespace insignificant)::

    expr    := expr ('+' | '-') expr | expr ('*' | '/') expr
             | expr '^' expr          # right associative, binds tightest
             | ('-' | '+') expr       # binds looser than '^': -x^2 == -(x^2)
             | NUMBER | NAME | FUNC '(' expr ')' | '(' expr ')'

``pi`` and ``e`` are constants; functions are sin, cos, tan, exp, log, sqrt,
abs (and sign, which appears in the derivative of abs).
"""

from __future__ import annotations

import math
import re
from dataclasses import dataclass
from typing import Iterable, Mapping

import numpy as np

from .errors import (DomainError, ParseError, UnboundVariableError,
                     UnknownFunctionError, UnknownIdentifierError)

__all__ = [
    "Expr", "Const", "Var", "Neg", "BinOp", "Call",
    "parse", "evaluate", "diff", "serialize", "substitute", "is_smooth",
    "FUNCTIONS", "CONSTANTS",
]

FUNCTIONS = ("sin", "cos", "tan", "exp", "log", "sqrt", "abs", "sign")
CONSTANTS = {"pi": math.pi, "e": math.e}

# printing precedence
_ADD, _MUL, _NEG, _POW, _ATOM = 1, 2, 3, 4, 5
_OP_PREC = {"+": _ADD, "-": _ADD, "*": _MUL, "/": _MUL, "^": _POW}


class Expr:
    """Base class of expression nodes."""

    __slots__ = ()

    @property
    def precedence(self) -> int:
        return _ATOM

    def evaluate(self, bindings: Mapping[str, object]):
        """Evaluate with ``bindings`` (floats or arrays). Returns a float for
        scalar input and an ndarray otherwise."""
        with np.errstate(all="ignore"):
            out = self._eval(bindings)
        if np.ndim(out) == 0:
            return float(out)
        return out

    def _eval(self, env):
        raise NotImplementedError

    def diff(self, var: str) -> Expr:
        raise NotImplementedError

    def variables(self) -> frozenset[str]:
        return frozenset()

    def substitute(self, mapping: Mapping[str, Expr]) -> Expr:
        return self

    def nodes(self) -> Iterable[Expr]:
        yield self

    def __str__(self) -> str:
        return self._text()

    def _text(self) -> str:
        raise NotImplementedError

    # building expressions from Python code
    def __add__(self, other):
        return add(self, _lift(other))

    def __radd__(self, other):
        return add(_lift(other), self)

    def __sub__(self, other):
        return sub(self, _lift(other))

    def __rsub__(self, other):
        return sub(_lift(other), self)

    def __mul__(self, other):
        return mul(self, _lift(other))

    def __rmul__(self, other):
        return mul(_lift(other), self)

    def __truediv__(self, other):
        return div(self, _lift(other))

    def __rtruediv__(self, other):
        return div(_lift(other), self)

    def __pow__(self, other):
        return power(self, _lift(other))

    def __rpow__(self, other):
        return power(_lift(other), self)

    def __neg__(self):
        return neg(self)


def _lift(value) -> Expr:
    if isinstance(value, Expr):
        return value
    return Const(float(value))


def _finite(value, what: str):
    if not np.all(np.isfinite(value)):
        raise DomainError(f"non-finite result in {what}")
    return value


@dataclass(frozen=True, slots=True)
class Const(Expr):
    value: float

    @property
    def precedence(self) -> int:
        return _NEG if math.copysign(1.0, self.value) < 0 else _ATOM

    def _eval(self, env):
        return self.value

    def diff(self, var):
        return ZERO

    def _text(self):
        v = float(self.value)
        if math.copysign(1.0, v) < 0:
            return "-" + Const(-v)._text()
        if v.is_integer() and v < 1e15:
            return str(int(v))
        return repr(v)


@dataclass(frozen=True, slots=True)
class Var(Expr):
    name: str

    def _eval(self, env):
        try:
            return np.asarray(env[self.name], dtype=float)
        except KeyError:
            raise UnboundVariableError(self.name) from None

    def diff(self, var):
        return ONE if var == self.name else ZERO

    def variables(self):
        return frozenset((self.name,))

    def substitute(self, mapping):
        return mapping.get(self.name, self)

    def _text(self):
        return self.name


@dataclass(frozen=True, slots=True)
class Neg(Expr):
    arg: Expr

    @property
    def precedence(self):
        return _NEG

    def _eval(self, env):
        return -self.arg._eval(env)

    def diff(self, var):
        return neg(self.arg.diff(var))

    def variables(self):
        return self.arg.variables()

    def substitute(self, mapping):
        return neg(self.arg.substitute(mapping))

    def nodes(self):
        yield self
        yield from self.arg.nodes()

    def _text(self):
        inner = self.arg._text()
        if self.arg.precedence <= _NEG:
            inner = f"({inner})"
        return "-" + inner


@dataclass(frozen=True, slots=True)
class BinOp(Expr):
    op: str
    left: Expr
    right: Expr

    @property
    def precedence(self):
        return _OP_PREC[self.op]

    def _eval(self, env):
        a = self.left._eval(env)
        b = self.right._eval(env)
        op = self.op
        if op == "+":
            return _finite(a + b, "addition")
        if op == "-":
            return _finite(a - b, "subtraction")
        if op == "*":
            return _finite(a * b, "multiplication")
        if op == "/":
            if np.any(np.asarray(b) == 0):
                raise DomainError("division by zero")
            return _finite(a / b, "division")
        return _power(a, b)

    def diff(self, var):
        a, b = self.left, self.right
        op = self.op
        if op == "+":
            return add(a.diff(var), b.diff(var))
        if op == "-":
            return sub(a.diff(var), b.diff(var))
        if op == "*":
            return add(mul(a.diff(var), b), mul(a, b.diff(var)))
        if op == "/":
            num = sub(mul(a.diff(var), b), mul(a, b.diff(var)))
            return div(num, power(b, TWO))
        # power
        if var not in b.variables():
            return mul(mul(b, power(a, sub(b, ONE))), a.diff(var))
        if var not in a.variables():
            return mul(mul(self, call("log", a)), b.diff(var))
        inner = add(mul(b.diff(var), call("log", a)), div(mul(b, a.diff(var)), a))
        return mul(self, inner)

    def variables(self):
        return self.left.variables() | self.right.variables()

    def substitute(self, mapping):
        return _binop(self.op, self.left.substitute(mapping),
                      self.right.substitute(mapping))

    def nodes(self):
        yield self
        yield from self.left.nodes()
        yield from self.right.nodes()

    def _text(self):
        prec = self.precedence
        left, right = self.left._text(), self.right._text()
        if self.op == "^":
            if self.left.precedence <= _POW:
                left = f"({left})"
            if self.right.precedence < _POW:
                right = f"({right})"
            return f"{left}^{right}"
        if self.left.precedence < prec:
            left = f"({left})"
        if self.right.precedence <= prec:
            right = f"({right})"
        return f"{left} {self.op} {right}"


def _power(a, b):
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    if np.any((a < 0) & (b != np.round(b))):
        raise DomainError("fractional power of a negative base")
    if np.any((a == 0) & (b < 0)):
        raise DomainError("division by zero (zero to a negative power)")
    return _finite(np.power(a, b), "power")


_UNARY = {
    "sin": np.sin, "cos": np.cos, "tan": np.tan, "exp": np.exp,
    "abs": np.abs, "sign": np.sign,
}


@dataclass(frozen=True, slots=True)
class Call(Expr):
    fn: str
    arg: Expr

    def _eval(self, env):
        u = np.asarray(self.arg._eval(env), dtype=float)
        if self.fn == "log":
            if np.any(u <= 0):
                raise DomainError("log of a non-positive number")
            return np.log(u)
        if self.fn == "sqrt":
            if np.any(u < 0):
                raise DomainError("sqrt of a negative number")
            return np.sqrt(u)
        return _finite(_UNARY[self.fn](u), self.fn)

    def diff(self, var):
        u = self.arg
        du = u.diff(var)
        if du == ZERO:
            return ZERO
        fn = self.fn
        if fn == "sin":
            outer = call("cos", u)
        elif fn == "cos":
            outer = neg(call("sin", u))
        elif fn == "tan":
            outer = add(ONE, power(call("tan", u), TWO))
        elif fn == "exp":
            outer = self
        elif fn == "log":
            outer = div(ONE, u)
        elif fn == "sqrt":
            outer = div(HALF, self)
        elif fn == "abs":
            outer = call("sign", u)
        else:  # sign: zero almost everywhere
            return ZERO
        return mul(outer, du)

    def variables(self):
        return self.arg.variables()

    def substitute(self, mapping):
        return call(self.fn, self.arg.substitute(mapping))

    def nodes(self):
        yield self
        yield from self.arg.nodes()

    def _text(self):
        return f"{self.fn}({self.arg._text()})"


ZERO, ONE, TWO, HALF = Const(0.0), Const(1.0), Const(2.0), Const(0.5)


# -- smart constructors (best-effort simplification) ------------------------

def _is(e: Expr, value: float) -> bool:
    return isinstance(e, Const) and e.value == value


def _fold(op: str, a: Expr, b: Expr) -> Expr | None:
    if isinstance(a, Const) and isinstance(b, Const):
        try:
            return Const(BinOp(op, a, b).evaluate({}))
        except DomainError:
            return None
    return None


def add(a: Expr, b: Expr) -> Expr:
    folded = _fold("+", a, b)
    if folded is not None:
        return folded
    if _is(a, 0.0):
        return b
    if _is(b, 0.0):
        return a
    return BinOp("+", a, b)


def sub(a: Expr, b: Expr) -> Expr:
    folded = _fold("-", a, b)
    if folded is not None:
        return folded
    if _is(b, 0.0):
        return a
    if _is(a, 0.0):
        return neg(b)
    return BinOp("-", a, b)


def mul(a: Expr, b: Expr) -> Expr:
    folded = _fold("*", a, b)
    if folded is not None:
        return folded
    if _is(a, 0.0) or _is(b, 0.0):
        return ZERO
    if _is(a, 1.0):
        return b
    if _is(b, 1.0):
        return a
    if _is(a, -1.0):
        return neg(b)
    if _is(b, -1.0):
        return neg(a)
    return BinOp("*", a, b)


def div(a: Expr, b: Expr) -> Expr:
    folded = _fold("/", a, b)
    if folded is not None:
        return folded
    if _is(b, 1.0):
        return a
    if _is(a, 0.0) and isinstance(b, Const) and b.value != 0.0:
        return ZERO
    return BinOp("/", a, b)


def power(a: Expr, b: Expr) -> Expr:
    folded = _fold("^", a, b)
    if folded is not None:
        return folded
    if _is(b, 0.0):
        return ONE
    if _is(b, 1.0):
        return a
    return BinOp("^", a, b)


def neg(a: Expr) -> Expr:
    if isinstance(a, Const):
        return Const(-a.value)
    if isinstance(a, Neg):
        return a.arg
    return Neg(a)


def call(fn: str, arg: Expr) -> Expr:
    if fn not in FUNCTIONS:
        raise UnknownFunctionError(fn)
    node = Call(fn, arg)
    if isinstance(arg, Const):
        try:
            return Const(node.evaluate({}))
        except DomainError:
            return node
    return node


def _binop(op: str, a: Expr, b: Expr) -> Expr:
    return {"+": add, "-": sub, "*": mul, "/": div, "^": power}[op](a, b)


# -- parser ------------------------------------------------------------------

_TOKEN = re.compile(r"""
    (?P<ws>\s+)
  | (?P<num>(?:\d+\.?\d*|\.\d+)(?:[eE][+-]?\d+)?)
  | (?P<name>[A-Za-z_][A-Za-z_0-9]*)
  | (?P<op>[-+*/^()])
""", re.VERBOSE)

_LBP = {"+": 10, "-": 10, "*": 20, "/": 20, "^": 30}
_PREFIX_BP = 25


@dataclass(frozen=True, slots=True)
class _Tok:
    kind: str   # num, name, op, end
    text: str
    pos: int


def _tokenize(text: str) -> list[_Tok]:
    toks: list[_Tok] = []
    pos = 0
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if m is None:
            raise ParseError(f"syntax error: unexpected character {text[pos]!r}", pos)
        kind = m.lastgroup
        if kind != "ws":
            toks.append(_Tok(kind, m.group(), pos))
        pos = m.end()
    toks.append(_Tok("end", "", len(text)))
    return toks


class _Parser:
    def __init__(self, text: str, allowed: frozenset[str]):
        self.toks = _tokenize(text)
        self.i = 0
        self.allowed = allowed

    @property
    def tok(self) -> _Tok:
        return self.toks[self.i]

    def advance(self) -> _Tok:
        t = self.toks[self.i]
        self.i += 1
        return t

    def expect(self, text: str) -> None:
        t = self.tok
        if t.text != text or t.kind != "op":
            found = repr(t.text) if t.kind != "end" else "end of input"
            raise ParseError(f"syntax error: expected {text!r}, found {found}", t.pos)
        self.advance()

    def expression(self, rbp: int = 0) -> Expr:
        left = self.prefix()
        while True:
            t = self.tok
            lbp = _LBP.get(t.text, 0) if t.kind == "op" else 0
            if lbp <= rbp:
                return left
            self.advance()
            # '^' is right associative
            right = self.expression(lbp - 1 if t.text == "^" else lbp)
            left = BinOp(t.text, left, right)

    def prefix(self) -> Expr:
        t = self.advance()
        if t.kind == "num":
            return Const(float(t.text))
        if t.kind == "name":
            return self.name(t)
        if t.kind == "op" and t.text == "(":
            inner = self.expression()
            self.expect(")")
            return inner
        if t.kind == "op" and t.text in "+-":
            operand = self.expression(_PREFIX_BP)
            return Neg(operand) if t.text == "-" else operand
        found = repr(t.text) if t.kind != "end" else "end of input"
        raise ParseError(f"syntax error: unexpected {found}", t.pos)

    def name(self, t: _Tok) -> Expr:
        followed_by_paren = self.tok.kind == "op" and self.tok.text == "("
        if t.text in FUNCTIONS:
            if not followed_by_paren:
                raise ParseError(f"syntax error: function {t.text!r} needs '('", self.tok.pos)
            self.advance()
            arg = self.expression()
            self.expect(")")
            return Call(t.text, arg)
        if t.text in self.allowed:
            return Var(t.text)
        if t.text in CONSTANTS:
            return Const(CONSTANTS[t.text])
        if followed_by_paren:
            raise UnknownFunctionError(t.text, t.pos)
        raise UnknownIdentifierError(t.text, t.pos)


def parse(text: str, allowed_vars: Iterable[str] = ("x", "y")) -> Expr:
    """Parse infix ``text`` into an expression over ``allowed_vars``.

    Raises ParseError (with a character position) on malformed input, and its
    subclasses UnknownIdentifierError / UnknownFunctionError for names that are
    neither declared variables, constants, nor known functions.
    """
    if not text or not text.strip():
        raise ParseError("empty expression", 0)
    p = _Parser(text, frozenset(allowed_vars))
    e = p.expression()
    if p.tok.kind != "end":
        raise ParseError(f"syntax error: unexpected {p.tok.text!r}", p.tok.pos)
    return e


# -- module-level conveniences ---------------------------------------------

def evaluate(e: Expr, bindings: Mapping[str, object]):
    return e.evaluate(bindings)


def diff(e: Expr, var: str) -> Expr:
    return e.diff(var)


def serialize(e: Expr) -> str:
    return e._text()


def substitute(e: Expr, mapping: Mapping[str, Expr]) -> Expr:
    return e.substitute(mapping)


def is_smooth(e: Expr) -> bool:
    """False when the tree contains abs or sign, whose derivatives jump at 0."""
    return not any(isinstance(n, Call) and n.fn in ("abs", "sign") for n in e.nodes())
