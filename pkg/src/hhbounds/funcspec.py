"""User functions: a small expression language for f and f', plus built-in families.

Grammar (whitespace is ignored between tokens)::

    expr    := term (('+' | '-') term)*
    term    := factor (('*' | '/') factor)*
    factor  := ['-'] power
    power   := primary ['^' factor]
    primary := number | 'x' | ident '(' expr ')' | '(' expr ')'
    number  := digits ['.' digits] [('e' | 'E') ['+' | '-'] digits]
    ident   := 'exp' | 'ln' | 'abs' | 'sqrt'

``^`` is right-associative and a leading minus applies to the whole power,
so ``-x^2`` is ``-(x^2)`` and ``2^-1`` is ``0.5``. There is no implicit
multiplication.
"""

from __future__ import annotations

import math
import re
import warnings
from collections.abc import Callable
from dataclasses import dataclass, field
from typing import Union

import numpy as np

from .errors import DomainError, EvalError, ExprSyntaxError

FUNCTIONS = ("exp", "ln", "abs", "sqrt")


@dataclass(frozen=True)
class Const:
    value: float


@dataclass(frozen=True)
class Var:
    pass


@dataclass(frozen=True)
class Neg:
    operand: "Expr"


@dataclass(frozen=True)
class BinOp:
    op: str
    left: "Expr"
    right: "Expr"


@dataclass(frozen=True)
class Call:
    fn: str
    arg: "Expr"


Expr = Union[Const, Var, Neg, BinOp, Call]


# ---------------------------------------------------------------- parsing

_NUMBER = re.compile(r"(?:\d+(?:\.\d*)?|\.\d+)(?:[eE][+-]?\d+)?")
_IDENT = re.compile(r"[A-Za-z_][A-Za-z_0-9]*")


class _Parser:
    def __init__(self, src: str):
        self.src = src
        self.pos = 0

    def _skip(self):
        while self.pos < len(self.src) and self.src[self.pos] in " \t\r\n":
            self.pos += 1

    def _peek(self) -> str:
        self._skip()
        return self.src[self.pos] if self.pos < len(self.src) else ""

    def _error(self, expected: str):
        self._skip()
        found = self.src[self.pos] if self.pos < len(self.src) else "end of input"
        raise ExprSyntaxError(self.pos, expected, found)

    def _expect(self, ch: str):
        if self._peek() != ch:
            self._error(repr(ch))
        self.pos += 1

    def parse(self) -> Expr:
        if not self.src.strip():
            raise ExprSyntaxError(0, "an expression", "end of input")
        node = self.expr()
        if self._peek():
            self._error("operator or end of input")
        return node

    def expr(self) -> Expr:
        node = self.term()
        while self._peek() in ("+", "-"):
            op = self.src[self.pos]
            self.pos += 1
            node = BinOp(op, node, self.term())
        return node

    def term(self) -> Expr:
        node = self.factor()
        while self._peek() in ("*", "/"):
            op = self.src[self.pos]
            self.pos += 1
            node = BinOp(op, node, self.factor())
        return node

    def factor(self) -> Expr:
        if self._peek() == "-":
            self.pos += 1
            return Neg(self.power())
        return self.power()

    def power(self) -> Expr:
        base = self.primary()
        if self._peek() == "^":
            self.pos += 1
            return BinOp("^", base, self.factor())
        return base

    def primary(self) -> Expr:
        ch = self._peek()
        if ch == "(":
            self.pos += 1
            node = self.expr()
            self._expect(")")
            return node
        m = _NUMBER.match(self.src, self.pos)
        if m:
            value = float(m.group())
            if not math.isfinite(value):
                raise ExprSyntaxError(self.pos, "a finite number", m.group())
            self.pos = m.end()
            return Const(value)
        m = _IDENT.match(self.src, self.pos)
        if m:
            name = m.group()
            if name == "x":
                self.pos = m.end()
                return Var()
            if name in FUNCTIONS:
                self.pos = m.end()
                self._expect("(")
                arg = self.expr()
                self._expect(")")
                return Call(name, arg)
            raise ExprSyntaxError(self.pos, "'x' or one of " + ", ".join(FUNCTIONS), name)
        self._error("number, 'x', function call or '('")


def parse(src: str) -> Expr:
    """Parse ``src`` into an expression tree.

    Raises:
        ExprSyntaxError: with the byte offset and the expected token class.
    """
    return _Parser(src).parse()


def to_source(e: Expr) -> str:
    """Render a fully parenthesized source string that parses back to an
    expression with the same evaluation order."""
    if isinstance(e, Const):
        text = repr(e.value)
        return f"({text})" if e.value < 0 or text.startswith("-") else text
    if isinstance(e, Var):
        return "x"
    if isinstance(e, Neg):
        return f"(-{to_source(e.operand)})"
    if isinstance(e, BinOp):
        return f"({to_source(e.left)}{e.op}{to_source(e.right)})"
    if isinstance(e, Call):
        return f"{e.fn}({to_source(e.arg)})"
    raise TypeError(f"not an expression node: {e!r}")


# ---------------------------------------------------------------- evaluation

def _check(v, what: str):
    if isinstance(v, np.ndarray):
        if not np.all(np.isfinite(v)):
            raise EvalError(f"non-finite value in {what}")
    elif isinstance(v, complex) or not math.isfinite(v):
        raise EvalError(f"non-finite value in {what}")
    return v


def _eval(e: Expr, x):
    vec = isinstance(x, np.ndarray)
    if isinstance(e, Const):
        return e.value
    if isinstance(e, Var):
        return x
    if isinstance(e, Neg):
        return -_eval(e.operand, x)
    if isinstance(e, BinOp):
        lhs = _eval(e.left, x)
        rhs = _eval(e.right, x)
        try:
            if e.op == "+":
                out = lhs + rhs
            elif e.op == "-":
                out = lhs - rhs
            elif e.op == "*":
                out = lhs * rhs
            elif e.op == "/":
                if np.any(np.asarray(rhs) == 0):
                    raise EvalError("division by zero")
                out = lhs / rhs
            else:
                if vec or isinstance(lhs, np.ndarray) or isinstance(rhs, np.ndarray):
                    with np.errstate(all="ignore"):
                        out = np.power(np.asarray(lhs, dtype=float), rhs)
                    if np.any(np.isnan(out)):
                        raise EvalError("power of a negative base with a non-integer exponent")
                else:
                    out = math.pow(lhs, rhs)
        except (OverflowError, ValueError, ZeroDivisionError) as exc:
            raise EvalError(f"cannot evaluate '{e.op}': {exc}") from None
        return _check(out, f"'{e.op}'")
    if isinstance(e, Call):
        arg = _eval(e.arg, x)
        if e.fn == "ln":
            if np.any(np.asarray(arg) <= 0):
                raise EvalError("ln of a non-positive number")
            out = np.log(arg) if vec else math.log(arg)
        elif e.fn == "sqrt":
            if np.any(np.asarray(arg) < 0):
                raise EvalError("sqrt of a negative number")
            out = np.sqrt(arg) if vec else math.sqrt(arg)
        elif e.fn == "abs":
            out = np.abs(arg) if vec else abs(arg)
        else:
            try:
                if vec:
                    with np.errstate(over="ignore"):
                        out = np.exp(arg)
                else:
                    out = math.exp(arg)
            except OverflowError:
                raise EvalError("exp overflow") from None
        return _check(out, e.fn)
    raise TypeError(f"not an expression node: {e!r}")


def evaluate(e: Expr, x):
    """Evaluate ``e`` at a float or elementwise over a numpy array.

    Raises:
        EvalError: on ln of a non-positive value, division by zero or any
            non-finite intermediate.
    """
    if isinstance(x, np.ndarray):
        x = x.astype(float)
        out = _eval(e, x)
        return np.broadcast_to(np.asarray(out, dtype=float), x.shape).copy()
    if not math.isfinite(x):
        raise EvalError("evaluation point must be finite")
    return float(_eval(e, float(x)))


# ---------------------------------------------------------------- function specs

@dataclass(frozen=True)
class FunctionSpec:
    """f and f' behind one evaluation interface.

    ``f`` may be None when only f' is known; the trapezoid defect is then
    obtained from f' alone. Both callables accept floats and numpy arrays.
    """

    f: Callable | None
    fprime: Callable
    label: str
    params: dict = field(default_factory=dict, compare=False)

    def abs_fprime(self, x):
        return np.abs(self.fprime(x)) if isinstance(x, np.ndarray) else abs(self.fprime(x))


def _expr_callable(e: Expr) -> Callable:
    def fn(x):
        return evaluate(e, x)

    fn.expr = e
    return fn


FD_STEP = 1e-6
FD_REL_TOL = 1e-4


def from_expressions(f_src: str | None, fprime_src: str, check_points: int = 16) -> FunctionSpec:
    """Build a FunctionSpec from source strings.

    When both f and f' are given, f' is compared with a central difference of
    f on a grid in [0.05, 1]; a relative mismatch above 1e-4 emits a
    ``UserWarning``.
    """
    fp_expr = parse(fprime_src)
    f_expr = parse(f_src) if f_src else None
    fprime = _expr_callable(fp_expr)
    f = _expr_callable(f_expr) if f_expr is not None else None
    label = f"f'(x)={fprime_src}" if f is None else f"f(x)={f_src}; f'(x)={fprime_src}"
    spec = FunctionSpec(f, fprime, label, {"f": f_src, "fprime": fprime_src})
    if f is not None:
        worst = derivative_mismatch(spec, np.linspace(0.05, 1.0, check_points))
        if worst > FD_REL_TOL:
            warnings.warn(
                f"f' does not match a finite difference of f (relative mismatch {worst:.3g})",
                UserWarning,
                stacklevel=2,
            )
    return spec


def derivative_mismatch(spec: FunctionSpec, points) -> float:
    """Largest relative gap between f' and a central difference of f.

    Points where either side cannot be evaluated are skipped.
    """
    worst = 0.0
    for x in points:
        x = float(x)
        try:
            fd = (spec.f(x + FD_STEP) - spec.f(x - FD_STEP)) / (2 * FD_STEP)
            d = spec.fprime(x)
        except EvalError:
            continue
        worst = max(worst, abs(fd - d) / max(abs(d), 1.0))
    return worst


def builtin_power_s(s: float, c: float = 1.0) -> FunctionSpec:
    """f(x) = c x^s / s and f'(x) = c x^(s-1), for 0 < s < 1 and c > 0."""
    if not (0 < s < 1):
        raise DomainError(f"power_s needs 0 < s < 1, got s={s!r}")
    if not (c > 0 and math.isfinite(c)):
        raise DomainError(f"power_s needs finite c > 0, got c={c!r}")

    def f(x):
        return c * x**s / s

    def fprime(x):
        return c * x ** (s - 1)

    return FunctionSpec(f, fprime, f"power_s(s={s!r}, c={c!r})", {"s": s, "c": c})


BUILTINS = {"power_s": builtin_power_s}
