"""Expression language for field elements, derivative rules, matrix entries.

Grammar, loosest binding first::

    sum     := signed (("+" | "-") signed)*
    signed  := "-" signed | product
    product := factor (("*" | "/") factor)*
    factor  := "-" factor | power
    power   := atom ("^" exponent)?
    exponent:= ["-"] INT ("^" exponent)?
    atom    := INT | NAME | "(" sum ")"

A leading minus negates the whole product after it, so ``-1/x^2`` reads as
``-(1/(x^2))``; ``^`` binds tighter than any minus and only takes integer
literal exponents.  There is no implicit multiplication and no function
call syntax.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from typing import Sequence, Union

from .arith import RationalFunction
from .errors import ExprSyntaxError, UnknownVariableError, ZeroDenominatorError

FORMAT_VERSION = "pvforge-expr/1"

NAME_RE = re.compile(r"[a-zA-Z][a-zA-Z0-9_]*")
_TOKEN_RE = re.compile(r"\s*(?:(\d+)|([a-zA-Z][a-zA-Z0-9_]*)|(\S))")
_MAX_EXPONENT = 10_000


@dataclass(frozen=True)
class Int:
    value: int


@dataclass(frozen=True)
class Var:
    name: str


@dataclass(frozen=True)
class Neg:
    operand: "Expression"


@dataclass(frozen=True)
class Add:
    left: "Expression"
    right: "Expression"


@dataclass(frozen=True)
class Sub:
    left: "Expression"
    right: "Expression"


@dataclass(frozen=True)
class Mul:
    left: "Expression"
    right: "Expression"


@dataclass(frozen=True)
class Div:
    left: "Expression"
    right: "Expression"


@dataclass(frozen=True)
class Pow:
    base: "Expression"
    exponent: int


Expression = Union[Int, Var, Neg, Add, Sub, Mul, Div, Pow]


def _tokenize(text: str):
    tokens = []
    pos = 0
    while True:
        m = _TOKEN_RE.match(text, pos)
        if m is None:
            break
        start = m.start(m.lastindex)
        if m.group(1) is not None:
            tokens.append(("int", m.group(1), start))
        elif m.group(2) is not None:
            tokens.append(("name", m.group(2), start))
        else:
            ch = m.group(3)
            if ch not in "+-*/^()":
                raise ExprSyntaxError(f"unexpected character {ch!r}", text, start)
            tokens.append((ch, ch, start))
        pos = m.end()
    tokens.append(("end", "", len(text)))
    return tokens


class _Parser:
    def __init__(self, text: str, known: Sequence[str] | None):
        self.text = text
        self.known = None if known is None else tuple(known)
        self.tokens = _tokenize(text)
        self.i = 0

    def peek(self):
        return self.tokens[self.i]

    def take(self, kind=None):
        tok = self.tokens[self.i]
        if kind is not None and tok[0] != kind:
            what = "end of input" if tok[0] == "end" else repr(tok[1])
            raise ExprSyntaxError(f"expected {kind!r}, found {what}", self.text, tok[2])
        self.i += 1
        return tok

    def parse(self) -> Expression:
        e = self.sum()
        tok = self.peek()
        if tok[0] != "end":
            raise ExprSyntaxError(f"unexpected {tok[1]!r}", self.text, tok[2])
        return e

    def sum(self):
        e = self.signed()
        while self.peek()[0] in ("+", "-"):
            op = self.take()[0]
            rhs = self.signed()
            e = Add(e, rhs) if op == "+" else Sub(e, rhs)
        return e

    def signed(self):
        if self.peek()[0] == "-":
            self.take()
            return Neg(self.signed())
        return self.product()

    def product(self):
        e = self.factor()
        while self.peek()[0] in ("*", "/"):
            op = self.take()[0]
            rhs = self.factor()
            e = Mul(e, rhs) if op == "*" else Div(e, rhs)
        return e

    def factor(self):
        if self.peek()[0] == "-":
            self.take()
            return Neg(self.factor())
        return self.power()

    def power(self):
        base = self.atom()
        if self.peek()[0] == "^":
            self.take()
            return Pow(base, self.exponent())
        return base

    def exponent(self) -> int:
        tok = self.peek()
        sign = 1
        if tok[0] == "-":
            self.take()
            sign = -1
        tok = self.take("int")
        k = int(tok[1])
        if self.peek()[0] == "^":
            self.take()
            at = self.peek()[2]
            inner = self.exponent()
            if inner < 0:
                raise ExprSyntaxError("exponent tower does not give an integer", self.text, at)
            if k > 1 and inner * k.bit_length() > _MAX_EXPONENT.bit_length() * 4:
                raise ExprSyntaxError("exponent too large", self.text, tok[2])
            k = k ** inner
        k *= sign
        if abs(k) > _MAX_EXPONENT:
            raise ExprSyntaxError("exponent too large", self.text, tok[2])
        return k

    def atom(self):
        tok = self.peek()
        if tok[0] == "int":
            self.take()
            return Int(int(tok[1]))
        if tok[0] == "name":
            self.take()
            if self.known is not None and tok[1] not in self.known:
                raise UnknownVariableError(tok[1], self.known)
            return Var(tok[1])
        if tok[0] == "(":
            self.take()
            e = self.sum()
            self.take(")")
            return e
        what = "end of input" if tok[0] == "end" else repr(tok[1])
        raise ExprSyntaxError(f"expected an operand, found {what}", self.text, tok[2])


def parse(text: str, known: Sequence[str] | None = None) -> Expression:
    """Parse ``text``; names outside ``known`` raise UnknownVariableError.

    ``known=None`` accepts any well-formed name.
    """
    return _Parser(text, known).parse()


# precedence levels used by the printer
_SUM, _SIGNED, _PRODUCT, _FACTOR, _POWER, _ATOM = range(6)


def _is_negative(e) -> bool:
    return isinstance(e, Neg) or (isinstance(e, Int) and e.value < 0)


def to_string(e: Expression) -> str:
    """Print with only the parentheses the grammar needs."""
    return _show(e, _SUM)


def _paren(s: str, need: bool) -> str:
    return f"({s})" if need else s


def _show(e, ctx: int) -> str:
    if isinstance(e, Int):
        if e.value < 0:
            # shown like a negation
            return _paren(f"-{-e.value}", ctx > _FACTOR)
        return str(e.value)
    if isinstance(e, Var):
        return e.name
    if isinstance(e, Neg):
        inner = _show(e.operand, _SIGNED if ctx <= _SIGNED else _FACTOR)
        return _paren("-" + inner, ctx > _FACTOR)
    if isinstance(e, (Add, Sub)):
        op = " + " if isinstance(e, Add) else " - "
        s = _show(e.left, _SUM) + op + _show(e.right, _SIGNED)
        return _paren(s, ctx > _SUM)
    if isinstance(e, (Mul, Div)):
        op = "*" if isinstance(e, Mul) else "/"
        left = _show_operand(e.left)
        right = _show(e.right, _FACTOR)
        if isinstance(e.right, (Mul, Div)):
            right = f"({_show(e.right, _SUM)})"
        s = left + op + right
        return _paren(s, ctx > _PRODUCT)
    if isinstance(e, Pow):
        base = _show(e.base, _ATOM)
        return _paren(f"{base}^{e.exponent}", ctx > _POWER)
    raise TypeError(f"not an expression: {e!r}")


def _show_operand(e) -> str:
    # a leading minus in the left operand of * or / would swallow the product
    if _is_negative(e):
        return "(" + _show(e, _SUM) + ")"
    return _show(e, _PRODUCT)


def fold(e: Expression) -> Expression:
    """Constant-folding normalization: ``Neg(Int(k))`` becomes ``Int(-k)``."""
    if isinstance(e, Neg):
        inner = fold(e.operand)
        if isinstance(inner, Int):
            return Int(-inner.value)
        return Neg(inner)
    if isinstance(e, (Add, Sub, Mul, Div)):
        return type(e)(fold(e.left), fold(e.right))
    if isinstance(e, Pow):
        return Pow(fold(e.base), e.exponent)
    return e


def variables_of(e: Expression) -> frozenset[str]:
    if isinstance(e, Var):
        return frozenset([e.name])
    if isinstance(e, Int):
        return frozenset()
    if isinstance(e, Neg):
        return variables_of(e.operand)
    if isinstance(e, Pow):
        return variables_of(e.base)
    return variables_of(e.left) | variables_of(e.right)


def to_rational_function(e: Expression, variables: Sequence[str]) -> RationalFunction:
    """Evaluate ``e`` exactly in Q(variables)."""
    variables = tuple(variables)
    missing = sorted(variables_of(e) - set(variables))
    if missing:
        raise UnknownVariableError(missing[0], variables)
    return _eval(e, variables)


def _eval(e, variables) -> RationalFunction:
    if isinstance(e, Int):
        return RationalFunction.constant(variables, e.value)
    if isinstance(e, Var):
        return RationalFunction.variable(variables, e.name)
    if isinstance(e, Neg):
        return -_eval(e.operand, variables)
    if isinstance(e, Add):
        return _eval(e.left, variables) + _eval(e.right, variables)
    if isinstance(e, Sub):
        return _eval(e.left, variables) - _eval(e.right, variables)
    if isinstance(e, Mul):
        return _eval(e.left, variables) * _eval(e.right, variables)
    if isinstance(e, Div):
        den = _eval(e.right, variables)
        if den.is_zero():
            raise ZeroDenominatorError(f"denominator {to_string(e.right)!r} is identically zero")
        return _eval(e.left, variables) / den
    if isinstance(e, Pow):
        base = _eval(e.base, variables)
        if e.exponent < 0 and base.is_zero():
            raise ZeroDenominatorError(f"negative power of zero in {to_string(e)!r}")
        return base ** e.exponent
    raise TypeError(f"not an expression: {e!r}")


def parse_rational_function(text: str, variables: Sequence[str]) -> RationalFunction:
    return to_rational_function(parse(text, variables), variables)
