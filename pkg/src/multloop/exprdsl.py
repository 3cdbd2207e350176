"""A small expression language for the scalar functions fed to loop families.

Grammar (lowest to highest precedence)::

    expr    := term (("+" | "-") term)*
    term    := unary (("*" | "/") unary)*
    unary   := "-" unary | power
    power   := atom ("^" exponent)?
    exponent:= "-"? INT ("^" exponent)?
    atom    := NUMBER | VAR | FUNC "(" expr ")" | "(" expr ")"

VAR is one of x, y, z, m, v, w and FUNC one of exp, log, sin, cos.  Exponents
are integer literals only, so ``z^-1`` is allowed and ``z^x`` is not.

Evaluation works on floats or numpy arrays (elementwise).
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from typing import Mapping, Union

import numpy as np

VARIABLES = frozenset("xyzmvw")
FUNCTIONS = {"exp": np.exp, "log": np.log, "sin": np.sin, "cos": np.cos}

Number = Union[float, np.ndarray]


class DSLError(Exception):
    """Base class for DSL failures."""


class DSLSyntaxError(DSLError, SyntaxError):
    """Parse failure at a byte offset, with the set of tokens that would fit."""

    def __init__(self, message: str, offset: int, expected: frozenset[str]):
        self.msg = message
        self.offset = offset
        self.expected = expected
        exp = ", ".join(sorted(expected))
        super().__init__(f"{message} at offset {offset} (expected one of: {exp})")

    def __str__(self) -> str:  # SyntaxError.__str__ would drop the offset
        return self.args[0]


class UnboundVariable(DSLError):
    pass


class DomainError(DSLError):
    pass


# --- AST ------------------------------------------------------------------


@dataclass(frozen=True)
class Num:
    text: str

    @property
    def value(self) -> float:
        return float(self.text)


@dataclass(frozen=True)
class Var:
    name: str


@dataclass(frozen=True)
class Neg:
    arg: "Expr"


@dataclass(frozen=True)
class BinOp:
    op: str
    left: "Expr"
    right: "Expr"


@dataclass(frozen=True)
class Pow:
    base: "Expr"
    exponent: "Expr"  # integer literal, negated literal, or literal power chain


@dataclass(frozen=True)
class Apply:
    func: str
    arg: "Expr"


@dataclass(frozen=True)
class Group:
    """Explicit parentheses, kept so printing reproduces the source."""

    inner: "Expr"


Expr = Union[Num, Var, Neg, BinOp, Pow, Apply, Group]


# --- lexer ----------------------------------------------------------------

_TOKEN = re.compile(
    r"\s*(?:(?P<num>\d+(?:\.\d*)?|\.\d+)|(?P<name>[A-Za-z_]\w*)|(?P<op>[-+*/^()]))"
)


@dataclass(frozen=True)
class _Tok:
    kind: str  # num, var, func, op, end
    text: str
    offset: int


def _tokenize(src: str) -> list[_Tok]:
    data = src.encode()
    toks: list[_Tok] = []
    pos = 0
    while True:
        while pos < len(src) and src[pos].isspace():
            pos += 1
        if pos >= len(src):
            break
        m = _TOKEN.match(src, pos)
        offset = len(src[:pos].encode())
        if m is None or m.end() == pos:
            raise DSLSyntaxError(f"unexpected character {src[pos]!r}", offset,
                                 frozenset({"number", "variable", "function", "("}))
        start = m.start(m.lastgroup)
        offset = len(src[:start].encode())
        text = m.group(m.lastgroup)
        if m.lastgroup == "name":
            if text in VARIABLES:
                toks.append(_Tok("var", text, offset))
            elif text in FUNCTIONS:
                toks.append(_Tok("func", text, offset))
            else:
                raise DSLSyntaxError(f"unknown name {text!r}", offset,
                                     frozenset(VARIABLES | FUNCTIONS.keys()))
        else:
            toks.append(_Tok(m.lastgroup, text, offset))
        pos = m.end()
    toks.append(_Tok("end", "", len(data)))
    return toks


# --- parser ---------------------------------------------------------------

_ATOM_START = frozenset({"number", "variable", "function", "(", "-"})


class _Parser:
    def __init__(self, src: str):
        self.toks = _tokenize(src)
        self.i = 0

    def peek(self) -> _Tok:
        return self.toks[self.i]

    def take(self) -> _Tok:
        tok = self.toks[self.i]
        self.i += 1
        return tok

    def expect_op(self, op: str) -> None:
        tok = self.peek()
        if tok.kind != "op" or tok.text != op:
            raise self.error(frozenset({op}))
        self.take()

    def error(self, expected: frozenset[str]) -> DSLSyntaxError:
        tok = self.peek()
        what = "end of input" if tok.kind == "end" else f"token {tok.text!r}"
        return DSLSyntaxError(f"unexpected {what}", tok.offset, expected)

    def parse(self) -> Expr:
        e = self.expr()
        if self.peek().kind != "end":
            raise self.error(frozenset({"+", "-", "*", "/", "^", "end of input"}))
        return e

    def expr(self) -> Expr:
        left = self.term()
        while self.peek().kind == "op" and self.peek().text in "+-":
            op = self.take().text
            left = BinOp(op, left, self.term())
        return left

    def term(self) -> Expr:
        left = self.unary()
        while self.peek().kind == "op" and self.peek().text in "*/":
            op = self.take().text
            left = BinOp(op, left, self.unary())
        return left

    def unary(self) -> Expr:
        tok = self.peek()
        if tok.kind == "op" and tok.text == "-":
            self.take()
            return Neg(self.unary())
        return self.power()

    def power(self) -> Expr:
        base = self.atom()
        tok = self.peek()
        if tok.kind == "op" and tok.text == "^":
            self.take()
            return Pow(base, self.exponent())
        return base

    def exponent(self) -> Expr:
        tok = self.peek()
        neg = False
        if tok.kind == "op" and tok.text == "-":
            self.take()
            neg = True
            tok = self.peek()
        if tok.kind != "num" or not tok.text.isdigit():
            raise self.error(frozenset({"integer"}))
        self.take()
        e: Expr = Num(tok.text)
        nxt = self.peek()
        if nxt.kind == "op" and nxt.text == "^":
            self.take()
            e = Pow(e, self.exponent())
        return Neg(e) if neg else e

    def atom(self) -> Expr:
        tok = self.peek()
        if tok.kind == "num":
            self.take()
            return Num(tok.text)
        if tok.kind == "var":
            self.take()
            return Var(tok.text)
        if tok.kind == "func":
            self.take()
            self.expect_op("(")
            arg = self.expr()
            self.expect_op(")")
            return Apply(tok.text, arg)
        if tok.kind == "op" and tok.text == "(":
            self.take()
            inner = self.expr()
            self.expect_op(")")
            return Group(inner)
        raise self.error(_ATOM_START)


def parse(src: str) -> Expr:
    """Parse ``src`` into an AST, raising DSLSyntaxError on malformed input."""
    return _Parser(src).parse()


def as_expr(e: Union[str, Expr]) -> Expr:
    return parse(e) if isinstance(e, str) else e


# --- printing -------------------------------------------------------------

_PREC = {"+": 1, "-": 1, "*": 2, "/": 2}


def _prec(e: Expr) -> int:
    if isinstance(e, BinOp):
        return _PREC[e.op]
    if isinstance(e, Neg):
        return 3
    if isinstance(e, Pow):
        return 4
    return 5


def to_str(e: Expr) -> str:
    """Print an AST; parentheses appear only where the tree needs them."""
    if isinstance(e, Num):
        return e.text
    if isinstance(e, Var):
        return e.name
    if isinstance(e, Group):
        return f"({to_str(e.inner)})"
    if isinstance(e, Apply):
        return f"{e.func}({to_str(e.arg)})"
    if isinstance(e, Neg):
        inner = to_str(e.arg)
        return f"-{inner}" if _prec(e.arg) >= 3 else f"-({inner})"
    if isinstance(e, Pow):
        base = to_str(e.base)
        if _prec(e.base) < 5:
            base = f"({base})"
        return f"{base}^{to_str(e.exponent)}"
    p = _PREC[e.op]
    left = to_str(e.left)
    if _prec(e.left) < p:
        left = f"({left})"
    right = to_str(e.right)
    # left associative: an equal-precedence right operand needs parentheses
    if _prec(e.right) <= p:
        right = f"({right})"
    return f"{left} {e.op} {right}"


def strip_groups(e: Expr) -> Expr:
    """Drop explicit parentheses, leaving the bare tree."""
    if isinstance(e, Group):
        return strip_groups(e.inner)
    if isinstance(e, Neg):
        return Neg(strip_groups(e.arg))
    if isinstance(e, Apply):
        return Apply(e.func, strip_groups(e.arg))
    if isinstance(e, Pow):
        return Pow(strip_groups(e.base), strip_groups(e.exponent))
    if isinstance(e, BinOp):
        return BinOp(e.op, strip_groups(e.left), strip_groups(e.right))
    return e


# --- analysis and evaluation ----------------------------------------------


def free_vars(e: Expr) -> frozenset[str]:
    if isinstance(e, Var):
        return frozenset({e.name})
    if isinstance(e, Num):
        return frozenset()
    if isinstance(e, (Neg, Group, Apply)):
        return free_vars(e.arg if not isinstance(e, Group) else e.inner)
    if isinstance(e, Pow):
        return free_vars(e.base)
    return free_vars(e.left) | free_vars(e.right)


def _int_value(e: Expr) -> int:
    if isinstance(e, Num):
        return int(e.text)
    if isinstance(e, Neg):
        return -_int_value(e.arg)
    if isinstance(e, Pow):
        return _int_value(e.base) ** _int_value(e.exponent)
    raise DomainError("exponent is not an integer literal")


def evaluate(e: Expr, env: Mapping[str, Number]) -> Number:
    """Evaluate ``e`` with IEEE doubles; arrays in ``env`` broadcast."""
    if isinstance(e, Num):
        return e.value
    if isinstance(e, Var):
        try:
            return env[e.name]
        except KeyError:
            raise UnboundVariable(e.name) from None
    if isinstance(e, Group):
        return evaluate(e.inner, env)
    if isinstance(e, Neg):
        return -evaluate(e.arg, env)
    if isinstance(e, Apply):
        arg = evaluate(e.arg, env)
        if e.func == "log" and np.any(np.asarray(arg) <= 0):
            raise DomainError("log of a non-positive number")
        with np.errstate(over="ignore"):
            return FUNCTIONS[e.func](arg)
    if isinstance(e, Pow):
        base = evaluate(e.base, env)
        n = _int_value(e.exponent)
        if n < 0:
            if np.any(np.asarray(base) == 0):
                raise DomainError("zero raised to a negative power")
            return 1.0 / base ** (-n)
        return base**n
    a = evaluate(e.left, env)
    b = evaluate(e.right, env)
    if e.op == "+":
        return a + b
    if e.op == "-":
        return a - b
    if e.op == "*":
        return a * b
    if np.any(np.asarray(b) == 0):
        raise DomainError("division by zero")
    return a / b


# a function literally named ``eval`` would shadow the builtin
eval_expr = evaluate


def derivative(e: Expr, var: str, env: Mapping[str, Number], h: float = 1e-5) -> Number:
    """Central-difference partial derivative of ``e`` in ``var``."""
    up = dict(env)
    dn = dict(env)
    up[var] = env[var] + h
    dn[var] = env[var] - h
    return (evaluate(e, up) - evaluate(e, dn)) / (2 * h)


def compile_expr(e: Union[str, Expr], args: str):
    """Return a positional callable, e.g. ``compile_expr("x*z", "xz")(2, 5)``."""
    tree = as_expr(e)
    extra = free_vars(tree) - set(args)
    if extra:
        raise UnboundVariable(", ".join(sorted(extra)))

    def fn(*vals):
        return evaluate(tree, dict(zip(args, vals)))

    fn.expr = tree
    return fn
