"""A small expression language for metrics and potentials.

Grammar (EBNF)::

    expr    = term { ("+" | "-") term } ;
    term    = unary { ("*" | "/") unary } ;
    unary   = ("-" | "+") unary | power ;
    power   = atom [ "^" [ "-" ] integer ] ;
    atom    = number | "i" | "pi" | variable
            | func "(" expr ")" | "(" expr ")" ;
    func    = "conj" | "abs2" | "log" | "exp" | "re" | "im" ;
    variable= ("z" | "v") integer ;
    number  = digits [ "." digits ] [ ("e" | "E") [ "+" | "-" ] digits ] ;

``z1..zn`` are base coordinates and ``v1..vr`` fiber coordinates.  All
expressions are smooth functions of the coordinates and their conjugates;
``abs2(x)`` is sugar for ``x*conj(x)``.  Arithmetic between literals is folded
while parsing, so printing and re-parsing gives back the same tree.
"""

from __future__ import annotations

import re
from dataclasses import dataclass

import numpy as np

from . import jets
from .errors import CriticalPoint, DomainError, ExprSyntaxError, UnknownVariable
from .tensor import DiffConfig, as_point, wirtinger_jet

DIVISION_GUARD = 1e-12
FUNCTIONS = ("conj", "abs2", "log", "exp", "re", "im")


# -- tree ------------------------------------------------------------------

@dataclass(frozen=True)
class Num:
    value: complex


@dataclass(frozen=True)
class Var:
    name: str


@dataclass(frozen=True)
class Neg:
    arg: object


@dataclass(frozen=True)
class BinOp:
    op: str
    left: object
    right: object
    guard: float = 0.0  # only set for "/"


@dataclass(frozen=True)
class Pow:
    base: object
    exponent: int


@dataclass(frozen=True)
class Call:
    func: str
    arg: object


@dataclass(frozen=True)
class ExprAST:
    """Parsed expression together with the dimensions it was checked against."""

    root: object
    dims: tuple
    text: str = ""

    def __eq__(self, other):
        return isinstance(other, ExprAST) and self.root == other.root and self.dims == other.dims

    def __hash__(self):
        return hash((self.root, self.dims))

    def __str__(self):
        return to_text(self)

    @property
    def nvars(self):
        return self.dims[0] + self.dims[1]

    def variables(self):
        out = set()
        _collect_vars(self.root, out)
        return out


def _collect_vars(node, out):
    if isinstance(node, Var):
        out.add(node.name)
    for child in _children(node):
        _collect_vars(child, out)


def _children(node):
    if isinstance(node, (Neg, Call)):
        return (node.arg,)
    if isinstance(node, BinOp):
        return (node.left, node.right)
    if isinstance(node, Pow):
        return (node.base,)
    return ()


# -- lexer -----------------------------------------------------------------

_TOKEN = re.compile(r"""
    (?P<ws>\s+)
  | (?P<number>(?:\d+\.\d*|\.\d+|\d+)(?:[eE][+-]?\d+)?)
  | (?P<name>[A-Za-z_][A-Za-z_0-9]*)
  | (?P<op>[-+*/^(),])
""", re.VERBOSE)


def _tokenize(text):
    pos = 0
    toks = []
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if m is None:
            raise ExprSyntaxError(f"unexpected character {text[pos]!r}", pos,
                                  {"number", "name", "operator"})
        if m.lastgroup != "ws":
            toks.append((m.lastgroup, m.group(), pos))
        pos = m.end()
    toks.append(("end", "", len(text)))
    return toks


# -- parser ----------------------------------------------------------------

def _fold(op, a, b):
    if isinstance(a, Num) and isinstance(b, Num) and op in "+-*":
        return Num({"+": a.value + b.value, "-": a.value - b.value,
                    "*": a.value * b.value}[op])
    return None


class _Parser:
    def __init__(self, text, dims):
        self.text = text
        self.toks = _tokenize(text)
        self.i = 0
        self.dims = dims

    def peek(self):
        return self.toks[self.i]

    def take(self):
        tok = self.toks[self.i]
        self.i += 1
        return tok

    def expect(self, value):
        kind, text, pos = self.take()
        if text != value:
            raise ExprSyntaxError(f"expected {value!r}, found {text or 'end of input'!r}",
                                  pos, {value})

    def expr(self):
        node = self.term()
        while self.peek()[1] in ("+", "-") and self.peek()[0] == "op":
            op = self.take()[1]
            rhs = self.term()
            node = _fold(op, node, rhs) or BinOp(op, node, rhs)
        return node

    def term(self):
        node = self.unary()
        while self.peek()[1] in ("*", "/") and self.peek()[0] == "op":
            op = self.take()[1]
            rhs = self.unary()
            if op == "/":
                node = BinOp("/", node, rhs, DIVISION_GUARD)
            else:
                node = _fold(op, node, rhs) or BinOp(op, node, rhs)
        return node

    def unary(self):
        kind, text, _ = self.peek()
        if kind == "op" and text in ("-", "+"):
            self.take()
            arg = self.unary()
            if text == "+":
                return arg
            return Num(-arg.value) if isinstance(arg, Num) else Neg(arg)
        return self.power()

    def power(self):
        base = self.atom()
        if self.peek()[1] == "^":
            self.take()
            sign = 1
            if self.peek()[1] == "-":
                self.take()
                sign = -1
            kind, text, pos = self.take()
            if kind != "number" or not text.isdigit():
                raise ExprSyntaxError("expected an integer exponent", pos, {"integer"})
            return Pow(base, sign * int(text))
        return base

    def atom(self):
        kind, text, pos = self.take()
        if kind == "number":
            return Num(complex(float(text)))
        if kind == "op" and text == "(":
            node = self.expr()
            self.expect(")")
            return node
        if kind == "name":
            if text == "i":
                return Num(1j)
            if text == "pi":
                return Num(complex(np.pi))
            if text in FUNCTIONS:
                self.expect("(")
                arg = self.expr()
                self.expect(")")
                if text == "abs2":
                    return BinOp("*", arg, Call("conj", arg))
                return Call(text, arg)
            m = re.fullmatch(r"([zv])([1-9]\d*)", text)
            if m:
                idx = int(m.group(2))
                limit = self.dims[0] if m.group(1) == "z" else self.dims[1]
                if idx > limit:
                    raise UnknownVariable(f"{text} exceeds declared dimensions {self.dims}")
                return Var(text)
            raise UnknownVariable(f"unknown name {text!r} at {pos}")
        raise ExprSyntaxError(
            f"expected a number, name or '(', found {text or 'end of input'!r}",
            pos, {"number", "name", "("})

    def parse(self):
        if not self.text.strip():
            raise ExprSyntaxError("empty expression", 0, {"number", "name", "("})
        node = self.expr()
        kind, text, pos = self.peek()
        if kind != "end":
            raise ExprSyntaxError(f"unexpected {text!r}", pos, {"+", "-", "*", "/", "^", "end"})
        return node


def parse_expr(text, dims=(1, 0)):
    """Parse ``text`` into an :class:`ExprAST` over ``dims = (n, r)`` variables."""
    dims = (int(dims[0]), int(dims[1]))
    return ExprAST(_Parser(text, dims).parse(), dims, text)


# -- printer ---------------------------------------------------------------

def _num_text(c):
    c = complex(c)
    if c.imag == 0:
        return repr(c.real) if c.real >= 0 else f"(-{repr(-c.real)})"
    im = f"({repr(c.imag)}*i)" if c.imag >= 0 else f"(-{repr(-c.imag)}*i)"
    if c.real == 0:
        return im
    return f"({repr(c.real)} + {im})"


def _text(node):
    if isinstance(node, Num):
        return _num_text(node.value)
    if isinstance(node, Var):
        return node.name
    if isinstance(node, Neg):
        return f"(-{_text(node.arg)})"
    if isinstance(node, BinOp):
        return f"({_text(node.left)} {node.op} {_text(node.right)})"
    if isinstance(node, Pow):
        return f"{_text(node.base)}^{node.exponent}" if node.exponent >= 0 \
            else f"{_text(node.base)}^-{-node.exponent}"
    if isinstance(node, Call):
        return f"{node.func}({_text(node.arg)})"
    raise TypeError(f"not an expression node: {node!r}")


def to_text(ast):
    """Render an expression so that ``parse_expr(to_text(a), a.dims) == a``."""
    root = ast.root if isinstance(ast, ExprAST) else ast
    return _text(root)


# -- evaluation ------------------------------------------------------------

def _var_index(name, dims):
    k = int(name[1:]) - 1
    return k if name[0] == "z" else dims[0] + k


def _eval(node, env, dims):
    if isinstance(node, Num):
        c = node.value
        return c.real if c.imag == 0 else c
    if isinstance(node, Var):
        return env[_var_index(node.name, dims)]
    if isinstance(node, Neg):
        return -_eval(node.arg, env, dims)
    if isinstance(node, BinOp):
        a = _eval(node.left, env, dims)
        b = _eval(node.right, env, dims)
        if node.op == "+":
            return a + b
        if node.op == "-":
            return a - b
        if node.op == "*":
            return a * b
        return a * jets.reciprocal(b, node.guard)
    if isinstance(node, Pow):
        x = _eval(node.base, env, dims)
        if node.exponent < 0:
            return jets.reciprocal(x, DIVISION_GUARD) ** (-node.exponent)
        if not isinstance(x, jets.Jet):
            return np.asarray(x) ** node.exponent
        return x ** node.exponent
    if isinstance(node, Call):
        x = _eval(node.arg, env, dims)
        if node.func == "conj":
            return jets.conj(x)
        if node.func == "log":
            return jets.log(x)
        if node.func == "exp":
            return jets.exp(x)
        if node.func == "re":
            return (x + jets.conj(x)) * 0.5
        if node.func == "im":
            return (x - jets.conj(x)) * -0.5j
    raise TypeError(f"not an expression node: {node!r}")


def as_field(ast):
    """Turn an expression into a callable ``f(coords)`` usable by the jet code.

    ``coords`` lists base coordinates followed by fiber coordinates; entries
    may be numbers, arrays or jets.
    """
    if isinstance(ast, str):
        raise TypeError("parse the expression first")

    def field(coords):
        return _eval(ast.root, coords, ast.dims)

    field.ast = ast
    return field


def eval_field(ast, point, cfg=DiffConfig(), max_order=4):
    """Value and Wirtinger derivatives of ``ast`` at ``point``.

    Parameters
    ----------
    ast : ExprAST
    point : array_like
        ``n + r`` complex coordinates (base first).
    cfg : DiffConfig
    max_order : int, default 4

    Returns
    -------
    Jet
    """
    point = as_point(point)
    if len(point) != ast.nvars:
        raise ValueError(f"expression has {ast.nvars} variables, point has {len(point)}")
    return wirtinger_jet(as_field(ast), point, max_order, cfg)


def substitute(ast, name, replacement):
    """Replace variable ``name`` by the expression ``replacement``."""
    def sub(node):
        if isinstance(node, Var):
            return replacement.root if node.name == name else node
        if isinstance(node, Neg):
            return Neg(sub(node.arg))
        if isinstance(node, BinOp):
            return BinOp(node.op, sub(node.left), sub(node.right), node.guard)
        if isinstance(node, Pow):
            return Pow(sub(node.base), node.exponent)
        if isinstance(node, Call):
            return Call(node.func, sub(node.arg))
        return node
    return ExprAST(sub(ast.root), ast.dims)


def schwarzian(f, point, holo_tol=1e-8):
    """Schwarzian derivative ``f'''/f' - 3/2 (f''/f')^2`` of a function of ``z1``.

    Raises
    ------
    CriticalPoint
        If ``|f'(point)| <= 1e-10``.
    DomainError
        If ``f`` is not holomorphic at ``point``.
    """
    if isinstance(f, str):
        f = parse_expr(f, (1, 0))
    if f.nvars != 1:
        raise ValueError("schwarzian needs an expression in the single variable z1")
    jet = eval_field(f, [point], max_order=3)
    d1, d2, d3 = (jet.derivative((k,), (0,)) for k in (1, 2, 3))
    dbar = jet.derivative((0,), (1,))
    if abs(d1) <= 1e-10:
        raise CriticalPoint(f"f' vanishes at {point}")
    if abs(dbar) > holo_tol * max(1.0, abs(d1)):
        raise DomainError("expression is not holomorphic at the evaluation point")
    r = d2 / d1
    return complex(d3 / d1 - 1.5 * r * r)
