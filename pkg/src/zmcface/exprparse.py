"""Tiny expression grammar for fixture data.

Rational expressions in z over integer / Gaussian-rational literals, plus
wp(.), wpp(.) and named constants.  Expressions without elliptic leaves
build exact rational carriers; anything touching wp/wpp builds an
expression tree.
"""

from __future__ import annotations

import re

from .cxpoly import INFINITY, CPoly, GaussRat, RationalFn
from .elliptic import EXPR_WP, EXPR_WPP, EXPR_Z, MeroExpr, const_expr, invariants, wp, wp_prime
from .errors import ZmcError
from .localanalysis import MeroFn

__all__ = ["parse_carrier", "parse_point", "parse_constant", "NotExactExpression"]


class NotExactExpression(ZmcError):
    pass


class ParseError(ZmcError):
    pass


_TOKEN_RE = re.compile(
    r"\s*(?:(?P<num>\d+)|(?P<ident>[A-Za-z_][A-Za-z_0-9]*)|(?P<op>\*\*|[-+*/^()]))"
)


def _tokenize(s: str):
    pos = 0
    out = []
    while pos < len(s):
        m = _TOKEN_RE.match(s, pos)
        if not m or m.end() == pos:
            if s[pos:].strip() == "":
                break
            raise ParseError(f"bad token at {s[pos:]!r}")
        if m.group("num"):
            out.append(("num", int(m.group("num"))))
        elif m.group("ident"):
            out.append(("ident", m.group("ident")))
        else:
            op = m.group("op")
            out.append(("op", "^" if op == "**" else op))
        pos = m.end()
    out.append(("end", None))
    return out


class _Parser:
    def __init__(self, tokens):
        self.toks = tokens
        self.i = 0

    def peek(self):
        return self.toks[self.i]

    def take(self):
        t = self.toks[self.i]
        self.i += 1
        return t

    def expect_op(self, op):
        kind, val = self.take()
        if kind != "op" or val != op:
            raise ParseError(f"expected {op!r}, found {val!r}")

    def parse(self):
        node = self.expr()
        if self.peek()[0] != "end":
            raise ParseError(f"trailing input near {self.peek()!r}")
        return node

    def expr(self):
        node = self.term()
        while self.peek() == ("op", "+") or self.peek() == ("op", "-"):
            _, op = self.take()
            rhs = self.term()
            node = (op, node, rhs)
        return node

    def term(self):
        node = self.unary()
        while self.peek() == ("op", "*") or self.peek() == ("op", "/"):
            _, op = self.take()
            rhs = self.unary()
            node = (op, node, rhs)
        return node

    def unary(self):
        if self.peek() == ("op", "-"):
            self.take()
            return ("neg", self.unary())
        if self.peek() == ("op", "+"):
            self.take()
            return self.unary()
        return self.power()

    def power(self):
        base = self.atom()
        if self.peek() == ("op", "^"):
            self.take()
            expo = self.unary()
            return ("^", base, expo)
        return base

    def atom(self):
        kind, val = self.take()
        if kind == "num":
            return ("num", val)
        if kind == "ident":
            if self.peek() == ("op", "("):
                self.take()
                arg = self.expr()
                self.expect_op(")")
                return ("call", val, arg)
            return ("ident", val)
        if kind == "op" and val == "(":
            inner = self.expr()
            self.expect_op(")")
            return inner
        raise ParseError(f"unexpected token {val!r}")


def _parse_ast(s: str):
    return _Parser(_tokenize(s)).parse()


def _int_exponent(node) -> int:
    if node[0] == "num":
        return node[1]
    if node[0] == "neg":
        return -_int_exponent(node[1])
    raise ParseError("exponents must be integer literals")


# --- exact builder -----------------------------------------------------------


def _build_exact(node) -> RationalFn:
    kind = node[0]
    if kind == "num":
        return RationalFn(CPoly([GaussRat(node[1])]))
    if kind == "ident":
        name = node[1]
        if name == "z":
            return RationalFn.z()
        if name == "i":
            return RationalFn(CPoly([GaussRat(0, 1)]))
        raise NotExactExpression(f"identifier {name!r} is not exact")
    if kind == "call":
        raise NotExactExpression(f"function {node[1]!r} is not exact")
    if kind == "neg":
        return -_build_exact(node[1])
    if kind == "^":
        base = _build_exact(node[1])
        e = _int_exponent(node[2])
        out = RationalFn(CPoly([GaussRat(1)]))
        for _ in range(abs(e)):
            out = out * base
        return out if e >= 0 else RationalFn(CPoly([GaussRat(1)])) / out
    a = _build_exact(node[1])
    b = _build_exact(node[2])
    if kind == "+":
        return a + b
    if kind == "-":
        return a - b
    if kind == "*":
        return a * b
    if kind == "/":
        return a / b
    raise ParseError(f"unknown node {kind!r}")


# --- elliptic builder ----------------------------------------------------------


def _build_expr(node, consts: dict) -> MeroExpr:
    kind = node[0]
    if kind == "num":
        return const_expr(complex(node[1]))
    if kind == "ident":
        name = node[1]
        if name == "z":
            return EXPR_Z
        if name == "i":
            return const_expr(1j)
        if name == "g2":
            return const_expr(invariants()[0])
        if name == "g3":
            return const_expr(invariants()[1])
        if name in consts:
            return const_expr(complex(consts[name]))
        raise ParseError(f"unknown identifier {name!r}")
    if kind == "call":
        fname, arg = node[1], node[2]
        if arg != ("ident", "z"):
            raise ParseError(f"{fname} may only be applied to z in expressions")
        if fname == "wp":
            return EXPR_WP
        if fname == "wpp":
            return EXPR_WPP
        raise ParseError(f"unknown function {fname!r}")
    if kind == "neg":
        return -_build_expr(node[1], consts)
    if kind == "^":
        return _build_expr(node[1], consts) ** _int_exponent(node[2])
    a = _build_expr(node[1], consts)
    b = _build_expr(node[2], consts)
    return {"+": a + b, "-": a - b, "*": a * b, "/": a / b}[kind]


# --- constant evaluation ---------------------------------------------------------


def _eval_const(node, consts: dict):
    """Exact GaussRat when possible, complex otherwise."""
    kind = node[0]
    if kind == "num":
        return GaussRat(node[1])
    if kind == "ident":
        name = node[1]
        if name == "i":
            return GaussRat(0, 1)
        if name == "g2":
            return complex(invariants()[0])
        if name == "g3":
            return complex(invariants()[1])
        if name in consts:
            return consts[name]
        raise ParseError(f"unknown constant {name!r}")
    if kind == "call":
        val = _eval_const(node[2], consts)
        zv = complex(val)
        if node[1] == "wp":
            return wp(zv)
        if node[1] == "wpp":
            return wp_prime(zv)
        raise ParseError(f"unknown function {node[1]!r}")
    if kind == "neg":
        v = _eval_const(node[1], consts)
        return -v
    if kind == "^":
        v = _eval_const(node[1], consts)
        e = _int_exponent(node[2])
        if isinstance(v, GaussRat):
            out = GaussRat(1)
            for _ in range(abs(e)):
                out = out * v
            return out if e >= 0 else GaussRat(1) / out
        return v**e
    a = _eval_const(node[1], consts)
    b = _eval_const(node[2], consts)
    if isinstance(a, GaussRat) and isinstance(b, GaussRat):
        return {"+": lambda: a + b, "-": lambda: a - b,
                "*": lambda: a * b, "/": lambda: a / b}[kind]()
    a, b = complex(a), complex(b)
    return {"+": a + b, "-": a - b, "*": a * b, "/": a / b}[kind]


def parse_constant(s: str, consts: dict | None = None):
    return _eval_const(_parse_ast(s), consts or {})


def parse_point(s: str):
    """A puncture location: 'inf' or an exact Gaussian-rational expression."""
    s = s.strip()
    if s.lower() in ("inf", "infty", "oo"):
        return INFINITY
    v = parse_constant(s)
    if not isinstance(v, GaussRat):
        raise ParseError(f"point {s!r} is not exact")
    return v


def parse_carrier(s: str, consts: dict | None = None) -> MeroFn:
    """Parse an expression string into an exact or elliptic carrier."""
    ast = _parse_ast(s)
    try:
        return MeroFn(_build_exact(ast))
    except NotExactExpression:
        return MeroFn(_build_expr(ast, consts or {}))
