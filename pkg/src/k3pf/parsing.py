"""Plain-text grammar for exact expressions, polynomials and matrices.

Grammar (round-trippable):

    expr    := term (('+' | '-') term)*
    term    := factor (('*' | '/') factor)*
    factor  := base ('^' exponent)?
    base    := INT | INT '/' INT | 'i' | 'sqrt' '(' signed-rational ')'
             | VAR | '(' expr ')' | '-' factor

Scalars evaluate to Fraction or QNum; with a variable list given, expressions
evaluate to MultiPoly.  Division is permitted by scalar-valued subexpressions
only.
"""

from __future__ import annotations

import re
from fractions import Fraction

from .multipoly import MultiPoly
from .qnum import QNum

_TOKEN = re.compile(
    r"\s*(?:(?P<int>\d+)|(?P<name>[A-Za-z_][A-Za-z_0-9]*)|(?P<op>[-+*/^()]))"
)


class ParseError(ValueError):
    pass


def tokenize(text: str):
    pos = 0
    out = []
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if not m or m.end() == pos:
            if text[pos:].strip():
                raise ParseError(f"unexpected character at: {text[pos:pos + 12]!r}")
            break
        pos = m.end()
        if m.group("int"):
            out.append(("int", int(m.group("int"))))
        elif m.group("name"):
            out.append(("name", m.group("name")))
        else:
            out.append(("op", m.group("op")))
    return out


class _Parser:
    def __init__(self, tokens, variables=None, param="lambda"):
        self.toks = tokens
        self.pos = 0
        self.vars = tuple(variables) if variables is not None else None
        self.param = param

    def peek(self):
        return self.toks[self.pos] if self.pos < len(self.toks) else (None, None)

    def take(self):
        t = self.peek()
        self.pos += 1
        return t

    def expect(self, kind, value=None):
        k, v = self.take()
        if k != kind or (value is not None and v != value):
            raise ParseError(f"expected {value or kind}, got {v!r}")
        return v

    # expression evaluates to MultiPoly (if self.vars) else scalar
    def parse(self):
        e = self.expr()
        if self.pos != len(self.toks):
            raise ParseError(f"trailing input near {self.peek()[1]!r}")
        return e

    def expr(self):
        val = self.term()
        while self.peek() == ("op", "+") or self.peek() == ("op", "-"):
            _, op = self.take()
            rhs = self.term()
            val = val + rhs if op == "+" else val - rhs
        return val

    def term(self):
        val = self.factor()
        while self.peek() == ("op", "*") or self.peek() == ("op", "/"):
            _, op = self.take()
            rhs = self.factor()
            if op == "*":
                val = val * rhs
            else:
                val = self._divide(val, rhs)
        return val

    def _divide(self, a, b):
        if isinstance(b, MultiPoly):
            if b.total_degree() > 0:
                raise ParseError("division by a non-constant polynomial")
            b = next(iter(b.terms.values())) if b.terms else 0
        if not b:
            raise ParseError("division by zero")
        if isinstance(b, Fraction) and isinstance(a, (Fraction, int)):
            return Fraction(a) / b
        inv = (Fraction(1) / b) if isinstance(b, Fraction) else b.inverse()
        return a * inv

    def factor(self):
        base = self.base()
        if self.peek() == ("op", "^"):
            self.take()
            k, v = self.take()
            neg = False
            if (k, v) == ("op", "-"):
                neg = True
                k, v = self.take()
            if k != "int":
                raise ParseError("exponent must be an integer")
            if neg:
                return self._divide(Fraction(1), base ** v)
            return base ** v
        return base

    def base(self):
        kind, val = self.take()
        if kind == "op" and val == "-":
            return -self.factor()
        if kind == "op" and val == "(":
            e = self.expr()
            self.expect("op", ")")
            return e
        if kind == "int":
            return Fraction(val)
        if kind == "name":
            if val == "sqrt":
                self.expect("op", "(")
                inner = self.expr()
                self.expect("op", ")")
                if isinstance(inner, MultiPoly):
                    raise ParseError("sqrt of a non-constant expression")
                if isinstance(inner, QNum):
                    inner = inner.as_fraction()
                return QNum.sqrt_fraction(Fraction(inner))
            if val == "i":
                return QNum.imaginary_unit()
            if self.vars is None:
                raise ParseError(f"unexpected name {val!r} in scalar expression")
            if val not in self.vars:
                raise ParseError(f"unknown variable {val!r}")
            return MultiPoly.variable(self.vars, val, self.param)
        raise ParseError(f"unexpected token {val!r}")


def parse_scalar(text: str):
    """Parse an exact scalar (Fraction or QNum)."""
    return _Parser(tokenize(text)).parse()


def parse_poly(text: str, variables, param="lambda") -> MultiPoly:
    """Parse a polynomial in the given variables (plus exact scalars)."""
    val = _Parser(tokenize(text), variables, param).parse()
    if not isinstance(val, MultiPoly):
        val = MultiPoly.constant(variables, val, param)
    return val


# -- printing -----------------------------------------------------------------


def format_scalar(c) -> str:
    if isinstance(c, QNum):
        if c.is_rational():
            c = c.as_fraction()
        else:
            s = str(c)
            return f"({s})" if (" " in s or "*" in s) else s
    c = Fraction(c)
    if c.denominator == 1:
        return str(c.numerator)
    return f"{c.numerator}/{c.denominator}"


def _format_monomial(variables, expo) -> str:
    parts = []
    for name, k in zip(variables, expo):
        if k == 1:
            parts.append(name)
        elif k > 1:
            parts.append(f"{name}^{k}")
    return "*".join(parts)


def format_poly(p: MultiPoly) -> str:
    if not p.terms:
        return "0"
    items = sorted(p.terms.items(), key=lambda kv: (-sum(kv[0]), tuple(-e for e in kv[0])))
    chunks = []
    for expo, c in items:
        mono = _format_monomial(p.vars, expo)
        cs = format_scalar(c)
        if not mono:
            chunk = cs
        elif cs == "1":
            chunk = mono
        elif cs == "-1":
            chunk = f"-{mono}"
        else:
            chunk = f"{cs}*{mono}"
        chunks.append(chunk)
    s = chunks[0]
    for chunk in chunks[1:]:
        s += f" - {chunk[1:]}" if chunk.startswith("-") else f" + {chunk}"
    return s


def format_poly1(p, var="lambda") -> str:
    from .ratfunc import Poly1

    if isinstance(p, Poly1):
        if not p.coeffs:
            return "0"
        chunks = []
        for k in range(p.degree(), -1, -1):
            c = p[k]
            if not c:
                continue
            cs = format_scalar(c)
            if k == 0:
                chunk = cs
            else:
                v = var if k == 1 else f"{var}^{k}"
                if cs == "1":
                    chunk = v
                elif cs == "-1":
                    chunk = f"-{v}"
                else:
                    chunk = f"{cs}*{v}"
            chunks.append(chunk)
        s = chunks[0]
        for chunk in chunks[1:]:
            s += f" - {chunk[1:]}" if chunk.startswith("-") else f" + {chunk}"
        return s
    raise TypeError("format_poly1 expects Poly1")


def parse_poly1(text: str, var="lambda"):
    """Parse a univariate polynomial or rational function of `var`."""
    from .ratfunc import Poly1, RationalFunction

    poly = parse_poly(text, (var,), param=var)
    # may legitimately carry QNum coefficients
    degree = poly.degree_in(var)
    coeffs = [Fraction(0)] * (degree + 1)
    for expo, c in poly.terms.items():
        coeffs[expo[0]] = c
    return Poly1(coeffs)


def parse_matrix(rows, size=None):
    """Parse a matrix given as list of lists of scalar expression strings."""
    from .linalg import ExactMatrix

    data = [[parse_scalar(cell) if isinstance(cell, str) else cell for cell in row] for row in rows]
    return ExactMatrix(data)
