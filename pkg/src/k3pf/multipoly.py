"""Exact multivariate polynomials over Q or a multiquadratic extension.

Variables are an ordered tuple of names; one of them may be flagged as the
deformation parameter (by convention ``lambda``).  Exponent vectors are dense
tuples of fixed arity.  Coefficients are ``Fraction`` for rational input and
``QNum`` as soon as radicals or the imaginary unit appear; the two mix freely.
"""

from __future__ import annotations

from fractions import Fraction

from .qnum import QNum


class VarMismatch(ValueError):
    pass


class MultiPoly:
    __slots__ = ("vars", "param", "terms")

    def __init__(self, variables, terms, param="lambda"):
        self.vars = tuple(variables)
        self.param = param if param in self.vars else None
        clean = {}
        arity = len(self.vars)
        for expo, c in terms.items():
            if len(expo) != arity:
                raise VarMismatch("exponent arity does not match variable count")
            if c:
                clean[tuple(expo)] = c
        self.terms = clean

    # -- constructors ---------------------------------------------------------

    @classmethod
    def zero(cls, variables, param="lambda"):
        return cls(variables, {}, param)

    @classmethod
    def constant(cls, variables, c, param="lambda"):
        z = (0,) * len(variables)
        return cls(variables, {z: Fraction(c) if isinstance(c, int) else c}, param)

    @classmethod
    def variable(cls, variables, name, param="lambda"):
        variables = tuple(variables)
        expo = [0] * len(variables)
        expo[variables.index(name)] = 1
        return cls(variables, {tuple(expo): Fraction(1)}, param)

    # -- basic queries ----------------------------------------------------------

    def is_zero(self):
        return not self.terms

    def __bool__(self):
        return bool(self.terms)

    def __eq__(self, other):
        if not isinstance(other, MultiPoly):
            return NotImplemented
        return self.vars == other.vars and self._norm_terms() == other._norm_terms()

    def _norm_terms(self):
        return {e: (c if isinstance(c, QNum) else QNum(c)) for e, c in self.terms.items()}

    def __hash__(self):
        return hash((self.vars, frozenset(self._norm_terms().items())))

    def total_degree(self):
        return max((sum(e) for e in self.terms), default=-1)

    def degree_in(self, name):
        i = self.vars.index(name)
        return max((e[i] for e in self.terms), default=-1)

    def weighted_degree(self, weights):
        return max((sum(w * k for w, k in zip(weights, e)) for e in self.terms), default=-1)

    def is_weighted_homogeneous(self, weights):
        degs = {sum(w * k for w, k in zip(weights, e)) for e in self.terms}
        return len(degs) <= 1

    # -- ring operations ----------------------------------------------------------

    def _check(self, other):
        if self.vars != other.vars:
            raise VarMismatch(f"variable sets differ: {self.vars} vs {other.vars}")

    def __add__(self, other):
        if isinstance(other, (int, Fraction, QNum)):
            other = MultiPoly.constant(self.vars, other, self.param)
        self._check(other)
        out = dict(self.terms)
        for e, c in other.terms.items():
            s = out.get(e, 0) + c
            if s:
                out[e] = s
            else:
                out.pop(e, None)
        return MultiPoly(self.vars, out, self.param)

    __radd__ = __add__

    def __neg__(self):
        return MultiPoly(self.vars, {e: -c for e, c in self.terms.items()}, self.param)

    def __sub__(self, other):
        if isinstance(other, (int, Fraction, QNum)):
            other = MultiPoly.constant(self.vars, other, self.param)
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if isinstance(other, (int, Fraction, QNum)):
            if not other:
                return MultiPoly.zero(self.vars, self.param)
            return MultiPoly(
                self.vars, {e: c * other for e, c in self.terms.items()}, self.param
            )
        self._check(other)
        out = {}
        for e1, c1 in self.terms.items():
            for e2, c2 in other.terms.items():
                e = tuple(a + b for a, b in zip(e1, e2))
                s = out.get(e, 0) + c1 * c2
                if s:
                    out[e] = s
                else:
                    out.pop(e, None)
        return MultiPoly(self.vars, out, self.param)

    __rmul__ = __mul__

    def __pow__(self, n):
        if n < 0:
            raise ValueError("negative power of a polynomial")
        result = MultiPoly.constant(self.vars, Fraction(1), self.param)
        base = self
        while n:
            if n & 1:
                result = result * base
            base = base * base
            n >>= 1
        return result

    def partial(self, name):
        """Formal partial derivative with respect to the named variable."""
        if name not in self.vars:
            raise VarMismatch(f"unknown variable {name!r}")
        i = self.vars.index(name)
        out = {}
        for e, c in self.terms.items():
            if e[i] == 0:
                continue
            ne = list(e)
            ne[i] -= 1
            out[tuple(ne)] = c * e[i]
        return MultiPoly(self.vars, out, self.param)

    def substitute(self, assignment):
        """Substitute values (coefficients or MultiPoly) for a subset of variables."""
        result = MultiPoly.zero(self.vars, self.param)
        for e, c in self.terms.items():
            term = MultiPoly.constant(self.vars, c, self.param)
            for name, k in zip(self.vars, e):
                if k == 0:
                    continue
                if name in assignment:
                    val = assignment[name]
                    if isinstance(val, MultiPoly):
                        term = term * val ** k
                    else:
                        term = term * (val ** k)
                else:
                    term = term * MultiPoly.variable(self.vars, name, self.param) ** k
            result = result + term
        return result

    def coefficients_in(self, name):
        """Split into {exponent of `name`: MultiPoly without that exponent}."""
        i = self.vars.index(name)
        buckets: dict[int, dict] = {}
        for e, c in self.terms.items():
            k = e[i]
            re = list(e)
            re[i] = 0
            buckets.setdefault(k, {})[tuple(re)] = c
        return {k: MultiPoly(self.vars, t, self.param) for k, t in buckets.items()}

    def map_coeffs(self, f):
        return MultiPoly(self.vars, {e: f(c) for e, c in self.terms.items()}, self.param)

    def has_radical_coeffs(self):
        return any(isinstance(c, QNum) and not c.is_rational() for c in self.terms.values())

    def __repr__(self):
        from .parsing import format_poly

        return format_poly(self)
