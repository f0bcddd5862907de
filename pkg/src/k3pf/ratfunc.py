"""Univariate polynomials and rational functions in the parameter.

``Poly1`` is a dense univariate polynomial over Q or a multiquadratic field
(coefficients ``Fraction`` or ``QNum``).  ``RationalFunction`` is a reduced
fraction of two ``Poly1`` with monic denominator.  These are the coefficient
objects of linear ODEs and the scalars of the Groebner layer.
"""

from __future__ import annotations

from fractions import Fraction

from .qnum import QNum


def _is_scalar(x):
    return isinstance(x, (int, Fraction, QNum))


class Poly1:
    """Dense univariate polynomial; coeffs[k] is the coefficient of t^k."""

    __slots__ = ("coeffs",)

    def __init__(self, coeffs=()):
        cs = list(coeffs)
        while cs and not cs[-1]:
            cs.pop()
        self.coeffs = cs

    @classmethod
    def const(cls, c):
        return cls([Fraction(c) if isinstance(c, int) else c])

    @classmethod
    def t(cls):
        return cls([Fraction(0), Fraction(1)])

    @classmethod
    def from_roots(cls, roots):
        p = cls.const(1)
        for r in roots:
            p = p * cls([-r if not isinstance(r, int) else Fraction(-r), Fraction(1)])
        return p

    def degree(self):
        return len(self.coeffs) - 1

    def is_zero(self):
        return not self.coeffs

    def __bool__(self):
        return bool(self.coeffs)

    def __eq__(self, other):
        if _is_scalar(other):
            other = Poly1.const(other)
        if not isinstance(other, Poly1):
            return NotImplemented
        return not (self - other)

    def __hash__(self):
        return hash(tuple(QNum(c) if not isinstance(c, QNum) else c for c in self.coeffs))

    def __getitem__(self, k):
        return self.coeffs[k] if 0 <= k < len(self.coeffs) else Fraction(0)

    def lc(self):
        if not self.coeffs:
            raise ValueError("leading coefficient of zero polynomial")
        return self.coeffs[-1]

    def __add__(self, other):
        if _is_scalar(other):
            other = Poly1.const(other)
        n = max(len(self.coeffs), len(other.coeffs))
        return Poly1([self[k] + other[k] for k in range(n)])

    __radd__ = __add__

    def __neg__(self):
        return Poly1([-c for c in self.coeffs])

    def __sub__(self, other):
        if _is_scalar(other):
            other = Poly1.const(other)
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if _is_scalar(other):
            if not other:
                return Poly1()
            return Poly1([c * other for c in self.coeffs])
        if not self.coeffs or not other.coeffs:
            return Poly1()
        out = [Fraction(0)] * (len(self.coeffs) + len(other.coeffs) - 1)
        for i, a in enumerate(self.coeffs):
            if not a:
                continue
            for j, b in enumerate(other.coeffs):
                if b:
                    out[i + j] = out[i + j] + a * b
        return Poly1(out)

    __rmul__ = __mul__

    def __pow__(self, n):
        result = Poly1.const(1)
        base = self
        while n:
            if n & 1:
                result = result * base
            base = base * base
            n >>= 1
        return result

    def divmod(self, other):
        if not other:
            raise ZeroDivisionError("polynomial division by zero")
        rem = list(self.coeffs)
        dlead = other.lc()
        dd = other.degree()
        q = [Fraction(0)] * max(0, len(rem) - dd)
        while len(rem) - 1 >= dd and any(rem):
            while rem and not rem[-1]:
                rem.pop()
            if len(rem) - 1 < dd:
                break
            k = len(rem) - 1 - dd
            factor = rem[-1] / dlead
            q[k] = factor
            for i, c in enumerate(other.coeffs):
                rem[k + i] = rem[k + i] - factor * c
            rem.pop()
        return Poly1(q), Poly1(rem)

    def __mod__(self, other):
        return self.divmod(other)[1]

    def __floordiv__(self, other):
        return self.divmod(other)[0]

    def monic(self):
        if not self.coeffs:
            return self
        l = self.lc()
        return Poly1([c / l for c in self.coeffs])

    def derivative(self):
        return Poly1([k * c for k, c in enumerate(self.coeffs)][1:])

    def eval(self, x):
        acc = 0
        for c in reversed(self.coeffs):
            acc = acc * x + (complex(c) if isinstance(x, complex) and isinstance(c, QNum) else c)
        return acc

    def gcd(self, other):
        a, b = self, other
        while b:
            a, b = b, a % b
        return a.monic() if a else a

    def shift_scale(self, a, b):
        """p(a*t + b) for scalars a, b."""
        lin = Poly1([b if not isinstance(b, int) else Fraction(b),
                     a if not isinstance(a, int) else Fraction(a)])
        acc = Poly1()
        for c in reversed(self.coeffs):
            acc = acc * lin + Poly1.const(c)
        return acc

    def rational_content_cleared(self):
        """For rational coefficients: (integer-primitive polynomial, content)."""
        if not self.coeffs:
            return self, Fraction(1)
        fracs = [c if isinstance(c, Fraction) else c.as_fraction() for c in self.coeffs]
        from math import gcd, lcm

        den = 1
        for f in fracs:
            den = lcm(den, f.denominator)
        ints = [int(f * den) for f in fracs]
        g = 0
        for v in ints:
            g = gcd(g, abs(v))
        g = g or 1
        sign = -1 if ints[-1] < 0 else 1
        prim = Poly1([Fraction(v * sign, g) for v in ints])
        return prim, Fraction(g * sign, den)

    def __repr__(self):
        from .parsing import format_poly1

        return format_poly1(self)


class RationalFunction:
    """Reduced fraction of univariate polynomials with monic denominator."""

    __slots__ = ("num", "den")

    def __init__(self, num, den=None, reduce=True):
        if _is_scalar(num):
            num = Poly1.const(num)
        if den is None:
            den = Poly1.const(1)
        elif _is_scalar(den):
            den = Poly1.const(den)
        if not den:
            raise ZeroDivisionError("rational function with zero denominator")
        if reduce and num and den.degree() > 0:
            g = num.gcd(den)
            if g.degree() > 0:
                num = num.divmod(g)[0]
                den = den.divmod(g)[0]
        if not num:
            den = Poly1.const(1)
        l = den.lc()
        if l != 1:
            num = num * (Fraction(1) / l if not isinstance(l, QNum) else l.inverse())
            den = den.monic()
        self.num = num
        self.den = den

    @classmethod
    def const(cls, c):
        return cls(Poly1.const(c))

    @classmethod
    def t(cls):
        return cls(Poly1.t())

    def is_zero(self):
        return not self.num

    def __bool__(self):
        return bool(self.num)

    def is_polynomial(self):
        return self.den.degree() == 0

    def __eq__(self, other):
        if _is_scalar(other) or isinstance(other, Poly1):
            other = RationalFunction(other)
        if not isinstance(other, RationalFunction):
            return NotImplemented
        return not (self.num * other.den - other.num * self.den)

    def __hash__(self):
        return hash((self.num, self.den))

    def __add__(self, other):
        if _is_scalar(other) or isinstance(other, Poly1):
            other = RationalFunction(other)
        if self.den.degree() == 0 and other.den.degree() == 0:
            return RationalFunction(self.num + other.num, reduce=False)
        return RationalFunction(
            self.num * other.den + other.num * self.den, self.den * other.den
        )

    __radd__ = __add__

    def __neg__(self):
        return RationalFunction(-self.num, self.den, reduce=False)

    def __sub__(self, other):
        if _is_scalar(other) or isinstance(other, Poly1):
            other = RationalFunction(other)
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if _is_scalar(other) or isinstance(other, Poly1):
            other = RationalFunction(other)
        return RationalFunction(self.num * other.num, self.den * other.den)

    __rmul__ = __mul__

    def __truediv__(self, other):
        if _is_scalar(other) or isinstance(other, Poly1):
            other = RationalFunction(other)
        if not other.num:
            raise ZeroDivisionError("division by zero rational function")
        return RationalFunction(self.num * other.den, self.den * other.num)

    def __rtruediv__(self, other):
        if _is_scalar(other) or isinstance(other, Poly1):
            other = RationalFunction(other)
        return other / self

    def __pow__(self, n):
        if n < 0:
            return (RationalFunction(Poly1.const(1)) / self) ** (-n)
        return RationalFunction(self.num ** n, self.den ** n)

    def inverse(self):
        return RationalFunction(Poly1.const(1)) / self

    def derivative(self):
        return RationalFunction(
            self.num.derivative() * self.den - self.num * self.den.derivative(),
            self.den * self.den,
        )

    def eval(self, x):
        n = self.num.eval(x)
        d = self.den.eval(x)
        if isinstance(n, (Fraction, int)) and isinstance(d, (Fraction, int)):
            return Fraction(n, 1) / d
        return n / d

    def substitute(self, other: "RationalFunction") -> "RationalFunction":
        """Self evaluated at another rational function of the variable."""
        num_acc = RationalFunction(Poly1())
        for c in reversed(self.num.coeffs):
            num_acc = num_acc * other + RationalFunction(Poly1.const(c))
        den_acc = RationalFunction(Poly1())
        for c in reversed(self.den.coeffs):
            den_acc = den_acc * other + RationalFunction(Poly1.const(c))
        return num_acc / den_acc

    def __repr__(self):
        from .parsing import format_poly1

        if self.is_polynomial():
            return format_poly1(self.num)
        return f"({format_poly1(self.num)})/({format_poly1(self.den)})"
