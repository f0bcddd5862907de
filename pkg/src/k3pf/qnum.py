"""Exact arithmetic in multiquadratic number fields.

A :class:`QNum` is an element of a field Q(sqrt(d1), ..., sqrt(dk)) where the
d_i are squarefree integers, possibly negative (sqrt(-1) is the imaginary
unit).  Elements are stored as a finite sum  sum_m c_m * sqrt(m)  with
squarefree integer m and rational c_m; the key m = 1 holds the rational part.

This covers every exact constant needed here: rational numbers, quadratic
irrationals like -8 + 4*sqrt(3), Gaussian rationals, and the matrix entries
of the monodromy generators, which live in composites such as Q(i, sqrt(2),
sqrt(3)).
"""

from __future__ import annotations

from fractions import Fraction
from math import isqrt


def squarefree_decompose(n: int) -> tuple[int, int]:
    """Return (s, m) with n = s^2 * m and m squarefree (m carries the sign)."""
    if n == 0:
        return 0, 0
    sign = 1 if n > 0 else -1
    n = abs(n)
    s = 1
    m = 1
    d = 2
    while d * d <= n:
        if n % d == 0:
            e = 0
            while n % d == 0:
                n //= d
                e += 1
            s *= d ** (e // 2)
            if e % 2:
                m *= d
        d += 1 if d == 2 else 2
    m *= n
    return s, sign * m


_FRACTIONAL = (int, Fraction)


class QNum:
    """Element of a multiquadratic extension of Q, always normalized."""

    __slots__ = ("_terms",)

    def __init__(self, value=0, _terms=None):
        if _terms is not None:
            self._terms = _terms
            return
        if isinstance(value, QNum):
            self._terms = value._terms
        elif isinstance(value, _FRACTIONAL):
            f = Fraction(value)
            self._terms = {1: f} if f else {}
        else:
            raise TypeError(f"cannot build QNum from {type(value).__name__}")

    # -- construction helpers ------------------------------------------------

    @staticmethod
    def sqrt_int(d: int) -> "QNum":
        """Exact square root of the integer d (i for d = -1, etc.)."""
        if d == 0:
            return QNum(0)
        s, m = squarefree_decompose(d)
        if m == 1:
            return QNum(s)
        return QNum(0, _terms={m: Fraction(s)})

    @staticmethod
    def sqrt_fraction(q) -> "QNum":
        """Exact square root of a nonzero rational q (sqrt(p/r) = sqrt(p*r)/r)."""
        q = Fraction(q)
        if q == 0:
            return QNum(0)
        root = QNum.sqrt_int(q.numerator * q.denominator)
        return root / q.denominator

    @staticmethod
    def imaginary_unit() -> "QNum":
        return QNum.sqrt_int(-1)

    @staticmethod
    def from_terms(terms: dict) -> "QNum":
        return QNum(0, _terms={m: Fraction(c) for m, c in terms.items() if c})

    # -- predicates and accessors --------------------------------------------

    @property
    def terms(self) -> dict:
        return dict(self._terms)

    def is_rational(self) -> bool:
        return not self._terms or set(self._terms) == {1}

    def is_real(self) -> bool:
        return all(m > 0 for m in self._terms)

    def as_fraction(self) -> Fraction:
        if not self._terms:
            return Fraction(0)
        if set(self._terms) == {1}:
            return self._terms[1]
        raise ValueError(f"{self} is not rational")

    def real(self) -> "QNum":
        return QNum(0, _terms={m: c for m, c in self._terms.items() if m > 0})

    def imag(self) -> "QNum":
        # coefficient of i: a term c*sqrt(m) with m < 0 is c*sqrt(|m|)*i
        out = {}
        for m, c in self._terms.items():
            if m < 0:
                out[-m if m != -1 else 1] = c
        return QNum(0, _terms=out)

    def conjugate(self) -> "QNum":
        """Complex conjugate (flips the sign of all sqrt(m), m < 0 terms)."""
        return QNum(0, _terms={m: (-c if m < 0 else c) for m, c in self._terms.items()})

    def galois_flip(self, p: int) -> "QNum":
        """The automorphism sending sqrt(m) -> -sqrt(m) whenever p divides m.

        For p = -1 the flip acts on all imaginary basis elements.
        """
        out = {}
        for m, c in self._terms.items():
            if (p == -1 and m < 0) or (p > 1 and m % p == 0):
                out[m] = -c
            else:
                out[m] = c
        return QNum(0, _terms=out)

    # -- arithmetic ----------------------------------------------------------

    def __bool__(self):
        return bool(self._terms)

    def __eq__(self, other):
        other = _coerce(other)
        if other is NotImplemented:
            return NotImplemented
        return self._terms == other._terms

    def __hash__(self):
        if self.is_rational():
            return hash(self.as_fraction())
        return hash(frozenset(self._terms.items()))

    def __add__(self, other):
        other = _coerce(other)
        if other is NotImplemented:
            return NotImplemented
        out = dict(self._terms)
        for m, c in other._terms.items():
            s = out.get(m, 0) + c
            if s:
                out[m] = s
            else:
                out.pop(m, None)
        return QNum(0, _terms=out)

    __radd__ = __add__

    def __neg__(self):
        return QNum(0, _terms={m: -c for m, c in self._terms.items()})

    def __sub__(self, other):
        other = _coerce(other)
        if other is NotImplemented:
            return NotImplemented
        return self + (-other)

    def __rsub__(self, other):
        other = _coerce(other)
        if other is NotImplemented:
            return NotImplemented
        return other + (-self)

    def __mul__(self, other):
        other = _coerce(other)
        if other is NotImplemented:
            return NotImplemented
        out: dict = {}
        for m1, c1 in self._terms.items():
            for m2, c2 in other._terms.items():
                coeff, m = _mul_radicals(m1, m2)
                s = out.get(m, 0) + c1 * c2 * coeff
                if s:
                    out[m] = s
                else:
                    out.pop(m, None)
        return QNum(0, _terms=out)

    __rmul__ = __mul__

    def inverse(self) -> "QNum":
        if not self._terms:
            raise ZeroDivisionError("QNum division by zero")
        if self.is_rational():
            return QNum(1 / self._terms[1])
        p = self._radical_prime()
        flip = self.galois_flip(p)
        norm = self * flip  # lies in a strictly smaller multiquadratic field
        return flip * norm.inverse()

    def _radical_prime(self) -> int:
        for m in self._terms:
            if m < 0:
                return -1
            if m > 1:
                d = 2
                while d * d <= m:
                    if m % d == 0:
                        return d
                    d += 1 if d == 2 else 2
                return m
        raise AssertionError("rational QNum has no radical part")

    def __truediv__(self, other):
        other = _coerce(other)
        if other is NotImplemented:
            return NotImplemented
        return self * other.inverse()

    def __rtruediv__(self, other):
        other = _coerce(other)
        if other is NotImplemented:
            return NotImplemented
        return other * self.inverse()

    def __pow__(self, n: int):
        if n < 0:
            return self.inverse() ** (-n)
        result = QNum(1)
        base = self
        while n:
            if n & 1:
                result = result * base
            base = base * base
            n >>= 1
        return result

    # -- numerics and display --------------------------------------------------

    def __complex__(self):
        z = 0j
        for m, c in self._terms.items():
            if m > 0:
                z += float(c) * (m ** 0.5)
            else:
                z += 1j * float(c) * ((-m) ** 0.5)
        return z

    def __float__(self):
        if not self.is_real():
            raise ValueError(f"{self} is not real")
        return sum(float(c) * (m ** 0.5) for m, c in self._terms.items())

    def __repr__(self):
        return f"QNum({self})"

    def __str__(self):
        if not self._terms:
            return "0"
        parts = []
        for m in sorted(self._terms, key=abs):
            c = self._terms[m]
            if m == 1:
                t = str(c)
            else:
                rad = "i" if m == -1 else (f"sqrt({m})" if m > 0 else f"i*sqrt({-m})")
                if c == 1:
                    t = rad
                elif c == -1:
                    t = f"-{rad}"
                else:
                    t = f"{c}*{rad}"
            parts.append(t)
        s = parts[0]
        for t in parts[1:]:
            s += f" + {t}" if not t.startswith("-") else f" - {t[1:]}"
        return s

    # -- real comparisons ------------------------------------------------------

    def __lt__(self, other):
        return self._compare(other) < 0

    def __le__(self, other):
        return self._compare(other) <= 0

    def __gt__(self, other):
        return self._compare(other) > 0

    def __ge__(self, other):
        return self._compare(other) >= 0

    def _compare(self, other) -> int:
        other = _coerce(other)
        if other is NotImplemented:
            raise TypeError("cannot compare QNum with that type")
        diff = self - other
        if not diff:
            return 0
        if not diff.is_real():
            raise ValueError("cannot order non-real quantities")
        # distinct multiquadratic reals are never closer than float precision
        # allows at the magnitudes used here
        return 1 if float(diff) > 0 else -1


def _mul_radicals(m1: int, m2: int) -> tuple[int, int]:
    """sqrt(m1)*sqrt(m2) = coeff*sqrt(m), m squarefree; returns (coeff, m)."""
    if m1 == 1:
        return 1, m2
    if m2 == 1:
        return 1, m1
    prod = m1 * m2
    s, m = squarefree_decompose(prod)
    if m1 < 0 and m2 < 0:
        # i*sqrt(a) * i*sqrt(b) = -sqrt(ab); decompose gave +sqrt(|ab|)
        return -s, m
    return s, m


def _coerce(x):
    if isinstance(x, QNum):
        return x
    if isinstance(x, _FRACTIONAL):
        return QNum(x)
    return NotImplemented


def to_complex(x) -> complex:
    """Complex embedding of a QNum, Fraction, int or complex."""
    if isinstance(x, QNum):
        return complex(x)
    if isinstance(x, complex):
        return x
    return complex(float(x), 0.0)


def qnum_sqrt(x) -> QNum:
    """Exact square root of a *rational* QNum/Fraction value, if one is needed
    as a QNum (raises for non-rational arguments)."""
    if isinstance(x, QNum):
        x = x.as_fraction()
    return QNum.sqrt_fraction(Fraction(x))


class AlgebraicPoint:
    """A point algebraic over Q of degree <= 2, with a chosen complex embedding.

    Exact quadratic values are carried as QNum whenever possible; the float
    embedding feeds path planning and rendering, never certified arithmetic.
    """

    __slots__ = ("minpoly", "exact", "approx", "radius")

    def __init__(self, minpoly=None, exact=None, approx=None, radius=1e-15):
        # minpoly: tuple of Fractions, low degree first (None when the point
        # is only known through its float embedding)
        self.minpoly = tuple(Fraction(c) for c in minpoly) if minpoly is not None else None
        self.exact = exact
        if approx is None and exact is not None:
            approx = to_complex(exact)
        self.approx = approx
        self.radius = radius

    @staticmethod
    def from_rational(r) -> "AlgebraicPoint":
        r = Fraction(r)
        return AlgebraicPoint((-r, Fraction(1)), exact=QNum(r))

    @staticmethod
    def from_qnum(v: QNum) -> "AlgebraicPoint":
        if v.is_rational():
            return AlgebraicPoint.from_rational(v.as_fraction())
        # v = a + b*sqrt(m): minimal polynomial x^2 - 2a x + (a^2 - b^2 m)
        terms = v.terms
        a = terms.get(1, Fraction(0))
        rads = [m for m in terms if m != 1]
        if len(rads) != 1:
            raise ValueError("AlgebraicPoint must be of degree <= 2 over Q")
        m = rads[0]
        b = terms[m]
        return AlgebraicPoint((a * a - b * b * m, -2 * a, Fraction(1)), exact=v)

    def residual(self) -> float:
        if self.minpoly is None:
            return 0.0
        z = self.approx
        acc = 0j
        for c in reversed(self.minpoly):
            acc = acc * z + complex(float(c), 0)
        return abs(acc)

    def __eq__(self, other):
        if not isinstance(other, AlgebraicPoint):
            return NotImplemented
        if self.exact is not None and other.exact is not None:
            return self.exact == other.exact
        return abs(self.approx - other.approx) <= max(self.radius, other.radius, 1e-12)

    def __hash__(self):
        return hash(self.exact) if self.exact is not None else hash(self.minpoly)

    def __repr__(self):
        if self.exact is not None:
            return f"AlgebraicPoint({self.exact})"
        return f"AlgebraicPoint(approx={self.approx})"


def isqrt_exact(n: int):
    """Integer square root if n is a perfect square, else None."""
    if n < 0:
        return None
    r = isqrt(n)
    return r if r * r == n else None


_COS_TABLE = None


def unit_root(r) -> "QNum | None":
    """e^(2 pi i r) as an exact QNum when the denominator of r divides 24.

    These are exactly the roots of unity inside a multiquadratic field
    (Q(zeta_24) = Q(i, sqrt(2), sqrt(3))); returns None otherwise.
    """
    global _COS_TABLE
    r = Fraction(r) % 1
    if 24 % r.denominator != 0:
        return None
    if _COS_TABLE is None:
        s2 = QNum.sqrt_int(2)
        s3 = QNum.sqrt_int(3)
        s6 = QNum.sqrt_int(6)
        quarter = Fraction(1, 4)
        table = {
            0: QNum(1),
            1: (s6 + s2) * quarter,
            2: s3 * Fraction(1, 2),
            3: s2 * Fraction(1, 2),
            4: QNum(Fraction(1, 2)),
            5: (s6 - s2) * quarter,
            6: QNum(0),
        }
        for k in range(7, 13):
            table[k] = -table[12 - k]
        _COS_TABLE = table

    def cos24(k):  # cos(k * pi / 12)
        k %= 24
        return _COS_TABLE[k] if k <= 12 else _COS_TABLE[24 - k]

    k = int(24 * r)
    return cos24(k) + QNum.imaginary_unit() * cos24(6 - k)
