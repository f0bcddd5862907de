"""Small exact matrices and eigenvalue extraction for sizes 2 and 3.

Entries are Fraction or QNum (mixing allowed).  Everything here is tiny:
residue matrices are 2x2, group generators at most 4x4, and the eigenvalue
routines only promise exactness through quadratic extensions, falling back to
float embeddings wrapped in :class:`AlgebraicPoint` otherwise.
"""

from __future__ import annotations

import cmath
from fractions import Fraction

from .qnum import AlgebraicPoint, QNum, qnum_sqrt


class ExactMatrix:
    __slots__ = ("rows",)

    def __init__(self, rows):
        self.rows = [list(r) for r in rows]
        if self.rows:
            w = len(self.rows[0])
            if any(len(r) != w for r in self.rows):
                raise ValueError("ragged matrix")

    @classmethod
    def identity(cls, n):
        return cls([[Fraction(1) if i == j else Fraction(0) for j in range(n)] for i in range(n)])

    @classmethod
    def zero(cls, n, m=None):
        m = n if m is None else m
        return cls([[Fraction(0)] * m for _ in range(n)])

    @property
    def nrows(self):
        return len(self.rows)

    @property
    def ncols(self):
        return len(self.rows[0]) if self.rows else 0

    def __getitem__(self, ij):
        i, j = ij
        return self.rows[i][j]

    def __eq__(self, other):
        if not isinstance(other, ExactMatrix):
            return NotImplemented
        if self.nrows != other.nrows or self.ncols != other.ncols:
            return False
        return all(
            QNum(a) == QNum(b) if not isinstance(a, QNum) and not isinstance(b, QNum)
            else (QNum(a) if not isinstance(a, QNum) else a) == (QNum(b) if not isinstance(b, QNum) else b)
            for ra, rb in zip(self.rows, other.rows)
            for a, b in zip(ra, rb)
        )

    def __hash__(self):
        return hash(
            tuple(tuple(c if isinstance(c, QNum) else QNum(c) for c in r) for r in self.rows)
        )

    def __add__(self, other):
        return ExactMatrix(
            [[a + b for a, b in zip(ra, rb)] for ra, rb in zip(self.rows, other.rows)]
        )

    def __sub__(self, other):
        return ExactMatrix(
            [[a - b for a, b in zip(ra, rb)] for ra, rb in zip(self.rows, other.rows)]
        )

    def __neg__(self):
        return ExactMatrix([[-a for a in r] for r in self.rows])

    def __mul__(self, other):
        if isinstance(other, ExactMatrix):
            if self.ncols != other.nrows:
                raise ValueError("dimension mismatch in matrix product")
            return ExactMatrix(
                [
                    [
                        sum(self.rows[i][k] * other.rows[k][j] for k in range(self.ncols))
                        for j in range(other.ncols)
                    ]
                    for i in range(self.nrows)
                ]
            )
        return ExactMatrix([[a * other for a in r] for r in self.rows])

    __rmul__ = __mul__

    def trace(self):
        return sum(self.rows[i][i] for i in range(self.nrows))

    def det(self):
        n = self.nrows
        if n == 1:
            return self.rows[0][0]
        if n == 2:
            (a, b), (c, d) = self.rows
            return a * d - b * c
        if n == 3:
            r = self.rows
            return (
                r[0][0] * (r[1][1] * r[2][2] - r[1][2] * r[2][1])
                - r[0][1] * (r[1][0] * r[2][2] - r[1][2] * r[2][0])
                + r[0][2] * (r[1][0] * r[2][1] - r[1][1] * r[2][0])
            )
        # fraction-free Gaussian elimination for the 4x4 cases
        m = [row[:] for row in self.rows]
        det = Fraction(1)
        for col in range(n):
            piv = next((r for r in range(col, n) if m[r][col]), None)
            if piv is None:
                return Fraction(0)
            if piv != col:
                m[col], m[piv] = m[piv], m[col]
                det = -det
            det = det * m[col][col]
            inv = (
                Fraction(1) / m[col][col]
                if not isinstance(m[col][col], QNum)
                else m[col][col].inverse()
            )
            for r in range(col + 1, n):
                f = m[r][col] * inv
                if f:
                    m[r] = [x - f * y for x, y in zip(m[r], m[col])]
        return det

    def inverse(self):
        n = self.nrows
        m = [row[:] + [Fraction(1) if i == j else Fraction(0) for j in range(n)]
             for i, row in enumerate(self.rows)]
        for col in range(n):
            piv = next((r for r in range(col, n) if m[r][col]), None)
            if piv is None:
                raise ZeroDivisionError("singular matrix")
            m[col], m[piv] = m[piv], m[col]
            inv = (
                Fraction(1) / m[col][col]
                if not isinstance(m[col][col], QNum)
                else m[col][col].inverse()
            )
            m[col] = [x * inv for x in m[col]]
            for r in range(n):
                if r != col and m[r][col]:
                    f = m[r][col]
                    m[r] = [x - f * y for x, y in zip(m[r], m[col])]
        return ExactMatrix([row[n:] for row in m])

    def charpoly(self):
        """Coefficients of det(t*I - M), low degree first."""
        n = self.nrows
        tr = self.trace()
        if n == 1:
            return [-tr, Fraction(1)]
        if n == 2:
            return [self.det(), -tr, Fraction(1)]
        if n == 3:
            d = self.det()
            r = self.rows
            m11 = r[1][1] * r[2][2] - r[1][2] * r[2][1]
            m22 = r[0][0] * r[2][2] - r[0][2] * r[2][0]
            m33 = r[0][0] * r[1][1] - r[0][1] * r[1][0]
            return [-d, m11 + m22 + m33, -tr, Fraction(1)]
        raise NotImplementedError("charpoly only for n <= 3")

    def to_complex(self):
        from .qnum import to_complex

        return [[to_complex(a) for a in r] for r in self.rows]

    def map(self, f):
        return ExactMatrix([[f(a) for a in r] for r in self.rows])

    def __repr__(self):
        from .parsing import format_scalar

        rows = ["[" + ", ".join(format_scalar(a) for a in r) + "]" for r in self.rows]
        return "[" + "; ".join(rows) + "]"


def _as_fraction_or_none(x):
    if isinstance(x, (int, Fraction)):
        return Fraction(x)
    if isinstance(x, QNum) and x.is_rational():
        return x.as_fraction()
    return None


def eigenvalues_2x2(m: ExactMatrix):
    """Exact eigenvalues of a 2x2 matrix when they live in a quadratic
    extension; AlgebraicPoint float fallbacks otherwise."""
    tr = m.trace()
    det = m.det()
    if not isinstance(tr, QNum):
        tr = QNum(tr)
    if not isinstance(det, QNum):
        det = QNum(det)
    disc = tr * tr - 4 * det
    if disc.is_rational():
        root = qnum_sqrt(disc)
        half = Fraction(1, 2)
        return [(tr + root) * half, (tr - root) * half]
    # discriminant itself irrational: exact square root generally leaves the
    # multiquadratic tower, so fall back to certified float embeddings
    trc = complex(tr)
    dc = cmath.sqrt(complex(disc))
    vals = [(trc + dc) / 2, (trc - dc) / 2]
    gap = abs(vals[0] - vals[1]) / 2 or 1e-12
    return [AlgebraicPoint(approx=v, radius=min(gap, 1e-9)) for v in vals]


def _divisors(n):
    n = abs(n)
    if n == 0:
        return [1]
    out = set()
    d = 1
    while d * d <= n:
        if n % d == 0:
            out.add(d)
            out.add(n // d)
        d += 1
    return sorted(out)


def _rational_roots(coeffs):
    """Rational roots (with multiplicity) of a polynomial over Q; also returns
    the root-free cofactor."""
    from .ratfunc import Poly1

    p = Poly1(list(coeffs))
    roots = []
    t = Poly1([Fraction(0), Fraction(1)])
    while p.degree() > 0 and not p[0]:
        roots.append(Fraction(0))
        p = p.divmod(t)[0]
    while p.degree() > 0:
        prim, _ = p.rational_content_cleared()
        ints = [int(c) for c in prim.coeffs]
        found = None
        for qd in _divisors(ints[-1]):
            for pd in _divisors(ints[0]):
                for s in (1, -1):
                    cand = Fraction(s * pd, qd)
                    if not p.eval(cand):
                        found = cand
                        break
                if found is not None:
                    break
            if found is not None:
                break
        if found is None:
            break
        roots.append(found)
        p = p.divmod(Poly1([-found, Fraction(1)]))[0]
    return roots, p


def roots_exact(poly1) -> list:
    """All roots of a univariate polynomial over Q, exact through quadratic
    (and biquadratic) factors; raises if a factor of degree > 2 remains."""
    from .ratfunc import Poly1

    if any(isinstance(c, QNum) and not c.is_rational() for c in poly1.coeffs):
        raise NotImplementedError("root extraction implemented over Q only")
    coeffs = [c.as_fraction() if isinstance(c, QNum) else Fraction(c) for c in poly1.coeffs]
    rational, rest = _rational_roots(coeffs)
    roots = [QNum(r) for r in rational]
    if rest.degree() <= 0:
        return roots
    if rest.degree() == 2:
        c, b, a = rest[0], rest[1], rest[2]
        disc = b * b - 4 * a * c
        rt = QNum.sqrt_fraction(Fraction(disc))
        roots.append((QNum(-b) + rt) / (2 * a))
        roots.append((QNum(-b) - rt) / (2 * a))
        return roots
    if rest.degree() == 4 and not rest[1] and not rest[3]:
        # biquadratic: solve for t^2 first
        c, b, a = rest[0], rest[2], rest[4]
        disc = b * b - 4 * a * c
        rt = QNum.sqrt_fraction(Fraction(disc))
        for sign in (1, -1):
            mu = (QNum(-b) + sign * rt) / (2 * a)
            if not mu.is_rational():
                raise NotImplementedError("quartic roots beyond quadratic extensions")
            lam = QNum.sqrt_fraction(mu.as_fraction())
            roots.append(lam)
            roots.append(-lam)
        return roots
    raise NotImplementedError(
        f"cannot split a degree-{rest.degree()} factor into quadratic pieces"
    )


def eigenvalues(m: ExactMatrix):
    """Exact eigenvalues for 2x2 and 3x3 matrices (spec: quadratic closure)."""
    if m.nrows == 2:
        return eigenvalues_2x2(m)
    if m.nrows == 3:
        cp = m.charpoly()  # low degree first: [c0, c1, c2, 1]
        rational_ok = all(_as_fraction_or_none(c) is not None for c in cp)
        if rational_ok:
            from .ratfunc import Poly1

            p = Poly1([_as_fraction_or_none(c) for c in cp])
            try:
                return roots_exact(p)
            except NotImplementedError:
                pass
        # float fallback via the companion cubic
        c0, c1, c2, _ = [complex(QNum(c)) if not isinstance(c, QNum) else complex(c) for c in cp]
        roots = _cubic_roots(c2, c1, c0)
        gap = min(
            (abs(a - b) for i, a in enumerate(roots) for b in roots[i + 1:]), default=1.0
        ) / 2 or 1e-12
        return [
            AlgebraicPoint((QNum(0), QNum(0), QNum(0), QNum(1)), approx=r, radius=min(gap, 1e-9))
            for r in roots
        ]
    raise ValueError("eigenvalues implemented for n = 2 or 3")


def _cubic_roots(b, c, d):
    """Roots of t^3 + b t^2 + c t + d over C (Cardano, float precision)."""
    shift = -b / 3
    p = c - b * b / 3
    q = 2 * b ** 3 / 27 - b * c / 3 + d
    disc = (q / 2) ** 2 + (p / 3) ** 3
    s = cmath.sqrt(disc)
    u3 = -q / 2 + s
    if abs(u3) < 1e-300:
        u3 = -q / 2 - s
    u = u3 ** (1 / 3)
    if abs(u) < 1e-300:
        return [shift, shift, shift]
    w = complex(-0.5, 3 ** 0.5 / 2)
    out = []
    for k in range(3):
        uk = u * w ** k
        out.append(shift + uk - p / (3 * uk))
    return out
