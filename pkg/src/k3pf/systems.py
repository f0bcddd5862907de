"""First-order Fuchsian systems: conversion from second-order equations,
Riemann symbols, and local monodromy.

``equation_to_system`` uses the change of basis w = (f, (z - a) f') for a
distinguished singular point a.  For a second-order Fuchsian equation with
squarefree polynomial leading coefficient this produces a Fuchsian system
with the same singular points and monodromy representation:

    A = [[0, 1/(z-a)], [-(z-a) a0/a2, 1/(z-a) - a1/a2]]

whose partial fractions have the residue shapes [[0,1],[0,*]] at a and
[[0,0],[*,*]] elsewhere.  With a = 1 this reproduces the classical
hypergeometric system, and with a = alpha_1 the textbook Lame system.
"""

from __future__ import annotations

import cmath
from fractions import Fraction

from .linalg import ExactMatrix, eigenvalues, roots_exact
from .ode import LinearODE, ODEError
from .qnum import QNum, to_complex
from .ratfunc import Poly1, RationalFunction


class SystemError(ValueError):
    pass


class FuchsianSystem:
    """d/dz w = sum_i R_i/(z - p_i) w with exact points and residues."""

    def __init__(self, points, residues, dim=2):
        if len(points) != len(residues):
            raise SystemError("point/residue count mismatch")
        self.points = list(points)          # QNum (or AlgebraicPoint floats)
        self.residues = [r if isinstance(r, ExactMatrix) else ExactMatrix(r) for r in residues]
        self.dim = dim
        for r in self.residues:
            if r.nrows != dim or r.ncols != dim:
                raise SystemError("residue dimension mismatch")
        self._r_inf = None

    @property
    def residue_at_infinity(self) -> ExactMatrix:
        if self._r_inf is None:
            acc = ExactMatrix.zero(self.dim)
            for r in self.residues:
                acc = acc + r
            self._r_inf = -acc
        return self._r_inf

    def residue(self, point):
        for p, r in zip(self.points, self.residues):
            if _same_point(p, point):
                return r
        if point == "inf":
            return self.residue_at_infinity
        raise SystemError(f"no singular point {point!r}")

    def points_complex(self):
        return [to_complex(p) for p in self.points]

    def evaluate(self, z: complex):
        """A(z) as a complex matrix."""
        n = self.dim
        out = [[0j] * n for _ in range(n)]
        for p, r in zip(self.points, self.residues):
            w = 1.0 / (z - to_complex(p))
            rc = r.to_complex()
            for i in range(n):
                for j in range(n):
                    out[i][j] += rc[i][j] * w
        return out

    def __repr__(self):
        return f"FuchsianSystem({len(self.points)} finite points, dim {self.dim})"


def _same_point(p, q) -> bool:
    if isinstance(p, QNum) and isinstance(q, QNum):
        return p == q
    return abs(to_complex(p) - to_complex(q)) < 1e-9


def verify_fuchsian(system: FuchsianSystem) -> bool:
    """Simple poles (distinct points) and the cached infinity relation."""
    pts = system.points
    for i in range(len(pts)):
        for j in range(i + 1, len(pts)):
            if _same_point(pts[i], pts[j]):
                return False
    acc = ExactMatrix.zero(system.dim)
    for r in system.residues:
        acc = acc + r
    return acc + system.residue_at_infinity == ExactMatrix.zero(system.dim)


class RiemannSymbol:
    """Exponents (residue eigenvalues) at every singular point incl. infinity."""

    def __init__(self, entries):
        self.entries = entries  # list of (point_or_'inf', [eigenvalues])

    def exponents(self, point):
        for p, vals in self.entries:
            if p == point or (p != "inf" and point != "inf" and _same_point(p, point)):
                return vals
        raise SystemError(f"no singular point {point!r}")

    def __repr__(self):
        rows = []
        for p, vals in self.entries:
            rows.append(f"{p}: {', '.join(str(v) for v in vals)}")
        return "{ " + " | ".join(rows) + " }"


def riemann_symbol(system: FuchsianSystem) -> RiemannSymbol:
    entries = []
    for p, r in zip(system.points, system.residues):
        entries.append((p, eigenvalues(r)))
    entries.append(("inf", eigenvalues(system.residue_at_infinity)))
    return RiemannSymbol(entries)


def equation_to_system(e: LinearODE, pivot=None) -> FuchsianSystem:
    """Fuchsian system with the singular points and monodromy of `e` (order 2).

    The distinguished point defaults to the largest singular point in the
    (real, imaginary) lexicographic order; pass `pivot` to override, as the
    classical forms of specific equations fix particular choices.
    """
    if e.order != 2:
        raise SystemError("equation_to_system expects a second-order equation")
    a2rf, a1rf, a0rf = e.coeffs[2], e.coeffs[1], e.coeffs[0]
    if not a2rf.is_polynomial():
        raise SystemError("leading coefficient must be polynomial after clearing")
    a2 = a2rf.num
    # squarefree check: gcd(a2, a2') trivial
    if a2.gcd(a2.derivative()).degree() > 0:
        raise SystemError(
            "leading coefficient is not squarefree; divide out repeated roots "
            "or pass to the symmetric-square-root / power-substituted form"
        )
    if not (a1rf.is_polynomial() and a0rf.is_polynomial()):
        raise SystemError(
            "lower coefficients have poles; the distinguished-point conversion "
            "requires an everywhere-simple indicial structure"
        )
    a1, a0 = a1rf.num, a0rf.num
    m = a2.degree()
    if a1.degree() > m - 1 or a0.degree() > m - 2:
        raise SystemError("equation is not Fuchsian (degree bounds violated)")
    points = roots_exact(a2)
    if not points:
        raise SystemError("no finite singular points")
    if pivot is None:
        pivot = max(points, key=_point_key)
    else:
        pivot = pivot if isinstance(pivot, QNum) else QNum(Fraction(pivot))
        if not any(p == pivot for p in points):
            raise SystemError("pivot must be a singular point")
    lc = a2.lc()
    residues = []
    for p in points:
        # a2'(p) = lc * prod_{q != p} (p - q)
        dprod = a2.derivative().eval(p)
        dprod = dprod if isinstance(dprod, QNum) else QNum(dprod)
        dinv = dprod.inverse()
        a1p = _q(a1.eval(p))
        a0p = _q(a0.eval(p))
        if p == pivot:
            theta = QNum(1) - a1p * dinv
            r = ExactMatrix([[QNum(0), QNum(1)], [QNum(0), theta]])
        else:
            l = -(p - pivot) * a0p * dinv
            theta = -a1p * dinv
            r = ExactMatrix([[QNum(0), QNum(0)], [l, theta]])
        residues.append(r)
    return FuchsianSystem(points, residues, dim=2)


def _q(x):
    return x if isinstance(x, QNum) else QNum(x)


def _point_key(p):
    z = to_complex(p)
    return (z.real, z.imag)


class LocalMonodromy:
    """exp(2 pi i J) for the canonical form J of a residue matrix."""

    def __init__(self, point, exponents, matrix, tag, exact=True):
        self.point = point
        self.exponents = exponents
        self.matrix = matrix          # ExactMatrix (QNum) or complex rows
        self.tag = tag
        self.exact = exact

    def __repr__(self):
        return f"LocalMonodromy({self.point}: exponents {self.exponents}, {self.tag})"


def _exp_2pi_i(r: Fraction):
    """e^(2 pi i r) as an exact QNum when the denominator divides 24."""
    from .qnum import unit_root

    return unit_root(r)


def local_monodromy(system: FuchsianSystem, point) -> LocalMonodromy:
    """Local monodromy exp(2 pi i J) at a singular point (or 'inf')."""
    r = system.residue(point)
    eigs = eigenvalues(r)
    fracs = []
    for v in eigs:
        if isinstance(v, QNum) and v.is_rational():
            fracs.append(v.as_fraction())
        else:
            fracs.append(None)
    if None not in fracs and len(fracs) == 2:
        d = fracs[0] - fracs[1]
        if d != 0 and d.denominator == 1:
            raise SystemError(
                "distinct residue eigenvalues differ by an integer; pass to the "
                "symmetric square root before taking local monodromy"
            )
        if d == 0:
            # canonical form may be a Jordan block: semisimplicity iff the
            # residue is scalar
            scalar = r == ExactMatrix([[eigs[0], QNum(0)], [QNum(0), eigs[0]]])
            root = _exp_2pi_i(fracs[0])
            if scalar:
                if root is not None:
                    mat = ExactMatrix([[root, QNum(0)], [QNum(0), root]])
                    return LocalMonodromy(point, fracs, mat, "scalar", True)
                z = cmath.exp(2j * cmath.pi * float(fracs[0]))
                return LocalMonodromy(point, fracs, [[z, 0], [0, z]], "scalar", False)
            # unipotent-times-scalar: entries involve 2*pi*i
            z = cmath.exp(2j * cmath.pi * float(fracs[0]))
            mat = [[z, z * 2j * cmath.pi], [0, z]]
            return LocalMonodromy(point, fracs, mat, "parabolic", False)
        roots = [_exp_2pi_i(f) for f in fracs]
        if all(rt is not None for rt in roots):
            mat = ExactMatrix([[roots[0], QNum(0)], [QNum(0), roots[1]]])
            tag = _conjugacy_tag(fracs)
            return LocalMonodromy(point, fracs, mat, tag, True)
        zs = [cmath.exp(2j * cmath.pi * float(f)) for f in fracs]
        return LocalMonodromy(point, fracs, [[zs[0], 0], [0, zs[1]]],
                              _conjugacy_tag(fracs), False)
    # irrational exponents: float diagonal
    zs = [cmath.exp(2j * cmath.pi * complex(v if not hasattr(v, "approx") else v.approx))
          for v in eigs]
    return LocalMonodromy(point, eigs, [[zs[0], 0], [0, zs[1]]], "generic", False)


def _conjugacy_tag(fracs):
    d = abs(fracs[0] - fracs[1])
    if d == Fraction(1, 2):
        return "elementary (projective order 2)"
    return f"exponent difference {d}"


def is_elementary_exponents(eigs) -> bool:
    vals = []
    for v in eigs:
        if isinstance(v, QNum) and v.is_rational():
            vals.append(v.as_fraction())
        else:
            return False
    return abs(vals[0] - vals[1]) == Fraction(1, 2)


def is_generalized_lame(system: FuchsianSystem):
    """All finite points except possibly one elementary -> (True, free point).

    The free point is 'inf' when every finite point is elementary.
    """
    if system.dim != 2:
        raise SystemError("generalized Lame test is for 2x2 systems")
    non_elementary = []
    for p, r in zip(system.points, system.residues):
        if not is_elementary_exponents(eigenvalues(r)):
            non_elementary.append(p)
    if len(system.points) < 3:
        return False, None
    if not non_elementary:
        return True, "inf"
    if len(non_elementary) == 1:
        return True, non_elementary[0]
    return False, None


def fuchs_exponent_sum(system: FuchsianSystem):
    """Sum of all residue eigenvalues including infinity (always zero, since
    trace(R_inf) = -sum trace(R_i); exposed for the property tests)."""
    total = system.residue_at_infinity.trace()
    for r in system.residues:
        total = total + r.trace()
    return total


# -- serialization ------------------------------------------------------------


def format_system(system: FuchsianSystem) -> str:
    from .parsing import format_scalar

    lines = [f"dim {system.dim}"]
    for p, r in zip(system.points, system.residues):
        pt = format_scalar(p) if isinstance(p, (QNum, Fraction, int)) else str(p)
        lines.append(f"point {pt}")
        for row in r.rows:
            lines.append("  " + "  ".join(format_scalar(c) for c in row))
    return "\n".join(lines) + "\n"


def parse_system(text: str) -> FuchsianSystem:
    from .parsing import parse_scalar

    dim = 2
    points = []
    residues = []
    rows: list = []
    point = None

    def flush():
        nonlocal rows, point
        if point is not None:
            if len(rows) != dim:
                raise SystemError(f"residue at {point} has {len(rows)} rows, expected {dim}")
            points.append(point)
            residues.append(ExactMatrix(rows))
        rows = []
        point = None

    for raw in text.splitlines():
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        if line.startswith("dim "):
            dim = int(line.split()[1])
        elif line.startswith("point "):
            flush()
            val = parse_scalar(line[len("point "):].strip())
            point = val if isinstance(val, QNum) else QNum(val)
        else:
            cells = line.split()
            parsed = [parse_scalar(c) for c in cells]
            rows.append([c if isinstance(c, QNum) else QNum(c) for c in parsed])
    flush()
    return FuchsianSystem(points, residues, dim=dim)
