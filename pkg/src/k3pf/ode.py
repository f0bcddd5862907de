"""Structural operations on linear ODEs in one parameter.

A :class:`LinearODE` is sum a_k(t) d^k/dt^k with rational-function
coefficients.  The canonical representative clears denominators, removes
polynomial content and fixes a positive (or monic-normalized) leading sign,
so golden comparisons can be literal.

The symmetric square of  a2 f'' + a1 f' + a0 f = 0  is

    a2^2 y''' + 3 a1 a2 y'' + (a2(4 a0 + a1') + a1(2 a1 - a2')) y'
             + 2 (a2 a0' + a0 (2 a1 - a2')) y = 0,

the order-3 operator annihilating products of pairs of solutions.  (The
coefficient of y' needs the factor 4 on a0; with 1 instead, the claimed
identity between the printed third-order operators and their square roots
fails, and a numerical solution-product check fails too.)
"""

from __future__ import annotations

from fractions import Fraction
from math import gcd, lcm

from .linalg import roots_exact
from .qnum import QNum
from .ratfunc import Poly1, RationalFunction


class ODEError(ValueError):
    pass


def _as_rf(c):
    if isinstance(c, RationalFunction):
        return c
    if isinstance(c, Poly1):
        return RationalFunction(c)
    return RationalFunction(Poly1.const(c))


class LinearODE:
    """sum coeffs[k] * d^k/dt^k applied to f, coefficient index = order."""

    __slots__ = ("coeffs",)

    def __init__(self, coeffs, normalize=True):
        cs = [_as_rf(c) for c in coeffs]
        while cs and not cs[-1]:
            cs.pop()
        if not cs:
            raise ODEError("zero operator")
        if not cs[-1]:
            raise ODEError("leading coefficient vanishes")
        self.coeffs = cs
        if normalize:
            self._normalize()

    @property
    def order(self):
        return len(self.coeffs) - 1

    def _normalize(self):
        # clear denominators
        den = Poly1.const(1)
        for c in self.coeffs:
            g = den.gcd(c.den)
            den = den * (c.den.divmod(g)[0] if g.degree() > 0 else c.den)
        polys = [c.num * den.divmod(c.den)[0] for c in self.coeffs]
        # remove common polynomial content
        g = Poly1()
        for p in polys:
            if p:
                g = p.gcd(g) if g else p.monic()
        if g and g.degree() > 0:
            polys = [p.divmod(g)[0] if p else p for p in polys]
        # rational content
        rational = True
        rows = []
        for p in polys:
            row = []
            for c in p.coeffs:
                if isinstance(c, QNum):
                    if not c.is_rational():
                        rational = False
                        break
                    row.append(c.as_fraction())
                else:
                    row.append(Fraction(c))
            if not rational:
                break
            rows.append(row)
        if rational:
            den = 1
            num_gcd = 0
            for row in rows:
                for c in row:
                    den = lcm(den, c.denominator)
            for row in rows:
                for c in row:
                    num_gcd = gcd(num_gcd, abs(int(c * den)))
            num_gcd = num_gcd or 1
            lead = rows[-1][-1]
            sign = -1 if lead < 0 else 1
            scale = Fraction(den * sign, num_gcd)
            self.coeffs = [RationalFunction(Poly1([c * scale for c in row])) for row in rows]
        else:
            lead = polys[-1].lc()
            inv = lead.inverse() if isinstance(lead, QNum) else Fraction(1) / lead
            self.coeffs = [RationalFunction(p * inv) for p in polys]

    # -- basic protocol --------------------------------------------------------

    def __eq__(self, other):
        if not isinstance(other, LinearODE):
            return NotImplemented
        return self.order == other.order and all(
            a == b for a, b in zip(self.coeffs, other.coeffs)
        )

    def proportional_to(self, other) -> bool:
        """Same operator up to an overall rational-function factor."""
        if self.order != other.order:
            return False
        ratio = None
        for a, b in zip(self.coeffs, other.coeffs):
            if bool(a) != bool(b):
                return False
            if a:
                r = a / b
                if ratio is None:
                    ratio = r
                elif r != ratio:
                    return False
        return True

    def __repr__(self):
        from .parsing import format_poly1

        parts = []
        for k in range(self.order, -1, -1):
            c = self.coeffs[k]
            if not c:
                continue
            if c.is_polynomial():
                body = format_poly1(c.num)
            else:
                body = f"({format_poly1(c.num)})/({format_poly1(c.den)})"
            d = f"D^{k}" if k > 1 else ("D" if k == 1 else "")
            parts.append(f"({body})*{d}" if d else f"({body})")
        return " + ".join(parts)

    # -- analysis --------------------------------------------------------------

    def leading(self) -> Poly1:
        c = self.coeffs[-1]
        if not c.is_polynomial():
            raise ODEError("leading coefficient is not polynomial")
        return c.num

    def singular_points(self):
        """Exact finite singular points (roots of the cleared leading coeff
        and poles of lower coefficients)."""
        lead = self.leading()
        pts = []
        seen = set()
        for r in roots_exact(lead):
            if r not in seen:
                seen.add(r)
                pts.append(r)
        for c in self.coeffs[:-1]:
            if not c.is_polynomial():
                for r in roots_exact(c.den):
                    if r not in seen:
                        seen.add(r)
                        pts.append(r)
        return pts

    def monic_ratios(self):
        """[a_{n-1}/a_n, ..., a_0/a_n] as rational functions."""
        top = self.coeffs[-1]
        return [c / top for c in self.coeffs[:-1]]

    def apply_numeric(self, fs: list, t: complex) -> complex:
        """Apply the operator to a jet [f, f', ..., f^(n)] at the point t."""
        total = 0j
        for k, c in enumerate(self.coeffs):
            num = c.num.eval(t)
            den = c.den.eval(t)
            total += complex(num) / complex(den) * fs[k]
        return total


def format_ode(e: LinearODE) -> str:
    """Canonical text form (c_k)*D^k + ... + (c_0), round-trippable."""
    return repr(e)


def parse_ode(text: str) -> LinearODE:
    """Parse the canonical form; coefficients may be (num)/(den) ratios."""
    from .parsing import parse_poly1

    chunks = _split_top_level(text.strip(), "+")
    coeffs: dict[int, RationalFunction] = {}
    for chunk in chunks:
        chunk = chunk.strip()
        order = 0
        body = chunk
        if "*D^" in chunk:
            body, _, tail = chunk.rpartition("*D^")
            order = int(tail)
        elif chunk.endswith("*D"):
            body = chunk[:-2]
            order = 1
        body = body.strip()
        if body.startswith("(") and body.endswith(")") and _balanced(body[1:-1]):
            body = body[1:-1]
        parts = _split_top_level(body, "/")
        if len(parts) == 2:
            num = parse_poly1(_strip_parens(parts[0]))
            den = parse_poly1(_strip_parens(parts[1]))
            rf = RationalFunction(num, den)
        else:
            rf = RationalFunction(parse_poly1(body))
        coeffs[order] = coeffs.get(order, RationalFunction(0)) + rf
    n = max(coeffs)
    return LinearODE([coeffs.get(k, RationalFunction(0)) for k in range(n + 1)])


def _split_top_level(text: str, sep: str):
    out = []
    depth = 0
    cur = []
    for ch in text:
        if ch == "(":
            depth += 1
        elif ch == ")":
            depth -= 1
        if ch == sep and depth == 0:
            out.append("".join(cur))
            cur = []
        else:
            cur.append(ch)
    out.append("".join(cur))
    return out


def _balanced(s: str) -> bool:
    depth = 0
    for ch in s:
        if ch == "(":
            depth += 1
        elif ch == ")":
            depth -= 1
            if depth < 0:
                return False
    return depth == 0


def _strip_parens(s: str) -> str:
    s = s.strip()
    while s.startswith("(") and s.endswith(")") and _balanced(s[1:-1]):
        s = s[1:-1].strip()
    return s


def symmetric_square(e: LinearODE) -> LinearODE:
    """Order-3 operator annihilating f^2, f g, g^2 for solutions f, g."""
    if e.order != 2:
        raise ODEError("symmetric square is defined for order-2 equations")
    a2, a1, a0 = e.coeffs[2], e.coeffs[1], e.coeffs[0]
    a2p, a1p, a0p = a2.derivative(), a1.derivative(), a0.derivative()
    c3 = a2 * a2
    c2 = 3 * a1 * a2
    c1 = a2 * (4 * a0 + a1p) + a1 * (2 * a1 - a2p)
    c0 = 2 * (a2 * a0p + a0 * (2 * a1 - a2p))
    return LinearODE([c0, c1, c2, c3])


def symmetric_square_root(e: LinearODE) -> LinearODE:
    """Invert the symmetric square via the monic normal form.

    For a monic second-order operator f'' + P f' + R f, the monic symmetric
    square is y''' + 3P y'' + (2P^2 + P' + 4R) y' + (4PR + 2R') y, so P and R
    are read off the order-3 input and the constant-term slot is the
    consistency check; its failure is reported as the obstruction.
    """
    if e.order != 3:
        raise ODEError("symmetric square root is defined for order-3 equations")
    b3, b2, b1, b0 = e.coeffs[3], e.coeffs[2], e.coeffs[1], e.coeffs[0]
    P = b2 / (3 * b3)
    R = (b1 / b3 - 2 * P * P - P.derivative()) / 4
    check = 4 * P * R + 2 * R.derivative() - b0 / b3
    if check:
        raise ODEError(f"no symmetric square root: obstruction {check!r}")
    root = LinearODE([R, P, RationalFunction(1)])
    return root


def substitute_power(e: LinearODE, k: int) -> LinearODE:
    """Push the equation forward along mu = t^k (same solutions, new variable).

    Valid when the pushforward has rational-function coefficients in mu,
    i.e. the operator is equivalent to one invariant under t -> zeta*t.
    """
    if k < 1:
        raise ODEError("power must be positive")
    if k == 1:
        return e
    n = e.order
    # d/dt = k t^(k-1) D; build rows: (d/dt)^m = sum_j c_{m,j}(t) D^j
    t = RationalFunction(Poly1.t())
    rows = [[RationalFunction(1)]]  # (d/dt)^0 = 1*D^0
    for m in range(1, n + 1):
        prev = rows[-1]
        cur = [RationalFunction(0)] * (m + 1)
        for j, c in enumerate(prev):
            # d/dt (c * D^j) = c' D^j + c * k t^(k-1) D^(j+1)
            cur[j] = cur[j] + c.derivative()
            cur[j + 1] = cur[j + 1] + c * (k * t ** (k - 1))
        rows.append(cur)
    new = [RationalFunction(0)] * (n + 1)
    for m, a in enumerate(e.coeffs):
        if not a:
            continue
        for j, c in enumerate(rows[m]):
            new[j] = new[j] + a * c
    # the operator is only defined up to an overall factor, so a single
    # common power of t may be divided out before matching exponents mod k
    rho = None
    for c in new:
        if not c:
            continue
        v = (_tval(c.num) - _tval(c.den)) % k
        if rho is None:
            rho = v
        elif v != rho:
            raise ODEError("operator is not invariant under the power substitution")
    return LinearODE([_express_in_power(c, k, rho or 0) for c in new])


def _express_in_power(c: RationalFunction, k: int, rho: int) -> RationalFunction:
    """Rewrite c(t)/t^rho as a rational function of mu = t^k."""
    if not c:
        return c
    num, den = c.num, c.den
    vn = _tval(num)
    vd = _tval(den)
    num = Poly1(num.coeffs[vn:])
    den = Poly1(den.coeffs[vd:])
    shift = vn - vd - rho
    nmu = _poly_in_power(num, k)
    dmu = _poly_in_power(den, k)
    if nmu is None or dmu is None or shift % k != 0:
        raise ODEError("coefficient is not expressible in the power substitution")
    t_mu = RationalFunction(Poly1.t())
    out = RationalFunction(nmu) / RationalFunction(dmu)
    return out * t_mu ** (shift // k)


def _tval(p: Poly1) -> int:
    for i, c in enumerate(p.coeffs):
        if c:
            return i
    return 0


def _poly_in_power(p: Poly1, k: int):
    out = [Fraction(0)] * (p.degree() // k + 1)
    for i, c in enumerate(p.coeffs):
        if not c:
            continue
        if i % k:
            return None
        out[i // k] = c
    return Poly1(out)


def mobius_substitute(e: LinearODE, a, b, c, d) -> LinearODE:
    """Substitute t = (a*u + b)/(c*u + d) (old variable in terms of new)."""
    a, b, c, d = (Fraction(x) if isinstance(x, int) else x for x in (a, b, c, d))
    det = a * d - b * c
    if not det:
        raise ODEError("degenerate Moebius map")
    n = e.order
    u = RationalFunction(Poly1.t())
    phi = (a * u + b) / (c * u + d)
    dphi = phi.derivative()
    # d/dt = (1/phi'(u)) d/du
    rows = [[RationalFunction(1)]]
    for m in range(1, n + 1):
        prev = rows[-1]
        cur = [RationalFunction(0)] * (m + 1)
        inv = RationalFunction(1) / dphi
        # (1/phi') d/du applied to co*D^j = (co'/phi') D^j + (co/phi') D^(j+1)
        for j, co in enumerate(prev):
            cur[j] = cur[j] + inv * co.derivative()
            cur[j + 1] = cur[j + 1] + inv * co
        rows.append(cur)
    new = [RationalFunction(0)] * (n + 1)
    for m, coeff in enumerate(e.coeffs):
        if not coeff:
            continue
        comp = coeff.substitute(phi)
        for j, co in enumerate(rows[m]):
            new[j] = new[j] + comp * co
    return LinearODE(new)


class HypergeometricParams:
    __slots__ = ("alpha", "beta", "gamma")

    def __init__(self, alpha, beta, gamma):
        self.alpha = Fraction(alpha)
        self.beta = Fraction(beta)
        self.gamma = Fraction(gamma)

    def __eq__(self, other):
        if not isinstance(other, HypergeometricParams):
            return NotImplemented
        return (self.alpha, self.beta, self.gamma) == (other.alpha, other.beta, other.gamma)

    def __iter__(self):
        return iter((self.alpha, self.beta, self.gamma))

    def __repr__(self):
        return f"2F1({self.alpha}, {self.beta}, {self.gamma})"

    def irreducible(self):
        a, b, g = self.alpha, self.beta, self.gamma
        return all(x.denominator != 1 for x in (a, b, g - a, g - b))


def recognize_hypergeometric(e: LinearODE):
    """Match z(1-z) f'' + (gamma - (alpha+beta+1) z) f' - alpha*beta f.

    Returns HypergeometricParams or None; requires exact singular points
    {0, 1, infinity} and rational parameters.
    """
    if e.order != 2:
        return None
    a2, a1, a0 = e.coeffs[2], e.coeffs[1], e.coeffs[0]
    if not (a2.is_polynomial() and a1.is_polynomial() and a0.is_polynomial()):
        return None
    p2, p1, p0 = a2.num, a1.num, a0.num
    if p2.degree() != 2 or p1.degree() > 1 or p0.degree() > 0:
        return None
    # a2 must be proportional to z - z^2
    if p2[0] or not p2[2] or p2[1] != -p2[2]:
        return None
    sigma = -p2[2]  # template leading coefficient is -1
    try:
        gamma = _rational(p1[0] / sigma)
        s = _rational(-p1[1] / sigma) - 1     # alpha + beta
        prod = _rational(-p0[0] / sigma)      # alpha * beta
    except (ValueError, TypeError):
        return None
    if gamma is None or s is None or prod is None:
        return None
    disc = s * s - 4 * prod
    root = _fraction_sqrt(disc)
    if root is None:
        return None
    alpha = (s - root) / 2
    beta = (s + root) / 2
    return HypergeometricParams(alpha, beta, gamma)


def _rational(x):
    if isinstance(x, QNum):
        if not x.is_rational():
            return None
        return x.as_fraction()
    return Fraction(x)


def _fraction_sqrt(q: Fraction):
    if q < 0:
        return None
    from math import isqrt

    a = isqrt(q.numerator)
    b = isqrt(q.denominator)
    if a * a == q.numerator and b * b == q.denominator:
        return Fraction(a, b)
    return None


def is_lame(e: LinearODE):
    """Match p f'' + (1/2) p' f' - (n(n+1) z + B) f with p = 4 prod (z - a_i),
    sum a_i = 0.  Returns (n, B, roots) or None."""
    if e.order != 2:
        return None
    a2, a1, a0 = e.coeffs[2], e.coeffs[1], e.coeffs[0]
    if not (a2.is_polynomial() and a1.is_polynomial() and a0.is_polynomial()):
        return None
    p2, p1, p0 = a2.num, a1.num, a0.num
    if p2.degree() != 3 or p0.degree() > 1:
        return None
    if 2 * p1 != p2.derivative():
        return None
    # normalize to the template scale: p2 = s * 4 * prod(z - a_i)
    s = p2.lc() / 4
    if p2[2]:
        return None  # roots must sum to zero
    try:
        roots = roots_exact(p2.monic())
    except NotImplementedError:
        return None
    m = _rational(-p0[1] / s) if p0.degree() >= 1 else Fraction(0)
    B = _rational(-p0[0] / s)
    if m is None or B is None:
        return None
    disc = 1 + 4 * m
    root = _fraction_sqrt(Fraction(disc))
    if root is None:
        return None
    n = (-1 + root) / 2  # branch with n >= -1/2
    return n, B, roots
