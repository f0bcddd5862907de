"""Picard-Fuchs equations of one-parameter hypersurface families by iterated
pole reduction against the Jacobian ideal.

The reduction identity (pole order l+1 down to l, weighted case included):

    l * sum_j A_j dQ/dx_j / Q^(l+1) * Omega  ==  sum_j dA_j/dx_j / Q^l * Omega

modulo exact forms.  Derivatives of the fundamental ratio read
d^r/dlambda^r (Omega/Q) = (-1)^r r! q^r Omega / Q^(r+1) with q = dQ/dlambda,
valid because every family here is linear in the parameter.  Ideal membership
runs over the coefficient field Q~(lambda), where the discriminant prefactor
is a unit; denominators are cleared from the final coefficient vector, which
reproduces the discriminant normalization of the printed operators.
"""

from __future__ import annotations

from fractions import Fraction
from math import factorial, gcd, lcm

from .groebner import (
    GPoly,
    buchberger,
    from_multipoly,
    membership_with_cofactors,
)
from .multipoly import MultiPoly
from .qnum import QNum
from .ratfunc import Poly1, RationalFunction


class PFError(RuntimeError):
    pass


class FamilySpec:
    """A one-parameter family of hypersurfaces in weighted projective space."""

    def __init__(self, weights, poly: MultiPoly, name="", degeneration=None,
                 power_k=1, mobius=None, mobius_after_power=None):
        self.weights = tuple(int(w) for w in weights)
        self.poly = poly
        self.name = name
        self.degeneration = degeneration or []
        self.power_k = power_k
        self.mobius = mobius
        self.mobius_after_power = mobius_after_power
        if poly.param is None:
            raise ValueError("family polynomial must involve the parameter")
        self.xvars = tuple(v for v in poly.vars if v != poly.param)
        if len(self.xvars) != len(self.weights):
            raise ValueError("weight count does not match variable count")
        if poly.degree_in(poly.param) > 1:
            raise PFError("family must be linear in the parameter")
        xw = {v: w for v, w in zip(self.xvars, self.weights)}
        wvec = [xw.get(v, 0) for v in poly.vars]
        if not poly.is_weighted_homogeneous(wvec):
            raise ValueError("defining polynomial is not weighted homogeneous")
        self.degree = poly.weighted_degree(wvec)
        if self.degree != sum(self.weights):
            raise ValueError(
                "hypersurface degree must equal the weight sum (K3 condition)"
            )

    def jacobian_generators(self):
        return [self.poly.partial(v) for v in self.xvars]

    def parameter_derivative(self):
        return self.poly.partial(self.poly.param)


class PFResult:
    """Order-k operator sum c_r d^r/dlambda^r with certified reduction chain."""

    def __init__(self, order, coeffs, relative_coeffs, steps, family):
        self.order = order
        self.coeffs = coeffs                  # list[Poly1], c_k ... c_0, normalized
        self.relative_coeffs = relative_coeffs  # list[RationalFunction], c_k = 1
        self.steps = steps                    # per reduction step: list of GPoly cofactors
        self.family = family

    def coefficient(self, r):
        """c_r for d^r/dlambda^r."""
        return self.coeffs[self.order - r]

    def to_ode(self):
        from .ode import LinearODE

        return LinearODE([RationalFunction(c) for c in reversed(self.coeffs)])

    def __repr__(self):
        from .parsing import format_poly1

        parts = []
        for idx, c in enumerate(self.coeffs):
            r = self.order - idx
            d = f"D^{r}" if r > 1 else ("D" if r == 1 else "")
            body = format_poly1(c)
            parts.append(f"({body})*{d}" if d else f"({body})")
        return " + ".join(parts)


def _gpoly_partial(g: GPoly, index: int) -> GPoly:
    out = {}
    for e, c in g.terms.items():
        k = e[index]
        if not k:
            continue
        ne = list(e)
        ne[index] -= 1
        ne = tuple(ne)
        add = c * k
        s = out.get(ne)
        s = add if s is None else s + add
        if s:
            out[ne] = s
        else:
            out.pop(ne, None)
    return GPoly(out)


def _check_homogeneous(g: GPoly, weights, expected, what):
    for e in g.terms:
        d = sum(w * k for w, k in zip(weights, e))
        if d != expected:
            raise PFError(f"{what}: cofactor not weighted homogeneous of degree {expected}")


def picard_fuchs(fam: FamilySpec, expected_order: int) -> PFResult:
    """Compute the Picard-Fuchs operator of the family at the stated order."""
    if expected_order < 1:
        raise ValueError("expected_order must be >= 1")
    k = expected_order
    q_mp = fam.parameter_derivative()
    if q_mp.is_zero():
        raise PFError("constant family: dQ/dlambda = 0")
    gens_mp = fam.jacobian_generators()
    nx = len(fam.xvars)
    d = fam.degree
    wsum = sum(fam.weights)

    def qpow(e):
        return from_multipoly(q_mp ** e)

    one = RationalFunction(1)
    mu = [Fraction((-1) ** r * factorial(r)) for r in range(k + 1)]

    rel = [None] * (k + 1)  # rel[r] = c_r relative to c_k = 1, as RationalFunction
    rel[k] = one
    steps = []

    # top step: membership of mu_k q^k in the Jacobian ideal
    base = buchberger(gens_mp)
    S = qpow(k).scale(RationalFunction(mu[k]))
    cof, nf = membership_with_cofactors(S, base)
    if cof is None:
        raise PFError(
            f"q^{k} is not in the Jacobian ideal over the coefficient field; "
            f"expected order {k} is too low (residual has {len(nf.terms)} terms)"
        )
    A = cof
    for j, a in enumerate(A):
        _check_homogeneous(a, fam.weights, k * d + fam.weights[j] - wsum, fam.name or "family")
    steps.append({"pole": k + 1, "cofactors": A, "extra": None})

    for l in range(k + 1, 1, -1):
        if l < k + 1:
            e = l - 1
            ext_gens = gens_mp + [(-1) ** e * (q_mp ** e)]
            ext = buchberger(ext_gens)
            cof, nf = membership_with_cofactors(S, ext)
            if cof is None:
                raise PFError(f"reduction failed at pole order {l}; residual nonzero")
            A = cof[:nx]
            ctil = cof[nx]
            # the K3 degree condition forces the q-power cofactor to be scalar
            if any(sum(expo) for expo in ctil.terms):
                raise PFError("q-power cofactor is not constant in x")
            ctil_val = next(iter(ctil.terms.values()), RationalFunction(0))
            # S = sum A_j dQ/dx_j + ctil*(-q)^e and c_e*mu_e = -ctil*(-1)^e
            rel[e] = RationalFunction(0) - ctil_val / RationalFunction(Fraction(factorial(e)))
            for j, a in enumerate(A):
                _check_homogeneous(a, fam.weights, e * d + fam.weights[j] - wsum,
                                   fam.name or "family")
            steps.append({"pole": l, "cofactors": A, "extra": ctil_val})
        # descend: S_{l-1} = sum_j dA_j/dx_j / (l-1)
        div = GPoly({})
        for j in range(nx):
            div = div + _gpoly_partial(A[j], j)
        S = div.scale(one / RationalFunction(Fraction(l - 1)))

    # S now sits at pole order 1; c_0 = -S and must not involve x
    if any(sum(expo) for expo in S.terms):
        raise PFError("final residual depends on the geometric variables")
    c0 = RationalFunction(0) - next(iter(S.terms.values()), RationalFunction(0))
    rel[0] = c0
    for r in range(k - 1, 0, -1):
        if rel[r] is None:
            rel[r] = RationalFunction(0)

    coeffs = _normalize(rel)
    return PFResult(k, coeffs, rel, steps, fam)


def _normalize(rel):
    """Clear lambda-denominators and content from [c_k..c_0] (high order first)."""
    ordered = list(reversed(rel))  # c_k ... c_0
    denoms = Poly1.const(1)
    for c in ordered:
        g = denoms.gcd(c.den)
        denoms = denoms * (c.den.divmod(g)[0] if g.degree() > 0 else c.den)
    cleared = [c.num * (denoms.divmod(c.den)[0]) for c in ordered]
    # rationality: the printed operators are over Q even for families with
    # irrational defining coefficients
    def as_fr(x):
        if isinstance(x, QNum):
            if not x.is_rational():
                return None
            return x.as_fraction()
        return Fraction(x)

    allfr = []
    for p in cleared:
        row = [as_fr(c) for c in p.coeffs]
        if any(c is None for c in row):
            lead = cleared[0].lc()
            inv = lead.inverse() if isinstance(lead, QNum) else Fraction(1) / lead
            return [p * inv for p in cleared]
        allfr.append(row)
    den = 1
    for row in allfr:
        for c in row:
            den = lcm(den, c.denominator)
    g = 0
    for row in allfr:
        for c in row:
            g = gcd(g, abs(int(c * den)))
    g = g or 1
    top = allfr[0]
    lead_sign = -1 if top and top[-1] < 0 else 1
    scale = Fraction(den * lead_sign, g)
    return [Poly1([c * scale for c in row]) for row in allfr]


def verify_pf(fam: FamilySpec, pf: PFResult) -> bool:
    """Re-run the certified reduction chain and confirm the final residual."""
    try:
        q_mp = fam.parameter_derivative()
        gens = [from_multipoly(g) for g in fam.jacobian_generators()]
        q = from_multipoly(q_mp)
        k = pf.order
        one = RationalFunction(1)
        mu = [Fraction((-1) ** r * factorial(r)) for r in range(k + 1)]

        def qpow(e):
            acc = GPoly({tuple([0] * len(fam.xvars)): one})
            for _ in range(e):
                acc = acc.mul(q)
            return acc

        rel = pf.relative_coeffs
        if rel[k] != one:
            return False
        S = qpow(k).scale(RationalFunction(mu[k]))
        nx = len(fam.xvars)
        step_iter = iter(pf.steps)
        for l in range(k + 1, 1, -1):
            step = next(step_iter)
            A = step["cofactors"]
            expect = GPoly({})
            for j in range(nx):
                expect = expect + gens[j].mul(A[j])
            if step["extra"] is not None:
                e = l - 1
                sign = Fraction((-1) ** e)
                expect = expect + qpow(e).scale(step["extra"] * RationalFunction(sign))
            if expect - S:
                return False
            if step["extra"] is not None:
                e = l - 1
                want = RationalFunction(0) - step["extra"] / RationalFunction(Fraction(factorial(e)))
                if rel[e] != want:
                    return False
            div = GPoly({})
            for j in range(nx):
                div = div + _gpoly_partial(A[j], j)
            S = div.scale(one / RationalFunction(Fraction(l - 1)))
        if any(sum(expo) for expo in S.terms):
            return False
        c0 = RationalFunction(0) - next(iter(S.terms.values()), RationalFunction(0))
        if rel[0] != c0:
            return False
        # the published coefficient vector must be proportional to the chain
        return proportional(pf.coeffs, rel)
    except (PFError, ValueError, ZeroDivisionError):
        return False


def proportional(coeffs, rel) -> bool:
    """Is the polynomial vector proportional to the relative (field) vector?"""
    pairs = []
    for p, c in zip(coeffs, reversed(rel)):
        pairs.append((RationalFunction(p), c))
    ratio = None
    for a, b in pairs:
        if bool(a) != bool(b):
            return False
        if a:
            r = a / b
            if ratio is None:
                ratio = r
            elif r != ratio:
                return False
    return ratio is not None
