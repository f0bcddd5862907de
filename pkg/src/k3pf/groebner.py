"""Buchberger's algorithm over the field Q~(lambda) with cofactor tracking.

The coefficient field is the rational-function field of the parameter (over Q
or a multiquadratic extension); monomials range over the geometric variables
only.  Every basis element carries its expression in terms of the original
generators, so ideal membership comes back with an exact certificate that the
caller re-expands and verifies.
"""

from __future__ import annotations

from fractions import Fraction

from .multipoly import MultiPoly
from .ratfunc import Poly1, RationalFunction


class MonomialOrder:
    """Graded reverse lexicographic order on exponent tuples (the default)."""

    kind = "grevlex"

    @staticmethod
    def key(expo):
        return (sum(expo), tuple(-e for e in reversed(expo)))

    @classmethod
    def compare(cls, a, b):
        ka, kb = cls.key(a), cls.key(b)
        return (ka > kb) - (ka < kb)


GREVLEX = MonomialOrder()


def _divides(a, b):
    return all(x <= y for x, y in zip(a, b))


def _mono_div(b, a):
    return tuple(y - x for x, y in zip(a, b))


def _mono_mul(a, b):
    return tuple(x + y for x, y in zip(a, b))


def _mono_lcm(a, b):
    return tuple(max(x, y) for x, y in zip(a, b))


class GPoly:
    """Polynomial in the x-variables with RationalFunction(lambda) coefficients."""

    __slots__ = ("terms",)

    def __init__(self, terms):
        self.terms = {e: c for e, c in terms.items() if c}

    def is_zero(self):
        return not self.terms

    def __bool__(self):
        return bool(self.terms)

    def lead(self, order=GREVLEX):
        return max(self.terms, key=order.key)

    def __add__(self, other):
        out = dict(self.terms)
        for e, c in other.terms.items():
            s = out.get(e)
            s = c if s is None else s + c
            if s:
                out[e] = s
            else:
                out.pop(e, None)
        return GPoly(out)

    def __sub__(self, other):
        out = dict(self.terms)
        for e, c in other.terms.items():
            s = out.get(e)
            s = -c if s is None else s - c
            if s:
                out[e] = s
            else:
                out.pop(e, None)
        return GPoly(out)

    def __neg__(self):
        return GPoly({e: -c for e, c in self.terms.items()})

    def scale(self, c):
        if not c:
            return GPoly({})
        return GPoly({e: x * c for e, x in self.terms.items()})

    def mul_term(self, mono, c):
        if not c:
            return GPoly({})
        return GPoly({_mono_mul(e, mono): x * c for e, x in self.terms.items()})

    def mul(self, other):
        out = {}
        for e1, c1 in self.terms.items():
            for e2, c2 in other.terms.items():
                e = _mono_mul(e1, e2)
                s = out.get(e)
                s = c1 * c2 if s is None else s + c1 * c2
                if s:
                    out[e] = s
                else:
                    out.pop(e, None)
        return GPoly(out)

    def __eq__(self, other):
        if not isinstance(other, GPoly):
            return NotImplemented
        return not (self - other)


def from_multipoly(p: MultiPoly) -> GPoly:
    """Split off the parameter exponent into the coefficient field."""
    if p.param is None:
        terms = {}
        for e, c in p.terms.items():
            terms[e] = terms.get(e, RationalFunction(0)) + RationalFunction(Poly1.const(c))
        return GPoly(terms)
    li = p.vars.index(p.param)
    terms: dict = {}
    for e, c in p.terms.items():
        k = e[li]
        xe = tuple(v for i, v in enumerate(e) if i != li)
        coeffs = [Fraction(0)] * k + [c]
        rf = RationalFunction(Poly1(coeffs))
        terms[xe] = terms.get(xe, RationalFunction(0)) + rf
    return GPoly(terms)


def to_multipoly(g: GPoly, variables, param="lambda") -> MultiPoly:
    """Rebuild a MultiPoly (requires polynomial coefficients)."""
    variables = tuple(variables)
    li = variables.index(param)
    out = {}
    for xe, rf in g.terms.items():
        if not rf.is_polynomial():
            raise ValueError("coefficient has a lambda-denominator")
        poly = rf.num * (Fraction(1) / rf.den.lc() if rf.den.degree() == 0 else 1)
        for k, c in enumerate(poly.coeffs):
            if not c:
                continue
            e = list(xe)
            e.insert(li, k)
            out[tuple(e)] = c
    return MultiPoly(variables, out, param)


class CertifiedBasis:
    """Reduced Groebner basis with an exact change-of-basis certificate."""

    def __init__(self, generators, basis, cofactors, order=GREVLEX, nvars=None):
        self.generators = generators          # list[GPoly]
        self.basis = basis                    # list[GPoly], monic, reduced
        self.cofactors = cofactors            # cofactors[i][j]: basis[i] = sum_j cof[i][j]*gen[j]
        self.order = order
        self.nvars = nvars

    def verify(self) -> bool:
        for b, cof in zip(self.basis, self.cofactors):
            acc = GPoly({})
            for c, g in zip(cof, self.generators):
                acc = acc + g.mul(c)
            if acc - b:
                return False
        return True


def _reduce_full(f: GPoly, fcof, basis, basis_cofs, order=GREVLEX):
    """Fully reduce f modulo the basis, tracking f = (reduced) + sum cof*gen."""
    work = GPoly(dict(f.terms))
    remainder: dict = {}
    leads = [(b.lead(order), b) for b in basis]
    while work:
        lt = work.lead(order)
        hit = None
        for i, (lm, b) in enumerate(leads):
            if _divides(lm, lt):
                hit = i
                break
        if hit is None:
            remainder[lt] = work.terms.pop(lt)
            work = GPoly(work.terms)
            continue
        lm, b = leads[hit]
        c = work.terms[lt] / b.terms[lm]
        mono = _mono_div(lt, lm)
        work = work - b.mul_term(mono, c)
        if basis_cofs is not None:
            for j, bc in enumerate(basis_cofs[hit]):
                fcof[j] = fcof[j] - bc.mul_term(mono, c)
    return GPoly(remainder), fcof


def _spair(f, g, order=GREVLEX):
    lf, lg = f.lead(order), g.lead(order)
    lcm = _mono_lcm(lf, lg)
    cf = f.terms[lf]
    cg = g.terms[lg]
    mf = _mono_div(lcm, lf)
    mg = _mono_div(lcm, lg)
    return mf, cf, mg, cg, lcm


def buchberger(gens, order=GREVLEX) -> CertifiedBasis:
    """Reduced Groebner basis with cofactors via classic Buchberger.

    `gens` may be MultiPoly (parameter split automatically) or GPoly.
    """
    gpolys = [from_multipoly(g) if isinstance(g, MultiPoly) else g for g in gens]
    gpolys = [g for g in gpolys]
    if not gpolys or all(g.is_zero() for g in gpolys):
        raise ValueError("buchberger needs at least one nonzero generator")
    m = len(gpolys)
    zero = GPoly({})
    one = RationalFunction(1)

    basis = []
    cofs = []
    for j, g in enumerate(gpolys):
        if g.is_zero():
            continue
        unit = [zero] * m
        unit[j] = GPoly({tuple([0] * _arity(g)): one})
        # make monic immediately
        lc = g.terms[g.lead(order)]
        inv = one / lc
        basis.append(g.scale(inv))
        cofs.append([u.scale(inv) if u else u for u in unit])

    pairs = {(i, j) for i in range(len(basis)) for j in range(i + 1, len(basis))}
    while pairs:
        # normal selection: smallest lcm degree first
        i, j = min(
            pairs,
            key=lambda ij: order.key(
                _mono_lcm(basis[ij[0]].lead(order), basis[ij[1]].lead(order))
            ),
        )
        pairs.discard((i, j))
        fi, fj = basis[i], basis[j]
        li, lj = fi.lead(order), fj.lead(order)
        lcm = _mono_lcm(li, lj)
        if _mono_mul(li, lj) == lcm:
            continue  # coprime leading monomials reduce to zero
        # chain criterion
        skip = False
        for k in range(len(basis)):
            if k in (i, j):
                continue
            lk = basis[k].lead(order)
            if _divides(lk, lcm):
                a, b = (min(i, k), max(i, k)), (min(j, k), max(j, k))
                if a not in pairs and b not in pairs:
                    skip = True
                    break
        if skip:
            continue
        mi, ci, mj, cj, _ = _spair(fi, fj, order)
        s = fi.mul_term(mi, one) - fj.mul_term(mj, one)  # both monic
        scof = [
            cofs[i][t].mul_term(mi, one) - cofs[j][t].mul_term(mj, one)
            for t in range(m)
        ]
        red, scof = _reduce_full(s, scof, basis, cofs, order)
        if red.is_zero():
            continue
        lc = red.terms[red.lead(order)]
        inv = one / lc
        red = red.scale(inv)
        scof = [c.scale(inv) for c in scof]
        basis.append(red)
        cofs.append(scof)
        new = len(basis) - 1
        pairs.update((t, new) for t in range(new))

    # minimize: drop elements whose lead is divisible by another lead
    keep = []
    for idx, b in enumerate(basis):
        lm = b.lead(order)
        if any(
            _divides(basis[k].lead(order), lm) and k != idx
            for k in range(len(basis))
            if (k in keep or k > idx)
        ):
            continue
        keep.append(idx)
    basis = [basis[k] for k in keep]
    cofs = [cofs[k] for k in keep]

    # inter-reduce tails
    reduced = []
    reduced_cofs = []
    for idx in range(len(basis)):
        others = basis[:idx] + basis[idx + 1:]
        ocofs = cofs[:idx] + cofs[idx + 1:]
        red, rcof = _reduce_full(basis[idx], list(cofs[idx]), others, ocofs, order)
        lc = red.terms[red.lead(order)]
        inv = one / lc
        reduced.append(red.scale(inv))
        reduced_cofs.append([c.scale(inv) for c in rcof])
    # deterministic ordering by leading monomial
    perm = sorted(range(len(reduced)), key=lambda k: order.key(reduced[k].lead(order)))
    reduced = [reduced[k] for k in perm]
    reduced_cofs = [reduced_cofs[k] for k in perm]

    cb = CertifiedBasis(gpolys, reduced, reduced_cofs, order)
    if not cb.verify():
        raise AssertionError("cofactor re-expansion failed; Groebner bug")
    return cb


def _arity(g: GPoly) -> int:
    return len(next(iter(g.terms)))


def normal_form(f, basis: CertifiedBasis):
    """Normal form of f (MultiPoly or GPoly) modulo the certified basis."""
    g = from_multipoly(f) if isinstance(f, MultiPoly) else f
    red, _ = _reduce_full(g, None, basis.basis, None, basis.order)
    return red


def membership_with_cofactors(f, basis: CertifiedBasis):
    """If f lies in the ideal, return cofactors A with f = sum A_j * gen_j.

    Returns (cofactors, None) on success and (None, normal_form) otherwise.
    The certificate is re-expanded and checked exactly before returning.
    """
    g = from_multipoly(f) if isinstance(f, MultiPoly) else f
    m = len(basis.generators)
    zero = GPoly({})
    fcof = [zero] * m
    red, fcof = _reduce_full(g, fcof, basis.basis, basis.cofactors, basis.order)
    if red:
        return None, red
    cof = [(-c if c else c) for c in fcof]
    acc = GPoly({})
    for c, gen in zip(cof, basis.generators):
        acc = acc + gen.mul(c)
    if acc - g:
        raise AssertionError("membership certificate failed exact re-expansion")
    return cof, None
