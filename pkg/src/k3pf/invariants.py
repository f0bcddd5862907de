"""Finite matrix groups: closure, Molien/Hilbert series, Mukai numbers, and
the quotient-family pipeline with weighted-projective well-forming and the
adjunction K3 test.
"""

from __future__ import annotations

from fractions import Fraction
from math import gcd

from .linalg import ExactMatrix
from .qnum import QNum
from .ratfunc import Poly1


class ClosureError(RuntimeError):
    pass


class MatrixGroupSpec:
    def __init__(self, generators, dimension=None, order_bound=10000, name=""):
        self.generators = [g if isinstance(g, ExactMatrix) else ExactMatrix(g)
                           for g in generators]
        self.dimension = dimension or (self.generators[0].nrows if self.generators else 0)
        self.order_bound = order_bound
        self.name = name
        for g in self.generators:
            if g.nrows != self.dimension or g.ncols != self.dimension:
                raise ValueError("generator dimension mismatch")


class GroupClosure:
    def __init__(self, elements, dimension, name=""):
        self.elements = elements
        self.dimension = dimension
        self.name = name
        self._orders = None
        self._scalars = None

    @property
    def order(self):
        return len(self.elements)

    def element_orders(self):
        if self._orders is None:
            ident = ExactMatrix.identity(self.dimension)
            orders = []
            for g in self.elements:
                k = 1
                p = g
                while not p == ident:
                    p = p * g
                    k += 1
                    if k > 10 * len(self.elements):
                        raise ClosureError("element order runaway; closure inconsistent")
                orders.append(k)
            self._orders = orders
        return self._orders

    def scalar_flags(self):
        """Which elements are scalar multiples of the identity."""
        if self._scalars is None:
            flags = []
            for g in self.elements:
                c = g.rows[0][0]
                ok = True
                for r in range(self.dimension):
                    for s in range(self.dimension):
                        want = c if r == s else 0
                        if not _eq_scalar(g.rows[r][s], want):
                            ok = False
                            break
                    if not ok:
                        break
                flags.append(ok)
            self._scalars = flags
        return self._scalars

    def projective_orders(self):
        """Order of each element modulo the scalar subgroup, one per coset."""
        scalars = [g for g, f in zip(self.elements, self.scalar_flags()) if f]
        seen = set()
        orders = []
        scalset = {g for g in scalars}
        for g in self.elements:
            coset = frozenset(_key(g * s) for s in scalars)
            if coset in seen:
                continue
            seen.add(coset)
            k = 1
            p = g
            while not _is_scalar_matrix(p):
                p = p * g
                k += 1
                if k > 10 * len(self.elements):
                    raise ClosureError("projective order runaway")
            orders.append(k)
        return orders


def _eq_scalar(a, b):
    qa = a if isinstance(a, QNum) else QNum(a)
    qb = b if isinstance(b, QNum) else QNum(b)
    return qa == qb


def _is_scalar_matrix(m: ExactMatrix) -> bool:
    c = m.rows[0][0]
    n = m.nrows
    for r in range(n):
        for s in range(n):
            if not _eq_scalar(m.rows[r][s], c if r == s else 0):
                return False
    return True


def _key(m: ExactMatrix):
    return tuple(tuple(c if isinstance(c, QNum) else QNum(c) for c in row) for row in m.rows)


def close_group(spec: MatrixGroupSpec) -> GroupClosure:
    """Breadth-first closure under products; exact entry comparison."""
    ident = ExactMatrix.identity(spec.dimension)
    seen = {_key(ident): ident}
    frontier = [ident]
    gens = spec.generators
    while frontier:
        nxt = []
        for h in frontier:
            for g in gens:
                p = h * g
                k = _key(p)
                if k not in seen:
                    if len(seen) >= spec.order_bound:
                        raise ClosureError(
                            f"group order exceeds the bound {spec.order_bound}"
                        )
                    seen[k] = p
                    nxt.append(p)
        frontier = nxt
    return GroupClosure(list(seen.values()), spec.dimension, spec.name)


# -- Molien series ---------------------------------------------------------------


class HilbertSeriesForm:
    def __init__(self, coefficients, numerator=None, denominator_exponents=None):
        self.coefficients = list(coefficients)
        self.numerator = numerator                      # Poly1 over Q or None
        self.denominator_exponents = denominator_exponents  # sorted list or None

    def fitted(self):
        return self.numerator is not None

    def __repr__(self):
        if self.fitted():
            den = "".join(f"(1-t^{a})" for a in self.denominator_exponents)
            from .parsing import format_poly1

            return f"({format_poly1(self.numerator, 't')})/{den}"
        return f"HilbertSeries({self.coefficients[:8]}...)"


def molien_series(group: GroupClosure, terms: int = 40, fit=True) -> HilbertSeriesForm:
    """Exact Molien series 1/|G| sum 1/det(I - tA) through degree `terms`.

    Elements sharing a characteristic polynomial share the summand, so the
    per-element work collapses to one series per class.
    """
    classes: dict = {}
    for g in group.elements:
        cp = _det_one_minus_t(g)
        key = tuple(_qkey(c) for c in cp)
        if key in classes:
            classes[key][1] += 1
        else:
            classes[key] = [cp, 1]
    total = [Fraction(0)] * (terms + 1)
    for cp, count in classes.values():
        series = _reciprocal_series(cp, terms)
        for k in range(terms + 1):
            if series[k]:
                total[k] = total[k] + series[k] * count
    order = group.order
    coeffs = []
    for k in range(terms + 1):
        c = total[k] / order if isinstance(total[k], QNum) else Fraction(total[k], order)
        fr = _rationalize(c)
        if fr is None or fr.denominator != 1:
            raise ClosureError(f"Molien coefficient at degree {k} is not an integer: {c}")
        coeffs.append(int(fr))
    form = HilbertSeriesForm(coeffs)
    if fit:
        _fit_rational_form(form)
    return form


def _qkey(c):
    return c if isinstance(c, QNum) else QNum(c)


def _rationalize(c):
    if isinstance(c, QNum):
        if not c.is_rational():
            return None
        return c.as_fraction()
    return Fraction(c)


def _det_one_minus_t(g: ExactMatrix):
    """Coefficients of det(I - t*g) as a list, low degree first."""
    n = g.nrows
    # char poly of g: det(t I - g) = t^n - e1 t^(n-1) + ...; easier: expand
    # det(I - t g) via Leibniz for n <= 4
    idx = range(n)
    from itertools import permutations

    coeffs = [Fraction(0)] * (n + 1)
    for perm in permutations(idx):
        sign = _perm_sign(perm)
        # product over rows of (delta - t g): entry (i, perm[i])
        # contributes delta_{i,p(i)} - t g[i][p(i)]; expand the product as a
        # polynomial in t
        poly = [Fraction(1)]
        for i in idx:
            j = perm[i]
            const = Fraction(1) if i == j else Fraction(0)
            lin = -(g.rows[i][j])
            nxt = [Fraction(0)] * (len(poly) + 1)
            for d, c in enumerate(poly):
                if _truthy(c):
                    if _truthy(const):
                        nxt[d] += c * const
                    if _truthy(lin):
                        nxt[d + 1] += c * lin
            poly = nxt
        for d, c in enumerate(poly):
            if d <= n and _truthy(c):
                coeffs[d] += sign * c
    return coeffs


def _truthy(c):
    return bool(c)


def _perm_sign(perm):
    sign = 1
    seen = [False] * len(perm)
    for i in range(len(perm)):
        if seen[i]:
            continue
        j = i
        length = 0
        while not seen[j]:
            seen[j] = True
            j = perm[j]
            length += 1
        if length % 2 == 0:
            sign = -sign
    return sign


def _reciprocal_series(den_coeffs, terms: int):
    """Series of 1/p(t) with p(0) != 0, through `terms`."""
    c0 = den_coeffs[0]
    inv0 = c0.inverse() if isinstance(c0, QNum) else Fraction(1) / Fraction(c0)
    out = [inv0]
    for k in range(1, terms + 1):
        acc = None
        for j in range(1, min(k, len(den_coeffs) - 1) + 1):
            cj = den_coeffs[j]
            if cj:
                term = cj * out[k - j]
                acc = term if acc is None else acc + term
        out.append(Fraction(0) if acc is None or not acc else -(inv0 * acc))
    return out


def _fit_rational_form(form: HilbertSeriesForm, max_factors=None):
    """Greedy rational-form fit: repeatedly multiply by (1 - t^a) where a is
    the degree of the first positive coefficient, until the remainder has a
    stable zero tail or turns negative-first (then it is the numerator)."""
    coeffs = list(form.coefficients)
    terms = len(coeffs) - 1
    exponents = []
    cur = list(coeffs)

    def first_nonzero(c):
        for d in range(1, len(c)):
            if c[d]:
                return d
        return None

    budget = terms
    while budget > 0:
        d = first_nonzero(cur)
        if d is None:
            break
        if cur[d] < 0:
            break
        # multiply by (1 - t^d)
        nxt = cur[:]
        for k in range(d, terms + 1):
            nxt[k] = cur[k] - cur[k - d]
        exponents.append(d)
        cur = nxt
        budget -= 1
    tail_start = None
    if first_nonzero(cur) is None and cur[0] == 1 and not exponents:
        form.numerator = Poly1([Fraction(1)])
        form.denominator_exponents = []
        return
    # the remainder must vanish identically beyond some degree well inside the
    # truncation for the fit to be trusted
    last = max((d for d in range(terms + 1) if cur[d]), default=0)
    if exponents and last <= terms - max(exponents):
        form.numerator = Poly1([Fraction(c) for c in cur[: last + 1]])
        form.denominator_exponents = sorted(exponents)


def regenerate_series(numerator: Poly1, denominator_exponents, terms: int):
    """Series of numerator / prod (1 - t^a); for fit validation."""
    den = Poly1([Fraction(1)])
    for a in denominator_exponents:
        f = [Fraction(0)] * (a + 1)
        f[0] = Fraction(1)
        f[a] = Fraction(-1)
        den = den * Poly1(f)
    out = []
    prev = [Fraction(0)] * (terms + 1)
    for k in range(terms + 1):
        acc = numerator[k] if k <= numerator.degree() else Fraction(0)
        for j in range(1, min(k, den.degree()) + 1):
            acc -= den[j] * prev[k - j]
        prev[k] = acc / den[0]
        out.append(prev[k])
    return out


# -- Mukai numbers ----------------------------------------------------------------


def mukai_order_weight(n: int) -> Fraction:
    """mu(n) = 24 / (n * prod_{p | n} (1 + 1/p))."""
    acc = Fraction(24, n)
    m = n
    p = 2
    while p * p <= m:
        if m % p == 0:
            acc /= (1 + Fraction(1, p))
            while m % p == 0:
                m //= p
        p += 1
    if m > 1:
        acc /= (1 + Fraction(1, m))
    return acc


def mukai_number(group: GroupClosure, projective=False) -> Fraction:
    """mu(G) = (1/|G|) sum_g mu(ord g); orders mod scalars when projective."""
    if projective:
        orders = group.projective_orders()
    else:
        orders = group.element_orders()
    total = sum((mukai_order_weight(n) for n in orders), Fraction(0))
    return total / len(orders)


# -- weighted complete intersections ------------------------------------------------


class WeightedCI:
    def __init__(self, weights, degrees, quasismooth=True, note=""):
        self.weights = tuple(int(w) for w in weights)
        self.degrees = tuple(int(d) for d in degrees)
        if any(w <= 0 for w in self.weights) or any(d <= 0 for d in self.degrees):
            raise ValueError("weights and degrees must be positive")
        self.quasismooth = quasismooth
        self.note = note

    def __eq__(self, other):
        if not isinstance(other, WeightedCI):
            return NotImplemented
        return (sorted(self.weights), sorted(self.degrees)) == (
            sorted(other.weights), sorted(other.degrees)
        )

    def __repr__(self):
        d = ",".join(str(x) for x in self.degrees)
        w = ",".join(str(x) for x in self.weights)
        return f"X_({d}) in P({w})"

    def is_well_formed_space(self) -> bool:
        n = len(self.weights)
        if n < 2:
            return True
        for skip in range(n):
            g = 0
            for i, w in enumerate(self.weights):
                if i != skip:
                    g = gcd(g, w)
            if g > 1:
                return False
        return True

    def ci_divisibility_report(self):
        """The hypersurface/codim-2 divisibility conditions for well-formed
        subvarieties; returns list of (description, ok)."""
        out = []
        n = len(self.weights)
        if len(self.degrees) == 1:
            d = self.degrees[0]
            for i in range(n):
                for j in range(i + 1, n):
                    g = 0
                    for t, w in enumerate(self.weights):
                        if t not in (i, j):
                            g = gcd(g, w)
                    out.append((f"hcf(weights - {{{i},{j}}}) = {g} | {d}", d % (g or 1) == 0))
        elif len(self.degrees) == 2:
            d1, d2 = self.degrees
            import itertools

            for omit in itertools.combinations(range(n), 3):
                g = 0
                for t, w in enumerate(self.weights):
                    if t not in omit:
                        g = gcd(g, w)
                ok = g <= 1 or (d1 % g == 0 or d2 % g == 0)
                out.append((f"hcf(weights - {set(omit)}) = {g} | d1 or d2", ok))
            for omit in itertools.combinations(range(n), 2):
                g = 0
                for t, w in enumerate(self.weights):
                    if t not in omit:
                        g = gcd(g, w)
                ok = g <= 1 or (d1 % g == 0 or d2 % g == 0)
                out.append((f"hcf(weights - {set(omit)}) = {g} | d1 or d2", ok))
        return out


def well_form(ci: WeightedCI) -> WeightedCI:
    """Reduce to a well-formed representative: divide common weight factors,
    then apply the truncation isomorphism while n of n+1 weights share one."""
    weights = list(ci.weights)
    degrees = list(ci.degrees)
    note = ci.note
    changed = True
    while changed:
        changed = False
        g = 0
        for w in weights:
            g = gcd(g, w)
        if g > 1:
            if any(d % g for d in degrees):
                note += f" [stuck: common weight factor {g} does not divide degrees]"
                return WeightedCI(weights, degrees, ci.quasismooth, note)
            weights = [w // g for w in weights]
            degrees = [d // g for d in degrees]
            changed = True
            continue
        n = len(weights)
        for skip in range(n):
            g = 0
            for i, w in enumerate(weights):
                if i != skip:
                    g = gcd(g, w)
            if g > 1:
                p = _smallest_prime_factor(g)
                if any(d % p for d in degrees):
                    note += f" [stuck: truncation factor {p} does not divide degrees]"
                    return WeightedCI(weights, degrees, ci.quasismooth, note)
                # multiply the remaining weight by p, divide everything by p
                weights = [
                    w // p if i != skip else w for i, w in enumerate(weights)
                ]
                degrees = [d // p for d in degrees]
                changed = True
                break
    return WeightedCI(weights, degrees, ci.quasismooth, note)


def _smallest_prime_factor(n: int) -> int:
    d = 2
    while d * d <= n:
        if n % d == 0:
            return d
        d += 1
    return n


class K3Verdict:
    def __init__(self, is_k3, ci: WeightedCI, canonical_degree: int, report=None):
        self.is_k3 = is_k3
        self.ci = ci
        self.canonical_degree = canonical_degree
        self.report = report or []

    def __repr__(self):
        if self.is_k3:
            return f"K3: yes, {self.ci}"
        return f"K3: no, {self.ci} with canonical degree {self.canonical_degree}"


def is_k3(ci: WeightedCI) -> K3Verdict:
    """Adjunction: omega = O(sum d - sum a); K3 (with DuVal) iff it vanishes."""
    wf = well_form(ci)
    kdeg = sum(wf.degrees) - sum(wf.weights)
    report = wf.ci_divisibility_report()
    return K3Verdict(kdeg == 0, wf, kdeg, report)


def quotient_pipeline(invariant_degrees, relation_degrees, family_degree) -> K3Verdict:
    """The quotient-of-invariant-family computation:

    ambient P(invariant degrees) cut by the relations; the family equation in
    degree d removes one degree-d generator (graph substitution); the result
    must be a complete intersection of dimension 2, then well-form + adjunct.
    """
    inv = sorted(invariant_degrees)
    rel = sorted(relation_degrees)
    d = int(family_degree)
    if d not in inv:
        raise ValueError(
            f"family degree {d} is not among the invariant degrees {inv}; "
            "the graph substitution needs a generator of that degree"
        )
    weights = list(inv)
    weights.remove(d)
    degrees = list(rel)
    dim = (len(weights) - 1) - len(degrees)
    if dim != 2:
        ci = WeightedCI(weights, degrees or [1])
        v = K3Verdict(False, ci, 10 ** 9)
        v.report = [(f"not a surface complete intersection: dimension {dim}", False)]
        v.not_applicable = True
        return v
    ci = WeightedCI(weights, degrees)
    verdict = is_k3(ci)
    verdict.not_applicable = False
    return verdict
