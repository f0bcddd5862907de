"""Finite rotation groups of R^4 from pairs of unit quaternions.

SO(4) is covered by SU(2) x SU(2): a pair (p, q) of unit quaternions acts on
x in R^4 = H by x -> p x q-bar, and (p, q), (-p, -q) give the same rotation.
Feeding the binary tetrahedral / octahedral / icosahedral groups through this
construction yields the product rotation groups whose Hilbert series the
quotient pipeline consumes; all matrix entries stay in Q, Q(sqrt 2) or
Q(sqrt 5), so the closure and Molien sums are exact.
"""

from __future__ import annotations

from fractions import Fraction

from .linalg import ExactMatrix
from .qnum import QNum


def _q(x):
    return x if isinstance(x, QNum) else QNum(Fraction(x))


def left_mult_matrix(p) -> ExactMatrix:
    """Matrix of x -> p*x on coordinates (1, i, j, k)."""
    a, b, c, d = (_q(t) for t in p)
    return ExactMatrix(
        [
            [a, -b, -c, -d],
            [b, a, -d, c],
            [c, d, a, -b],
            [d, -c, b, a],
        ]
    )


def right_mult_matrix(p) -> ExactMatrix:
    """Matrix of x -> x*p on coordinates (1, i, j, k)."""
    a, b, c, d = (_q(t) for t in p)
    return ExactMatrix(
        [
            [a, -b, -c, -d],
            [b, a, d, -c],
            [c, -d, a, b],
            [d, c, -b, a],
        ]
    )


def conjugate_quaternion(p):
    a, b, c, d = p
    return (a, -b, -c, -d)


def rotation_matrix(p, q) -> ExactMatrix:
    """x -> p x q-bar."""
    return left_mult_matrix(p) * right_mult_matrix(conjugate_quaternion(q))


HALF = Fraction(1, 2)

# binary tetrahedral group generators: i and (1+i+j+k)/2
BINARY_TETRAHEDRAL = (
    (Fraction(0), Fraction(1), Fraction(0), Fraction(0)),
    (HALF, HALF, HALF, HALF),
)


def _sqrt2_half():
    return QNum.sqrt_int(2) * Fraction(1, 2)


def binary_octahedral_generators():
    """2T plus the eighth-root element (1+i)/sqrt(2)."""
    r = _sqrt2_half()
    return list(BINARY_TETRAHEDRAL) + [(r, r, QNum(0), QNum(0))]


def binary_icosahedral_generators():
    """(1+i+j+k)/2 and (phi^-1 + phi j + k)/2 with phi the golden ratio."""
    s5 = QNum.sqrt_int(5)
    phi = (1 + s5) * HALF
    phinv = (s5 - 1) * HALF
    return [
        (QNum(HALF), QNum(HALF), QNum(HALF), QNum(HALF)),
        (QNum(0), QNum(HALF), phi * HALF, phinv * HALF),
    ]


def product_group_generators(kind: str):
    """SO(4) generators of the A4xA4 / S4xS4 / A5xA5 rotation groups."""
    gens = _binary_generators(kind)
    one = (Fraction(1), Fraction(0), Fraction(0), Fraction(0))
    out = []
    for g in gens:
        out.append(rotation_matrix(g, one))
        out.append(rotation_matrix(one, g))
    return out


def _binary_generators(kind: str):
    table = {
        "A4xA4": list(BINARY_TETRAHEDRAL),
        "S4xS4": binary_octahedral_generators(),
        "A5xA5": binary_icosahedral_generators(),
    }
    if kind not in table:
        raise ValueError(f"unknown product group {kind!r}")
    return table[kind]


def quaternion_mult(p, q):
    a1, b1, c1, d1 = p
    a2, b2, c2, d2 = q
    return (
        a1 * a2 - b1 * b2 - c1 * c2 - d1 * d2,
        a1 * b2 + b1 * a2 + c1 * d2 - d1 * c2,
        a1 * c2 - b1 * d2 + c1 * a2 + d1 * b2,
        a1 * d2 + b1 * c2 - c1 * b2 + d1 * a2,
    )


def close_quaternion_group(generators):
    """BFS closure of a finite unit-quaternion group (cheap exact hashing)."""
    one = (QNum(1), QNum(0), QNum(0), QNum(0))
    gens = [tuple(_q(t) for t in g) for g in generators]
    seen = {one: one}
    frontier = [one]
    while frontier:
        nxt = []
        for h in frontier:
            for g in gens:
                p = quaternion_mult(h, g)
                if p not in seen:
                    seen[p] = p
                    nxt.append(p)
                    if len(seen) > 10000:
                        raise RuntimeError("quaternion closure runaway")
        frontier = nxt
    return list(seen.values())


def _canonical_pair(p, q):
    """Normalize (p, q) ~ (-p, -q) by the sign of p's first nonzero entry."""
    for t in p:
        if t:
            if float(t.real()) < 0:
                return tuple(-x for x in p), tuple(-x for x in q)
            return p, q
    raise ValueError("zero quaternion")


def product_group_elements(kind: str):
    """All rotation matrices of the product group: pairs (p, q)/{+-1}."""
    binary = close_quaternion_group(_binary_generators(kind))
    pairs = set()
    for p in binary:
        for q in binary:
            pairs.add(_canonical_pair(p, q))
    return [rotation_matrix(p, q) for p, q in sorted(pairs, key=_pair_sort_key)]


def _pair_sort_key(pq):
    p, q = pq
    return tuple(complex(t).real for t in p + q)


def product_group_closure(kind: str):
    """GroupClosure of the product rotation group, built without matrix BFS."""
    from .invariants import GroupClosure

    return GroupClosure(product_group_elements(kind), 4, name=kind)
