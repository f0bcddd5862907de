"""Fundamental domains of Fuchsian groups generated by elliptic involutions.

All geometry is floating point in the upper half-plane, validated by
residual checks (closure of the vertex cycle, side midpoints at generator
fixed points, the Poincare angle condition), and rendered in the Poincare
disk as SVG with geodesics drawn as arcs orthogonal to the unit circle.
"""

from __future__ import annotations

import cmath
import math
from fractions import Fraction


class GeometryError(ValueError):
    pass


class IsometryPSL2R:
    """2x2 real matrix normalized to det 1, identified up to sign."""

    __slots__ = ("m",)

    def __init__(self, rows, normalize=True):
        a, b = rows[0]
        c, d = rows[1]
        m = [[float(a), float(b)], [float(c), float(d)]]
        if normalize:
            det = m[0][0] * m[1][1] - m[0][1] * m[1][0]
            if det <= 0:
                raise GeometryError("matrix does not lie in PSL(2, R)")
            s = math.sqrt(det)
            m = [[x / s for x in row] for row in m]
        self.m = m

    @classmethod
    def from_complex_matrix(cls, rows, tol=1e-9):
        """Strip a unit-scalar prefactor: M/sqrt(det M) should be real."""
        a, b = complex(rows[0][0]), complex(rows[0][1])
        c, d = complex(rows[1][0]), complex(rows[1][1])
        det = a * d - b * c
        s = cmath.sqrt(det)
        for scale in (s, s * 1j):
            cand = [x / scale for x in (a, b, c, d)]
            if max(abs(x.imag) for x in cand) < tol:
                re = [x.real for x in cand]
                return cls([[re[0], re[1]], [re[2], re[3]]], normalize=True)
        raise GeometryError("matrix is not a unit scalar times a real matrix")

    def det(self):
        return self.m[0][0] * self.m[1][1] - self.m[0][1] * self.m[1][0]

    def trace(self):
        return self.m[0][0] + self.m[1][1]

    def __mul__(self, other):
        a, b = self.m
        c, d = other.m
        return IsometryPSL2R(
            [
                [a[0] * c[0] + a[1] * d[0], a[0] * c[1] + a[1] * d[1]],
                [b[0] * c[0] + b[1] * d[0], b[0] * c[1] + b[1] * d[1]],
            ],
            normalize=False,
        )

    def inverse(self):
        (a, b), (c, d) = self.m
        return IsometryPSL2R([[d, -b], [-c, a]], normalize=False)

    def apply(self, z: complex) -> complex:
        (a, b), (c, d) = self.m
        return (a * z + b) / (c * z + d)

    def is_elliptic(self) -> bool:
        return abs(self.trace()) < 2 - 1e-12

    def is_involution(self, tol=1e-9) -> bool:
        return abs(self.trace()) < tol

    def rotation_order(self, max_order=64, tol=1e-6):
        """Projective order of an elliptic isometry (rotation angle 2theta)."""
        t = self.trace()
        if abs(t) >= 2:
            return None
        theta = math.acos(max(-1.0, min(1.0, abs(t) / 2)))
        # rotation by 2*theta; order n when theta = pi*m/n
        for n in range(2, max_order + 1):
            m = round(theta * n / math.pi)
            if m and abs(theta - math.pi * m / n) < tol / n:
                if math.gcd(m, n) == 1:
                    return n
        return None

    def __repr__(self):
        return f"IsometryPSL2R({self.m})"


def fixed_point(g: IsometryPSL2R) -> complex:
    """The fixed point in the upper half-plane of an elliptic isometry."""
    if not g.is_elliptic():
        raise GeometryError("fixed_point requires an elliptic isometry")
    (a, b), (c, d) = g.m
    if abs(c) < 1e-15:
        raise GeometryError("degenerate elliptic matrix (c = 0 with |tr| < 2?)")
    disc = (d - a) ** 2 + 4 * b * c  # = tr^2 - 4 det < 0
    root = cmath.sqrt(complex(disc, 0))
    z = ((a - d) + root) / (2 * c)
    if z.imag < 0:
        z = ((a - d) - root) / (2 * c)
    return z


# -- geodesics -------------------------------------------------------------------


def geodesic_through(z1: complex, z2: complex):
    """('line', x) for vertical geodesics, else ('circle', center, radius)."""
    if abs(z1.real - z2.real) < 1e-13:
        return ("line", z1.real)
    # center on the real axis equidistant from z1, z2
    c = (abs(z1) ** 2 - abs(z2) ** 2) / (2 * (z1.real - z2.real))
    r = abs(z1 - c)
    return ("circle", c, r)


def hyperbolic_midpoint(z1: complex, z2: complex) -> complex:
    g = geodesic_through(z1, z2)
    if g[0] == "line":
        return complex(g[1], math.sqrt(z1.imag * z2.imag))
    _, c, r = g
    t1 = math.atan2(z1.imag, z1.real - c)
    t2 = math.atan2(z2.imag, z2.real - c)
    # angles in (0, pi); hyperbolic arclength parameter u = ln tan(t/2)
    u1 = math.log(math.tan(t1 / 2))
    u2 = math.log(math.tan(t2 / 2))
    tm = 2 * math.atan(math.exp((u1 + u2) / 2))
    return complex(c + r * math.cos(tm), r * math.sin(tm))


def hyperbolic_distance(z1: complex, z2: complex) -> float:
    return math.acosh(1 + (abs(z1 - z2) ** 2) / (2 * z1.imag * z2.imag))


def _tangent_toward(z: complex, w: complex) -> complex:
    """Unit Euclidean tangent at z of the geodesic [z, w], pointing toward w."""
    g = geodesic_through(z, w)
    if g[0] == "line":
        return complex(0, 1) if w.imag > z.imag else complex(0, -1)
    _, c, r = g
    t = complex(0, 1) * (z - c)
    t /= abs(t)
    # pick the branch pointing toward w
    if (t.real * (w - z).real + t.imag * (w - z).imag) < 0:
        t = -t
    return t


def interior_angle(prev_v: complex, v: complex, next_v: complex) -> float:
    t1 = _tangent_toward(v, prev_v)
    t2 = _tangent_toward(v, next_v)
    dot = t1.real * t2.real + t1.imag * t2.imag
    return math.acos(max(-1.0, min(1.0, dot)))


# -- the polygon ------------------------------------------------------------------


class HyperbolicPolygon:
    def __init__(self, vertices, pairings, angles, closure_residual, midpoint_residual):
        self.vertices = vertices            # k points in H (closed: v_k == v_0)
        self.pairings = pairings            # the side involutions sigma_i
        self.angles = angles                # interior angle at each vertex
        self.closure_residual = closure_residual
        self.midpoint_residual = midpoint_residual

    @property
    def nsides(self):
        return len(self.pairings)

    def sides(self):
        vs = self.vertices  # closed list: last entry repeats the first
        return [(vs[i], vs[i + 1]) for i in range(len(vs) - 1)]

    def angle_sum(self):
        return sum(self.angles)

    def __repr__(self):
        return (
            f"HyperbolicPolygon({self.nsides} sides, angle sum {self.angle_sum():.6f}, "
            f"closure {self.closure_residual:.1e})"
        )


def polygon_from_involutions(sigmas, tol=1e-9) -> HyperbolicPolygon:
    """Polygon with vertices v, s1(v), s2 s1(v), ..., where v is the fixed
    point of sigma_0 = (s1...sk)^{-1} and the side midpoints are the fixed
    points of the generators."""
    k = len(sigmas)
    if k < 3:
        raise GeometryError("need at least three involutions for a polygon")
    for s in sigmas:
        if not s.is_involution():
            raise GeometryError("side-pairing generators must be involutions (trace 0)")
    prod = sigmas[0]
    for s in sigmas[1:]:
        prod = prod * s
    sigma0 = prod.inverse()
    if not sigma0.is_elliptic():
        raise GeometryError("sigma_0 = (product)^(-1) is not elliptic")
    v = fixed_point(sigma0)
    verts = [v]
    acc = None
    for s in sigmas:
        acc = s if acc is None else s * acc
        verts.append(acc.apply(v))
    closure = abs(verts[-1] - verts[0])
    if closure > 1e-6 * max(1.0, abs(v)):
        raise GeometryError(f"vertex cycle fails to close (residual {closure:.2e})")
    # midpoints of sides are the generator fixed points
    mid_res = 0.0
    for i, s in enumerate(sigmas):
        mid = hyperbolic_midpoint(verts[i], verts[i + 1])
        fp = fixed_point(s)
        mid_res = max(mid_res, abs(mid - fp))
    if mid_res > 1e-6:
        raise GeometryError(f"side midpoints miss the generator fixed points ({mid_res:.2e})")
    cyc = verts[:-1]
    angles = []
    for i, w in enumerate(cyc):
        angles.append(interior_angle(cyc[i - 1], w, cyc[(i + 1) % len(cyc)]))
    return HyperbolicPolygon(verts, list(sigmas), angles, closure, mid_res)


def check_poincare(polygon: HyperbolicPolygon, sigma0_order: int, tol=1e-9) -> bool:
    """order(gamma_v) * sum(gamma_v) = 2 pi for the single vertex cycle."""
    return abs(polygon.angle_sum() * sigma0_order - 2 * math.pi) < max(tol, 1e-9) * 10


def side_pairing_residual(polygon: HyperbolicPolygon, samples=5) -> float:
    """sigma_i maps side s_i to itself: endpoints swap, midpoint fixed."""
    worst = 0.0
    for (a, b), s in zip(polygon.sides(), polygon.pairings):
        worst = max(worst, abs(s.apply(a) - b), abs(s.apply(b) - a))
        g = geodesic_through(a, b)
        for t in range(1, samples + 1):
            z = _point_on_geodesic(a, b, t / (samples + 1))
            img = s.apply(z)
            worst = max(worst, _distance_to_geodesic(img, g))
    return worst


def _point_on_geodesic(a: complex, b: complex, frac: float) -> complex:
    g = geodesic_through(a, b)
    if g[0] == "line":
        y = a.imag * (b.imag / a.imag) ** frac
        return complex(g[1], y)
    _, c, r = g
    ta = math.atan2(a.imag, a.real - c)
    tb = math.atan2(b.imag, b.real - c)
    ua = math.log(math.tan(ta / 2))
    ub = math.log(math.tan(tb / 2))
    u = ua + (ub - ua) * frac
    t = 2 * math.atan(math.exp(u))
    return complex(c + r * math.cos(t), r * math.sin(t))


def _distance_to_geodesic(z: complex, g) -> float:
    if g[0] == "line":
        return abs(z.real - g[1])
    _, c, r = g
    return abs(abs(z - c) - r)


# -- Poincare disk rendering --------------------------------------------------------


def to_disk(z: complex) -> complex:
    """Cayley transform H -> unit disk, i -> 0."""
    return (z - 1j) / (z + 1j)


class DiskArc:
    """Geodesic segment in the disk: circular arc orthogonal to the boundary
    (or a diameter when the endpoints are collinear with 0)."""

    def __init__(self, w1: complex, w2: complex):
        self.w1 = w1
        self.w2 = w2
        cross = w1.real * w2.imag - w1.imag * w2.real
        if abs(cross) < 1e-12 * max(abs(w1), abs(w2), 1e-9):
            self.kind = "diameter"
            self.center = None
            self.radius = None
            return
        self.kind = "arc"
        # orthogonality: |c|^2 = r^2 + 1 and |w - c| = r for both endpoints
        # => 2 Re(conj(c) w) = |w|^2 + 1, a linear system for (cx, cy)
        a1, b1, r1 = w1.real, w1.imag, abs(w1) ** 2 + 1
        a2, b2, r2 = w2.real, w2.imag, abs(w2) ** 2 + 1
        det = 2 * (a1 * b2 - a2 * b1)
        cx = (r1 * b2 - r2 * b1) / det
        cy = (a1 * r2 - a2 * r1) / det
        self.center = complex(cx, cy)
        self.radius = math.sqrt(cx * cx + cy * cy - 1.0)

    def orthogonality_residual(self) -> float:
        if self.kind == "diameter":
            return 0.0
        return abs(abs(self.center) ** 2 - self.radius ** 2 - 1.0)

    def svg_path(self) -> str:
        x1, y1 = self.w1.real, self.w1.imag
        x2, y2 = self.w2.real, self.w2.imag
        if self.kind == "diameter":
            return f"M {x1:.6f} {y1:.6f} L {x2:.6f} {y2:.6f}"
        # sweep direction: keep the arc inside the disk (the minor arc)
        c = self.center
        cross = (self.w1 - c).real * (self.w2 - c).imag - (self.w1 - c).imag * (self.w2 - c).real
        sweep = 1 if cross > 0 else 0
        r = self.radius
        return f"M {x1:.6f} {y1:.6f} A {r:.6f} {r:.6f} 0 0 {sweep} {x2:.6f} {y2:.6f}"


def render_svg(polygon: HyperbolicPolygon, stroke="#1a3f6f", vertex_color="#b03030",
               midpoint_color="#2f7f4f", stroke_width=0.012) -> str:
    """SVG of the polygon in the Poincare disk, with the boundary circle,
    vertices, and side-midpoint markers."""
    arcs = []
    for a, b in polygon.sides():
        arcs.append(DiskArc(to_disk(a), to_disk(b)))
    mids = [to_disk(hyperbolic_midpoint(a, b)) for a, b in polygon.sides()]
    verts = [to_disk(v) for v in polygon.vertices[:-1]]
    lines = [
        '<?xml version="1.0" encoding="UTF-8"?>',
        '<svg xmlns="http://www.w3.org/2000/svg" viewBox="-1.05 -1.05 2.1 2.1">',
        '  <g transform="scale(1,-1)">',
        '  <circle cx="0" cy="0" r="1" fill="none" stroke="#555555" stroke-width="0.008"/>',
    ]
    for arc in arcs:
        lines.append(
            f'  <path d="{arc.svg_path()}" fill="none" stroke="{stroke}" '
            f'stroke-width="{stroke_width}"/>'
        )
    for w in verts:
        lines.append(
            f'  <circle cx="{w.real:.6f}" cy="{w.imag:.6f}" r="0.02" fill="{vertex_color}"/>'
        )
    for w in mids:
        lines.append(
            f'  <circle cx="{w.real:.6f}" cy="{w.imag:.6f}" r="0.014" fill="{midpoint_color}"/>'
        )
    lines.append("  </g>")
    lines.append("</svg>")
    return "\n".join(lines) + "\n"


def disk_arcs(polygon: HyperbolicPolygon):
    """The rendered arc objects (for orthogonality validation)."""
    return [DiskArc(to_disk(a), to_disk(b)) for a, b in polygon.sides()]
