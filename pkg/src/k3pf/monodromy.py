"""Global monodromy: numeric transport with integer-snapped trace^2
certificates, closed-form hypergeometric generators, rigidity tests,
presentation verification, and the PSl(2) -> SO(3) squaring map.
"""

from __future__ import annotations

import cmath
from fractions import Fraction

from .linalg import ExactMatrix
from .qnum import QNum, to_complex, unit_root
from .systems import FuchsianSystem
from .transport import KERNEL_KIND, integrate_segment


class TransportError(RuntimeError):
    pass


class SnapError(TransportError):
    def __init__(self, message, offenders=None):
        super().__init__(message)
        self.offenders = offenders or []


# -- paths ---------------------------------------------------------------------


class PathSpec:
    """Piecewise-linear closed loop; the first vertex is the base point and
    the closing segment back to it is implied."""

    def __init__(self, vertices, label=None, margin=0.0):
        self.vertices = [complex(v) for v in vertices]
        if len(self.vertices) < 2:
            raise ValueError("a loop needs at least two vertices")
        self.label = label
        self.margin = margin

    @property
    def base(self):
        return self.vertices[0]

    def segments(self):
        vs = self.vertices
        return [(vs[i], vs[(i + 1) % len(vs)]) for i in range(len(vs))]

    def min_distance(self, points) -> float:
        return min(
            _segment_distance(a, b, p) for a, b in self.segments() for p in points
        )

    def reversed(self):
        return PathSpec([self.vertices[0]] + self.vertices[:0:-1],
                        label=f"{self.label}^-1" if self.label else None,
                        margin=self.margin)

    def concat(self, other: "PathSpec") -> "PathSpec":
        if abs(self.base - other.base) > 1e-12:
            raise ValueError("loops must share the base point")
        return PathSpec(self.vertices + [self.base] + other.vertices,
                        label=f"{self.label}*{other.label}", margin=min(self.margin, other.margin))


def _segment_distance(a: complex, b: complex, p: complex) -> float:
    d = b - a
    L2 = abs(d) ** 2
    if L2 == 0:
        return abs(p - a)
    t = ((p - a).real * d.real + (p - a).imag * d.imag) / L2
    t = max(0.0, min(1.0, t))
    return abs(a + t * d - p)


def plan_loops(points) -> list[PathSpec]:
    """Rectangle loops around real singular points from a common base point
    on a horizontal line above them, one anticlockwise loop per point.

    Points are sorted in increasing order; vertical separators sit at the
    midpoints of consecutive points, and each loop is

        base, (L, h), (L, -h), (R, h sign down-up), ...

    exactly in the style of the worked numerical examples.
    """
    zs = [to_complex(p) for p in points]
    if any(abs(z.imag) > 1e-12 for z in zs):
        raise TransportError("automatic loop planning requires real singular points")
    labelled = sorted(zip((z.real for z in zs), points))
    xs = [x for x, _ in labelled]
    names = [_point_label(p) for _, p in labelled]
    n = len(xs)
    if n == 0:
        raise TransportError("no singular points to encircle")
    spread = xs[-1] - xs[0] if n > 1 else 1.0
    margin = max(1.0, spread)
    seps = [xs[0] - margin]
    for i in range(n - 1):
        seps.append((xs[i] + xs[i + 1]) / 2)
    seps.append(xs[-1] + margin)
    h = max(1.0, spread / 2)
    gaps = [seps[i + 1] - seps[i] for i in range(len(seps) - 1)]
    safety = min(min(gaps) / 2, h) / 2
    base = complex(seps[1] if n > 1 else xs[0] + margin, h)
    loops = []
    for i, x in enumerate(xs):
        L, R = seps[i], seps[i + 1]
        verts = [base, complex(L, h), complex(L, -h), complex(R, -h), complex(R, h)]
        loops.append(PathSpec(verts, label=names[i], margin=safety))
    return loops


def _point_label(p) -> str:
    if isinstance(p, QNum) and p.is_rational():
        return str(p.as_fraction())
    if isinstance(p, (int, Fraction)):
        return str(Fraction(p))
    return f"{to_complex(p).real:g}"


# -- transport -------------------------------------------------------------------


class TransportResult:
    def __init__(self, matrix, steps, rejected, snap_tol=1e-3):
        self.matrix = matrix  # ((m11, m12), (m21, m22)) complex
        self.steps = steps
        self.rejected = rejected
        self.trace = matrix[0][0] + matrix[1][1]
        self.trace_sq = self.trace * self.trace
        self.snapped = round(self.trace_sq.real)
        self.residual = abs(self.trace_sq - self.snapped)
        self.certified = self.residual < snap_tol

    def __repr__(self):
        return (
            f"TransportResult(trace^2 = {self.trace_sq:.9g}, snapped {self.snapped}, "
            f"residual {self.residual:.2e})"
        )


def _system_arrays(system: FuchsianSystem):
    pts = system.points_complex()
    res = []
    for r in system.residues:
        c = r.to_complex()
        res.append((c[0][0], c[0][1], c[1][0], c[1][1]))
    return pts, res


def transport(system: FuchsianSystem, path: PathSpec, rtol=1e-10, atol=1e-12,
              snap_tol=1e-3) -> TransportResult:
    """Numerically continue the fundamental matrix (identity at the base)
    around the loop; returns the loop's monodromy matrix approximation."""
    if system.dim != 2:
        raise TransportError("transport kernel handles 2x2 systems")
    pts, res = _system_arrays(system)
    if path.margin:
        d = path.min_distance(pts)
        if d < path.margin * (1 - 1e-9):
            raise TransportError(
                f"path comes within {d:.3g} of a singular point (margin {path.margin:.3g})"
            )
    y = (1 + 0j, 0j, 0j, 1 + 0j)
    steps = rejected = 0
    for a, b in path.segments():
        if abs(b - a) < 1e-15:
            continue
        y, st, rj = integrate_segment(pts, res, a, b, y, rtol, atol)
        steps += st
        rejected += rj
    m = ((y[0], y[1]), (y[2], y[3]))
    return TransportResult(m, steps, rejected, snap_tol)


def _mat_mul(a, b):
    return (
        (a[0][0] * b[0][0] + a[0][1] * b[1][0], a[0][0] * b[0][1] + a[0][1] * b[1][1]),
        (a[1][0] * b[0][0] + a[1][1] * b[1][0], a[1][0] * b[0][1] + a[1][1] * b[1][1]),
    )


def _mat_inv(a):
    det = a[0][0] * a[1][1] - a[0][1] * a[1][0]
    return ((a[1][1] / det, -a[0][1] / det), (-a[1][0] / det, a[0][0] / det))


def _trace_of_square(m):
    """trace(M^2) = trace(M)^2 - 2 det(M)."""
    t = m[0][0] + m[1][1]
    det = m[0][0] * m[1][1] - m[0][1] * m[1][0]
    return t * t - 2 * det


class TraceTable:
    """Snapped integers t_{i,j} = trace((M_i M_j)^2) for all generator pairs."""

    def __init__(self, labels, values, residuals, kernel=KERNEL_KIND):
        self.labels = labels              # includes 'inf'
        self.values = values              # {(label_i, label_j): int}
        self.residuals = residuals        # same keys -> float
        self.kernel = kernel

    def value(self, i, j):
        key = (i, j) if (i, j) in self.values else (j, i)
        return self.values[key]

    def max_residual(self):
        return max(self.residuals.values())

    def rows(self):
        out = []
        for (i, j), v in sorted(self.values.items(), key=lambda kv: str(kv[0])):
            out.append((i, j, v, self.residuals[(i, j)]))
        return out

    def __repr__(self):
        body = ", ".join(f"t[{i},{j}]={v}" for i, j, v, _ in self.rows())
        return f"TraceTable({body})"


def pairwise_trace_table(system: FuchsianSystem, loops=None, rtol=1e-10,
                         atol=1e-12, snap_tol=1e-3) -> TraceTable:
    """Transport one loop per finite point, close up at infinity via the
    product inverse, and snap trace((M_i M_j)^2) for all pairs."""
    if len(system.points) < 2:
        raise TransportError("trace table needs at least two singular points")
    if loops is None:
        loops = plan_loops(system.points)
    if len(loops) != len(system.points):
        raise TransportError("need exactly one loop per finite singular point")
    # sort loops by the real part of the enclosed point (ascending)
    mats = []
    labels = []
    for loop in loops:
        r = transport(system, loop, rtol, atol, snap_tol)
        mats.append(r.matrix)
        labels.append(loop.label or f"p{len(labels)}")
    # continuation along the composite of ascending loops gives the reversed
    # matrix product; the loop around infinity inverts it
    prod = mats[0]
    for m in mats[1:]:
        prod = _mat_mul(prod, m)
    m_inf = _mat_inv(prod)
    labels = labels + ["inf"]
    mats = mats + [m_inf]
    values = {}
    residuals = {}
    offenders = []
    for i in range(len(mats)):
        for j in range(i + 1, len(mats)):
            tsq = _trace_of_square(_mat_mul(mats[i], mats[j]))
            snapped = round(tsq.real)
            resid = abs(tsq - snapped)
            key = (labels[i], labels[j])
            values[key] = snapped
            residuals[key] = resid
            if resid >= snap_tol:
                offenders.append(key)
    if offenders:
        raise SnapError(
            f"trace^2 failed to snap to integers for pairs {offenders}", offenders
        )
    return TraceTable(labels, values, residuals)


# -- closed-form hypergeometric monodromy -----------------------------------------


class MonodromyPresentation:
    """Ordered generators whose product is the identity, with conjugacy tags."""

    def __init__(self, labels, matrices, exponents=None, exact=True):
        self.labels = list(labels)
        self.matrices = list(matrices)    # ExactMatrix (exact) or complex rows
        self.exponents = exponents or {}  # label -> (Fraction, Fraction) local data
        self.exact = exact

    def matrix(self, label):
        return self.matrices[self.labels.index(label)]

    def product(self):
        acc = ExactMatrix.identity(2)
        for m in self.matrices:
            acc = acc * m
        return acc

    def __repr__(self):
        return f"MonodromyPresentation({', '.join(self.labels)}, exact={self.exact})"


def _eh(x: Fraction):
    """e^(pi i x) exactly (QNum) when possible, else None."""
    return unit_root(Fraction(x) / 2)


def _cos_pi(x: Fraction):
    u = _eh(x)
    if u is None:
        return None
    return u.real()


def _sin_pi(x: Fraction):
    u = _eh(x)
    if u is None:
        return None
    return u.imag()


def hypergeometric_monodromy(alpha, beta, gamma) -> MonodromyPresentation:
    """Generators M0, M1, Minf with M0 M1 Minf = id for 2F1(alpha, beta, gamma).

    Parameters are reduced mod Z first.  Matrices are exact over the
    multiquadratic field Q(i, sqrt 2, sqrt 3) whenever all required roots of
    unity live there (true for every value arising from the K3 families);
    otherwise unit-complex floats are returned with ``exact=False``.
    """
    a = Fraction(alpha) % 1
    b = Fraction(beta) % 1
    g = Fraction(gamma) % 1
    if a == 0:
        a = Fraction(0)
    case = g - a - b
    if case == -1:
        g = g + 1
        case = Fraction(0)
    # eigenvalue exponents of the local monodromies (mod Z)
    expo = {
        "0": (Fraction(0), -g),
        "1": (Fraction(0), g - a - b),
        "inf": (a, b),
    }
    if case == 0:
        M0, M1, Minf, exact = _hg_equal_case(a, b)
    else:
        M0, M1, Minf, exact = _hg_generic_case(a, b, g)
    return MonodromyPresentation(["0", "1", "inf"], [M0, M1, Minf], expo, exact)


def _hg_generic_case(a, b, g):
    e = lambda x: unit_root(Fraction(x))            # e^(2 pi i x)
    eh = lambda x: unit_root(Fraction(x) / 2)       # e^(pi i x)
    need_e = [2 * a + b, a + 2 * b, a + g, b + g, a + b + g, a + b]
    need_eh = [g - a - b, a + b, a - b, a + b + 2 * g, 3 * (a + b)]
    ok = all(e(x) is not None for x in need_e) and all(eh(x) is not None for x in need_eh)
    if ok:
        i = QNum.imaginary_unit()
        num = (
            e(2 * a + b) + e(a + 2 * b) + e(a + g) + e(b + g)
            - 2 * e(a + b + g) - 2 * e(a + b)
        )
        den = eh(a + b + 2 * g) - eh(3 * (a + b))
        X = i * num / den
        cos = _cos_pi(g - a - b)
        sin = _sin_pi(g - a - b)
        M1 = ExactMatrix([[cos, sin], [-sin, cos]]) * eh(g - a - b)
        Minf = ExactMatrix([[eh(b - a), X], [QNum(0), eh(a - b)]]) * eh(a + b)
        M0 = (M1 * Minf).inverse()
        return M0, M1, Minf, True
    # float fallback
    ef = lambda x: cmath.exp(2j * cmath.pi * float(x))
    ehf = lambda x: cmath.exp(1j * cmath.pi * float(x))
    num = (
        ef(2 * a + b) + ef(a + 2 * b) + ef(a + g) + ef(b + g)
        - 2 * ef(a + b + g) - 2 * ef(a + b)
    )
    den = ehf(a + b + 2 * g) - ehf(3 * (a + b))
    X = 1j * num / den
    cs, sn = cmath.cos(cmath.pi * float(g - a - b)), cmath.sin(cmath.pi * float(g - a - b))
    s = ehf(g - a - b)
    M1 = ((s * cs, s * sn), (-s * sn, s * cs))
    t = ehf(a + b)
    Minf = ((t * ehf(b - a), t * X), (0j, t * ehf(a - b)))
    M0 = _mat_inv(_mat_mul(M1, Minf))
    return M0, M1, Minf, False


def _hg_equal_case(a, b):
    """gamma - alpha - beta = 0: parabolic M1 with entry 4 sin(a pi) sin(b pi)."""
    eh = lambda x: unit_root(Fraction(x) / 2)
    # 4 sin A sin B = 2 cos(A - B) - 2 cos(A + B)
    c_minus = _cos_pi(a - b)
    c_plus = _cos_pi(a + b)
    ok = all(v is not None for v in (eh(a + b), c_minus, c_plus))
    if ok:
        M0 = ExactMatrix([[QNum(0), QNum(-1)], [QNum(1), 2 * c_plus]]) * eh(-(a + b))
        M1 = ExactMatrix([[QNum(1), 2 * c_minus - 2 * c_plus], [QNum(0), QNum(1)]])
        Minf = ExactMatrix([[2 * c_minus, QNum(1)], [QNum(-1), QNum(0)]]) * eh(a + b)
        return M0, M1, Minf, True
    ehf = lambda x: cmath.exp(1j * cmath.pi * float(x))
    cp = cmath.cos(cmath.pi * float(a + b))
    cm = cmath.cos(cmath.pi * float(a - b))
    s = ehf(-(a + b))
    M0 = ((0j, -s), (s, 2 * cp * s))
    M1 = ((1 + 0j, 2 * cm - 2 * cp), (0j, 1 + 0j))
    t = ehf(a + b)
    Minf = ((2 * cm * t, t), (-t, 0j))
    return M0, M1, Minf, False


# -- classification ---------------------------------------------------------------


ADMISSIBLE_ANGLES = (
    Fraction(0),
    Fraction(1, 6),
    Fraction(1, 4),
    Fraction(1, 3),
    Fraction(1, 2),
    Fraction(2, 3),
    Fraction(3, 4),
    Fraction(5, 6),
)


def classify_k3_hypergeometric():
    """All unordered angle triples from the admissible set with sum < 1.

    Returns (triples, boundary) where each entry is (angles, traces) with
    traces 2cos(angle * pi) of the projective generators; `boundary`
    flags sum == 1 triples containing a zero angle, which the classification
    theorem's strict inequality excludes but its Fuchsian criterion would
    admit (kept separate on purpose).
    """
    triples = []
    boundary = []
    S = ADMISSIBLE_ANGLES
    n = len(S)
    for i in range(n):
        for j in range(i, n):
            for k in range(j, n):
                t = (S[i], S[j], S[k])
                s = sum(t)
                traces = tuple(2 * _cos_pi(x) for x in t)
                if s < 1:
                    triples.append((t, traces))
                elif s == 1 and Fraction(0) in t:
                    boundary.append((t, traces))
    return triples, boundary


def angle_triple(alpha, beta, gamma):
    """(|1-gamma|, |gamma-alpha-beta|, |alpha-beta|) for given parameters."""
    a, b, g = Fraction(alpha), Fraction(beta), Fraction(gamma)
    return tuple(sorted((abs(1 - g), abs(g - a - b), abs(a - b)), reverse=True))


def triple_in_classification(triple) -> bool:
    triples, _ = classify_k3_hypergeometric()
    want = tuple(sorted(Fraction(x) for x in triple))
    return any(tuple(sorted(t)) == want for t, _ in triples)


# -- rigidity ---------------------------------------------------------------------


def levelt_rigid(eigs_a, eigs_b) -> bool:
    """Levelt: <A, B> is rigid when the eigenvalue sets are disjoint (and
    A B^-1 is a pseudo-reflection, the caller's standing assumption)."""
    sa = {QNum(x) if not isinstance(x, QNum) else x for x in eigs_a}
    sb = {QNum(x) if not isinstance(x, QNum) else x for x in eigs_b}
    return not (sa & sb)


def pair_rigid_by_traces(trace_nm_sq, trace_m_sq) -> bool:
    """trace((N M)^2) != trace(M^2) certifies rigidity of <N, M> for the
    order-2 pseudo-reflection class N."""
    return trace_nm_sq != trace_m_sq


def is_pseudo_reflection(m: ExactMatrix) -> bool:
    """rank(M - id) == 1 for 2x2."""
    d = m - ExactMatrix.identity(m.nrows)
    rows = d.rows
    nonzero = [r for r in rows if any(r)]
    if len(nonzero) == 0:
        return False
    if len(nonzero) == 1:
        return True
    # 2x2: rank 1 iff det == 0
    return not d.det()


# -- presentation verification -----------------------------------------------------


def verify_presentation(pres: MonodromyPresentation, local_data=None, table=None,
                        diagnostics=None) -> bool:
    """Check (a) the product relation, (b) conjugacy classes against local
    exponents, (c) trace((M_i M_j)^2) against a snapped integer table.

    `local_data` maps generator labels to exponent pairs (from a Riemann
    symbol or stored fixture); `table` maps label pairs to integers.
    """
    diag = diagnostics if diagnostics is not None else []
    if not pres.exact:
        diag.append("presentation is not exact; verification refused")
        return False
    prod = pres.product()
    if not prod == ExactMatrix.identity(2):
        diag.append("generator product is not the identity")
        return False
    data = local_data if local_data is not None else pres.exponents
    for label, m in zip(pres.labels, pres.matrices):
        if label not in data:
            continue
        e1, e2 = data[label]
        want = {unit_root(Fraction(e1)), unit_root(Fraction(e2))}
        if None in want:
            diag.append(f"{label}: exponents outside the exact root-of-unity range")
            return False
        tr = m.trace()
        det = m.det()
        have_tr = sum(want, QNum(0)) if len(want) == 2 else 2 * next(iter(want))
        w = list(want)
        have_det = w[0] * w[1] if len(w) == 2 else w[0] * w[0]
        trq = tr if isinstance(tr, QNum) else QNum(tr)
        detq = det if isinstance(det, QNum) else QNum(det)
        if trq != have_tr or detq != have_det:
            diag.append(f"{label}: eigenvalues do not match exponents {e1}, {e2}")
            return False
    if table:
        for (i, j), target in table.items():
            mi = pres.matrix(i)
            mj = pres.matrix(j)
            p = mi * mj
            tsq = p.trace() * p.trace()
            tq = tsq if isinstance(tsq, QNum) else QNum(tsq)
            if tq != QNum(Fraction(target)):
                diag.append(f"trace((M_{i} M_{j})^2) != {target}")
                return False
    return True


# -- squaring map -------------------------------------------------------------------


def sl2_to_so3(m: ExactMatrix) -> ExactMatrix:
    """The homomorphism [[a,b],[c,d]] -> [[a^2, sqrt2 ab, b^2], ...] into
    SO(2,1)-type matrices; satisfies trace(phi(A)) = trace(A)^2 - 1."""
    (a, b), (c, d) = m.rows
    s2 = QNum.sqrt_int(2)
    return ExactMatrix(
        [
            [a * a, s2 * a * b, b * b],
            [s2 * a * c, a * d + b * c, s2 * b * d],
            [c * c, s2 * c * d, d * d],
        ]
    )


# -- presentation fixtures -----------------------------------------------------------


def parse_presentation(text: str) -> tuple[MonodromyPresentation, dict]:
    """Parse a presentation fixture:

        generator <label>
        exponents <r1> <r2>
        [point <expr>]
          <four entries per matrix row, expression grammar>
        ...
        trace <label_i> <label_j> <integer>     (optional table lines)
    """
    from .parsing import parse_scalar

    labels = []
    matrices = []
    exponents = {}
    table = {}
    rows: list = []
    label = None

    def flush():
        nonlocal rows, label
        if label is not None:
            if len(rows) != 2:
                raise ValueError(f"generator {label} needs 2 matrix rows")
            labels.append(label)
            matrices.append(ExactMatrix(rows))
        rows = []
        label = None

    for raw in text.splitlines():
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        if line.startswith("generator "):
            flush()
            label = line.split(None, 1)[1].strip()
        elif line.startswith("exponents "):
            parts = line.split()[1:]
            exponents[label] = tuple(Fraction(p) for p in parts)
        elif line.startswith("point "):
            continue
        elif line.startswith("trace "):
            parts = line.split()
            table[(parts[1], parts[2])] = int(parts[3])
        else:
            cells = [c for c in line.split() if c]
            vals = [parse_scalar(c) for c in cells]
            rows.append([v if isinstance(v, QNum) else QNum(v) for v in vals])
    flush()
    return MonodromyPresentation(labels, matrices, exponents, exact=True), table


def format_presentation(pres: MonodromyPresentation, table=None) -> str:
    from .parsing import format_scalar

    lines = []
    for label, m in zip(pres.labels, pres.matrices):
        lines.append(f"generator {label}")
        if label in pres.exponents:
            e1, e2 = pres.exponents[label]
            lines.append(f"exponents {e1} {e2}")
        for row in m.rows:
            lines.append("  " + "  ".join(format_scalar(c).replace(" ", "") for c in row))
    for (i, j), v in (table or {}).items():
        lines.append(f"trace {i} {j} {v}")
    return "\n".join(lines) + "\n"
