"""Pure-Python transport kernel: adaptive Dormand-Prince RK5(4) for the
2x2 fundamental-matrix ODE  dY/ds = (p1-p0) * A(p0 + (p1-p0) s) * Y  on [0,1].

Drop-in twin of the compiled kernel in ``_kernels.pyx``; selected at import
time by :mod:`k3pf.transport` when the extension is unavailable.
"""

from __future__ import annotations

KERNEL_KIND = "python"

# Dormand-Prince coefficients
_A21 = 1 / 5
_A31, _A32 = 3 / 40, 9 / 40
_A41, _A42, _A43 = 44 / 45, -56 / 15, 32 / 9
_A51, _A52, _A53, _A54 = 19372 / 6561, -25360 / 2187, 64448 / 6561, -212 / 729
_A61, _A62, _A63, _A64, _A65 = 9017 / 3168, -355 / 33, 46732 / 5247, 49 / 176, -5103 / 18656
_B1, _B3, _B4, _B5, _B6 = 35 / 384, 500 / 1113, 125 / 192, -2187 / 6784, 11 / 84
_E1, _E3, _E4, _E5, _E6, _E7 = (
    35 / 384 - 5179 / 57600,
    500 / 1113 - 7571 / 16695,
    125 / 192 - 393 / 640,
    -2187 / 6784 + 92097 / 339200,
    11 / 84 - 187 / 2100,
    -1 / 40,
)
_C2, _C3, _C4, _C5 = 1 / 5, 3 / 10, 4 / 5, 8 / 9


def _rhs(points, residues, delta, p0, s, y):
    """delta * A(p0 + delta*s) * y for the flattened 2x2 state y."""
    z = p0 + delta * s
    a11 = a12 = a21 = a22 = 0j
    for p, (r11, r12, r21, r22) in zip(points, residues):
        w = delta / (z - p)
        a11 += r11 * w
        a12 += r12 * w
        a21 += r21 * w
        a22 += r22 * w
    y11, y12, y21, y22 = y
    return (
        a11 * y11 + a12 * y21,
        a11 * y12 + a12 * y22,
        a21 * y11 + a22 * y21,
        a21 * y12 + a22 * y22,
    )


def integrate_segment(points, residues, p0, p1, y0, rtol=1e-10, atol=1e-12,
                      max_steps=2_000_000):
    """Integrate across one straight segment; returns (y1, steps, rejected)."""
    delta = p1 - p0
    y = tuple(y0)
    s = 0.0
    h = 0.05
    steps = 0
    rejected = 0
    k1 = _rhs(points, residues, delta, p0, s, y)
    while s < 1.0:
        if s + h > 1.0:
            h = 1.0 - s
        y2 = tuple(y[i] + h * _A21 * k1[i] for i in range(4))
        k2 = _rhs(points, residues, delta, p0, s + _C2 * h, y2)
        y3 = tuple(y[i] + h * (_A31 * k1[i] + _A32 * k2[i]) for i in range(4))
        k3 = _rhs(points, residues, delta, p0, s + _C3 * h, y3)
        y4 = tuple(y[i] + h * (_A41 * k1[i] + _A42 * k2[i] + _A43 * k3[i]) for i in range(4))
        k4 = _rhs(points, residues, delta, p0, s + _C4 * h, y4)
        y5 = tuple(
            y[i] + h * (_A51 * k1[i] + _A52 * k2[i] + _A53 * k3[i] + _A54 * k4[i])
            for i in range(4)
        )
        k5 = _rhs(points, residues, delta, p0, s + _C5 * h, y5)
        y6 = tuple(
            y[i]
            + h * (_A61 * k1[i] + _A62 * k2[i] + _A63 * k3[i] + _A64 * k4[i] + _A65 * k5[i])
            for i in range(4)
        )
        k6 = _rhs(points, residues, delta, p0, s + h, y6)
        ynew = tuple(
            y[i] + h * (_B1 * k1[i] + _B3 * k3[i] + _B4 * k4[i] + _B5 * k5[i] + _B6 * k6[i])
            for i in range(4)
        )
        k7 = _rhs(points, residues, delta, p0, s + h, ynew)
        errmax = 0.0
        for i in range(4):
            err = abs(
                h
                * (
                    _E1 * k1[i]
                    + _E3 * k3[i]
                    + _E4 * k4[i]
                    + _E5 * k5[i]
                    + _E6 * k6[i]
                    + _E7 * k7[i]
                )
            )
            scale = atol + rtol * max(abs(y[i]), abs(ynew[i]))
            ratio = err / scale if scale > 0 else float("inf")
            if ratio > errmax:
                errmax = ratio
        steps += 1
        if steps > max_steps:
            raise RuntimeError("transport kernel exceeded the step budget")
        if errmax <= 1.0:
            s += h
            y = ynew
            k1 = k7  # FSAL
            grow = 0.9 * errmax ** -0.2 if errmax > 0 else 5.0
            h *= min(5.0, max(0.2, grow))
        else:
            rejected += 1
            h *= max(0.1, 0.9 * errmax ** -0.25)
            if h < 1e-14:
                raise RuntimeError("step size underflow near a singular point")
    return y, steps, rejected
