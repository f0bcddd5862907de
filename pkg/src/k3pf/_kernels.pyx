# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled transport kernel: adaptive Dormand-Prince RK5(4) for the 2x2
fundamental-matrix ODE along one straight segment.  API-identical to
``_transport_fallback.integrate_segment``."""

KERNEL_KIND = "cython"

cdef double A21 = 1.0/5
cdef double A31 = 3.0/40, A32 = 9.0/40
cdef double A41 = 44.0/45, A42 = -56.0/15, A43 = 32.0/9
cdef double A51 = 19372.0/6561, A52 = -25360.0/2187, A53 = 64448.0/6561, A54 = -212.0/729
cdef double A61 = 9017.0/3168, A62 = -355.0/33, A63 = 46732.0/5247, A64 = 49.0/176, A65 = -5103.0/18656
cdef double B1 = 35.0/384, B3 = 500.0/1113, B4 = 125.0/192, B5 = -2187.0/6784, B6 = 11.0/84
cdef double E1 = 35.0/384 - 5179.0/57600
cdef double E3 = 500.0/1113 - 7571.0/16695
cdef double E4 = 125.0/192 - 393.0/640
cdef double E5 = -2187.0/6784 + 92097.0/339200
cdef double E6 = 11.0/84 - 187.0/2100
cdef double E7 = -1.0/40
cdef double C2 = 1.0/5, C3 = 3.0/10, C4 = 4.0/5, C5 = 8.0/9


cdef inline void _rhs(int k, double complex* pts, double complex* res,
                      double complex delta, double complex p0, double s,
                      double complex* y, double complex* out) noexcept:
    cdef double complex z = p0 + delta * s
    cdef double complex a11 = 0, a12 = 0, a21 = 0, a22 = 0
    cdef double complex w
    cdef int i
    for i in range(k):
        w = delta / (z - pts[i])
        a11 = a11 + res[4*i] * w
        a12 = a12 + res[4*i+1] * w
        a21 = a21 + res[4*i+2] * w
        a22 = a22 + res[4*i+3] * w
    out[0] = a11 * y[0] + a12 * y[2]
    out[1] = a11 * y[1] + a12 * y[3]
    out[2] = a21 * y[0] + a22 * y[2]
    out[3] = a21 * y[1] + a22 * y[3]


def integrate_segment(points, residues, p0, p1, y0, double rtol=1e-10,
                      double atol=1e-12, long max_steps=2000000):
    cdef int k = len(points)
    cdef double complex pts[16]
    cdef double complex res[64]
    cdef int i, j
    if k > 16:
        raise ValueError("too many singular points for the compiled kernel")
    for i in range(k):
        pts[i] = points[i]
        for j in range(4):
            res[4*i+j] = residues[i][j]
    cdef double complex cp0 = p0
    cdef double complex delta = (<double complex> p1) - cp0
    cdef double complex y[4]
    cdef double complex ynew[4]
    cdef double complex ytmp[4]
    cdef double complex k1[4], k2[4], k3[4], k4[4], k5[4], k6[4], k7[4]
    for i in range(4):
        y[i] = y0[i]
    cdef double s = 0.0, h = 0.05
    cdef long steps = 0, rejected = 0
    cdef double errmax, err, scale, ay, aynew, grow
    _rhs(k, pts, res, delta, cp0, s, y, k1)
    while s < 1.0:
        if s + h > 1.0:
            h = 1.0 - s
        for i in range(4):
            ytmp[i] = y[i] + h * A21 * k1[i]
        _rhs(k, pts, res, delta, cp0, s + C2*h, ytmp, k2)
        for i in range(4):
            ytmp[i] = y[i] + h * (A31*k1[i] + A32*k2[i])
        _rhs(k, pts, res, delta, cp0, s + C3*h, ytmp, k3)
        for i in range(4):
            ytmp[i] = y[i] + h * (A41*k1[i] + A42*k2[i] + A43*k3[i])
        _rhs(k, pts, res, delta, cp0, s + C4*h, ytmp, k4)
        for i in range(4):
            ytmp[i] = y[i] + h * (A51*k1[i] + A52*k2[i] + A53*k3[i] + A54*k4[i])
        _rhs(k, pts, res, delta, cp0, s + C5*h, ytmp, k5)
        for i in range(4):
            ytmp[i] = y[i] + h * (A61*k1[i] + A62*k2[i] + A63*k3[i] + A64*k4[i] + A65*k5[i])
        _rhs(k, pts, res, delta, cp0, s + h, ytmp, k6)
        for i in range(4):
            ynew[i] = y[i] + h * (B1*k1[i] + B3*k3[i] + B4*k4[i] + B5*k5[i] + B6*k6[i])
        _rhs(k, pts, res, delta, cp0, s + h, ynew, k7)
        errmax = 0.0
        for i in range(4):
            err = abs(h * (E1*k1[i] + E3*k3[i] + E4*k4[i] + E5*k5[i] + E6*k6[i] + E7*k7[i]))
            ay = abs(y[i]); aynew = abs(ynew[i])
            scale = atol + rtol * (ay if ay > aynew else aynew)
            if scale > 0 and err / scale > errmax:
                errmax = err / scale
            elif scale <= 0:
                errmax = 1e300
        steps += 1
        if steps > max_steps:
            raise RuntimeError("transport kernel exceeded the step budget")
        if errmax <= 1.0:
            s += h
            for i in range(4):
                y[i] = ynew[i]
                k1[i] = k7[i]
            grow = 5.0 if errmax == 0.0 else 0.9 * errmax ** -0.2
            if grow > 5.0:
                grow = 5.0
            if grow < 0.2:
                grow = 0.2
            h *= grow
        else:
            rejected += 1
            grow = 0.9 * errmax ** -0.25
            if grow < 0.1:
                grow = 0.1
            h *= grow
            if h < 1e-14:
                raise RuntimeError("step size underflow near a singular point")
    return (y[0], y[1], y[2], y[3]), steps, rejected
