# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled integration kernels.

Operation order matches ``_kernels_py`` exactly; keep the two in step.
"""
from libc.math cimport atan2, hypot, isfinite, pow, fabs, ceil, NAN, M_PI

import numpy as np
cimport numpy as cnp

from .errors import NonFinite

cnp.import_array()

cdef enum:
    MAXDEG = 64

cdef int TIME_LIMIT = 0
cdef int LEFT_WINDOW = 1
cdef int STEP_UNDERFLOW = 2
cdef int EQUILIBRIUM_CAPTURE = 3

cdef double A21 = 1.0 / 5.0
cdef double A31 = 3.0 / 40.0
cdef double A32 = 9.0 / 40.0
cdef double A41 = 44.0 / 45.0
cdef double A42 = -56.0 / 15.0
cdef double A43 = 32.0 / 9.0
cdef double A51 = 19372.0 / 6561.0
cdef double A52 = -25360.0 / 2187.0
cdef double A53 = 64448.0 / 6561.0
cdef double A54 = -212.0 / 729.0
cdef double A61 = 9017.0 / 3168.0
cdef double A62 = -355.0 / 33.0
cdef double A63 = 46732.0 / 5247.0
cdef double A64 = 49.0 / 176.0
cdef double A65 = -5103.0 / 18656.0
cdef double B1 = 35.0 / 384.0
cdef double B3 = 500.0 / 1113.0
cdef double B4 = 125.0 / 192.0
cdef double B5 = -2187.0 / 6784.0
cdef double B6 = 11.0 / 84.0
cdef double E1 = 71.0 / 57600.0
cdef double E3 = -71.0 / 16695.0
cdef double E4 = 71.0 / 1920.0
cdef double E5 = -17253.0 / 339200.0
cdef double E6 = 22.0 / 525.0
cdef double E7 = -1.0 / 40.0
cdef double SAFETY = 0.9
cdef double GROW_MAX = 5.0
cdef double SHRINK_MIN = 0.2


cdef inline bint _finite2(double a, double b) nogil:
    return isfinite(a) and isfinite(b)


cdef class FieldKernel:
    cdef int np_, nq, max_i, max_j
    cdef int[MAXDEG] pi_, pj, qi, qj
    cdef double[MAXDEG] pc, qc
    cdef public object p_terms, q_terms

    backend = "cython"

    def __init__(self, p_terms, q_terms):
        self.p_terms = [(int(i), int(j), float(c)) for i, j, c in p_terms]
        self.q_terms = [(int(i), int(j), float(c)) for i, j, c in q_terms]
        if len(self.p_terms) > MAXDEG or len(self.q_terms) > MAXDEG:
            raise ValueError("too many terms for the compiled kernel")
        self.max_i = 0
        self.max_j = 0
        self.np_ = len(self.p_terms)
        self.nq = len(self.q_terms)
        for k, (i, j, c) in enumerate(self.p_terms):
            self.pi_[k] = i
            self.pj[k] = j
            self.pc[k] = c
            self.max_i = max(self.max_i, i)
            self.max_j = max(self.max_j, j)
        for k, (i, j, c) in enumerate(self.q_terms):
            self.qi[k] = i
            self.qj[k] = j
            self.qc[k] = c
            self.max_i = max(self.max_i, i)
            self.max_j = max(self.max_j, j)
        if self.max_i >= MAXDEG or self.max_j >= MAXDEG:
            raise ValueError("degree too high for the compiled kernel")

    cdef inline void _eval(self, double x, double y, double* p, double* q) noexcept nogil:
        cdef double xp[MAXDEG]
        cdef double yp[MAXDEG]
        cdef int k
        cdef double acc
        xp[0] = 1.0
        yp[0] = 1.0
        for k in range(1, self.max_i + 1):
            xp[k] = xp[k - 1] * x
        for k in range(1, self.max_j + 1):
            yp[k] = yp[k - 1] * y
        acc = 0.0
        for k in range(self.np_):
            acc = acc + self.pc[k] * xp[self.pi_[k]] * yp[self.pj[k]]
        p[0] = acc
        acc = 0.0
        for k in range(self.nq):
            acc = acc + self.qc[k] * xp[self.qi[k]] * yp[self.qj[k]]
        q[0] = acc

    def eval(self, double x, double y):
        cdef double p, q
        self._eval(x, y, &p, &q)
        return p, q

    cdef int _rk4(self, double x, double y, double h, double* xn, double* yn) noexcept nogil:
        cdef double h2 = 0.5 * h
        cdef double k1x, k1y, k2x, k2y, k3x, k3y, k4x, k4y, h6
        self._eval(x, y, &k1x, &k1y)
        self._eval(x + h2 * k1x, y + h2 * k1y, &k2x, &k2y)
        self._eval(x + h2 * k2x, y + h2 * k2y, &k3x, &k3y)
        self._eval(x + h * k3x, y + h * k3y, &k4x, &k4y)
        if not (_finite2(k1x, k1y) and _finite2(k2x, k2y)
                and _finite2(k3x, k3y) and _finite2(k4x, k4y)):
            return 1
        h6 = h / 6.0
        xn[0] = x + h6 * (k1x + 2.0 * k2x + 2.0 * k3x + k4x)
        yn[0] = y + h6 * (k1y + 2.0 * k2y + 2.0 * k3y + k4y)
        return 0

    def rk4_step(self, double x, double y, double h):
        cdef double xn, yn
        if self._rk4(x, y, h, &xn, &yn):
            raise NonFinite("in RK4 stage", (x, y))
        return xn, yn

    def integrate_fixed(self, double x0, double y0, double h, double t_max, window):
        cdef double wx0, wx1, wy0, wy1
        wx0, wx1, wy0, wy1 = window
        cdef double direction = 1.0 if h > 0 else -1.0
        cdef double ha = fabs(h)
        cdef long n = <long>ceil(t_max / ha * (1.0 - 1e-12))
        cdef long k
        cdef double x = x0, y = y0, tau, step
        cdef int code = TIME_LIMIT
        ts = [0.0]
        xs = [x0]
        ys = [y0]
        msg = ""
        if not (wx0 <= x0 <= wx1 and wy0 <= y0 <= wy1):
            return ts, xs, ys, LEFT_WINDOW, msg
        for k in range(1, n + 1):
            tau = t_max if k == n else k * ha
            step = tau - (k - 1) * ha
            if self._rk4(x, y, direction * step, &x, &y):
                code = STEP_UNDERFLOW
                msg = str(NonFinite("in RK4 stage", (x, y)))
                break
            if not _finite2(x, y):
                code = STEP_UNDERFLOW
                msg = "non-finite state"
                break
            if not (wx0 <= x <= wx1 and wy0 <= y <= wy1):
                code = LEFT_WINDOW
                break
            ts.append(direction * tau)
            xs.append(x)
            ys.append(y)
        return ts, xs, ys, code, msg

    def integrate_adaptive(self, double x0, double y0, double t_max, double direction,
                           double rtol, double atol, double h_init, double h_min,
                           double h_max, window, eq_x, eq_y, double capture_radius):
        cdef double wx0, wx1, wy0, wy1
        wx0, wx1, wy0, wy1 = window
        cdef Py_ssize_t neq = len(eq_x), e
        cdef cnp.ndarray[cnp.float64_t, ndim=1] ex_arr = np.asarray(eq_x, dtype=np.float64)
        cdef cnp.ndarray[cnp.float64_t, ndim=1] ey_arr = np.asarray(eq_y, dtype=np.float64)
        cdef double x = x0, y = y0, xn, yn, tau = 0.0, h = h_init
        cdef double remaining, hs, s, err, factor, scx, scy, exx, eyy, dx, dy
        cdef double cap2 = capture_radius * capture_radius
        cdef double k1x, k1y, k2x, k2y, k3x, k3y, k4x, k4y, k5x, k5y, k6x, k6y, k7x, k7y
        cdef bint last, captured
        cdef long naccept = 0
        cdef int code = TIME_LIMIT
        ts = [0.0]
        xs = [x0]
        ys = [y0]
        msg = ""
        if not (wx0 <= x0 <= wx1 and wy0 <= y0 <= wy1):
            return ts, xs, ys, LEFT_WINDOW, 0, ""
        self._eval(x, y, &k1x, &k1y)
        if not _finite2(k1x, k1y):
            return ts, xs, ys, STEP_UNDERFLOW, 0, "non-finite field at start"
        while True:
            remaining = t_max - tau
            if remaining <= 0.0:
                break
            last = h >= remaining
            hs = remaining if last else h
            s = direction * hs
            self._eval(x + s * (A21 * k1x), y + s * (A21 * k1y), &k2x, &k2y)
            self._eval(x + s * (A31 * k1x + A32 * k2x), y + s * (A31 * k1y + A32 * k2y),
                       &k3x, &k3y)
            self._eval(x + s * (A41 * k1x + A42 * k2x + A43 * k3x),
                       y + s * (A41 * k1y + A42 * k2y + A43 * k3y), &k4x, &k4y)
            self._eval(x + s * (A51 * k1x + A52 * k2x + A53 * k3x + A54 * k4x),
                       y + s * (A51 * k1y + A52 * k2y + A53 * k3y + A54 * k4y), &k5x, &k5y)
            self._eval(x + s * (A61 * k1x + A62 * k2x + A63 * k3x + A64 * k4x + A65 * k5x),
                       y + s * (A61 * k1y + A62 * k2y + A63 * k3y + A64 * k4y + A65 * k5y),
                       &k6x, &k6y)
            xn = x + s * (B1 * k1x + B3 * k3x + B4 * k4x + B5 * k5x + B6 * k6x)
            yn = y + s * (B1 * k1y + B3 * k3y + B4 * k4y + B5 * k5y + B6 * k6y)
            self._eval(xn, yn, &k7x, &k7y)
            exx = s * (E1 * k1x + E3 * k3x + E4 * k4x + E5 * k5x + E6 * k6x + E7 * k7x)
            eyy = s * (E1 * k1y + E3 * k3y + E4 * k4y + E5 * k5y + E6 * k6y + E7 * k7y)
            scx = atol + rtol * max(fabs(x), fabs(xn))
            scy = atol + rtol * max(fabs(y), fabs(yn))
            err = max(fabs(exx) / scx, fabs(eyy) / scy)
            if not (isfinite(err) and _finite2(k7x, k7y)) or err > 1.0:
                if hs <= h_min:
                    code = STEP_UNDERFLOW
                    msg = f"step size fell below h_min={h_min!r} at t={direction * tau!r}"
                    break
                if isfinite(err):
                    factor = max(SHRINK_MIN, SAFETY * pow(err, -0.2))
                else:
                    factor = SHRINK_MIN
                h = max(h_min, hs * min(1.0, factor))
                continue
            tau = t_max if last else tau + hs
            if not (wx0 <= xn <= wx1 and wy0 <= yn <= wy1):
                code = LEFT_WINDOW
                break
            x = xn
            y = yn
            k1x = k7x
            k1y = k7y
            naccept += 1
            ts.append(direction * tau)
            xs.append(x)
            ys.append(y)
            captured = False
            for e in range(neq):
                dx = x - ex_arr[e]
                dy = y - ey_arr[e]
                if dx * dx + dy * dy < cap2:
                    captured = True
                    break
            if captured:
                code = EQUILIBRIUM_CAPTURE
                break
            if err == 0.0:
                factor = GROW_MAX
            else:
                factor = min(GROW_MAX, max(SHRINK_MIN, SAFETY * pow(err, -0.2)))
            h = min(h_max, max(h_min, hs * factor))
        return ts, xs, ys, code, naccept, msg

    def orientation_grid(self, xs, ys, double floor):
        cdef cnp.ndarray[cnp.float64_t, ndim=1] xa = np.ascontiguousarray(xs, dtype=np.float64)
        cdef cnp.ndarray[cnp.float64_t, ndim=1] ya = np.ascontiguousarray(ys, dtype=np.float64)
        cdef Py_ssize_t nr = ya.shape[0], nc = xa.shape[0], r, c
        cdef cnp.ndarray[cnp.float64_t, ndim=2] out = np.empty((nr, nc))
        cdef double p, q, a
        for r in range(nr):
            for c in range(nc):
                self._eval(xa[c], ya[r], &p, &q)
                if not (hypot(p, q) >= floor):
                    out[r, c] = NAN
                    continue
                a = atan2(q, p)
                if a < 0.0:
                    a += M_PI
                if a >= M_PI:
                    a -= M_PI
                out[r, c] = a
        return out
