"""Pure-Python integration kernels.

Mirrors ``_kernels.pyx`` operation for operation so both backends produce
the same floating point results. Used when the compiled extension is not
built or when ``WHORLSIM_PURE_PYTHON`` is set.
"""
import math

import numpy as np

from .errors import NonFinite

TIME_LIMIT = 0
LEFT_WINDOW = 1
STEP_UNDERFLOW = 2
EQUILIBRIUM_CAPTURE = 3

# Dormand-Prince 5(4)
A21 = 1.0 / 5.0
A31, A32 = 3.0 / 40.0, 9.0 / 40.0
A41, A42, A43 = 44.0 / 45.0, -56.0 / 15.0, 32.0 / 9.0
A51, A52, A53, A54 = 19372.0 / 6561.0, -25360.0 / 2187.0, 64448.0 / 6561.0, -212.0 / 729.0
A61, A62, A63, A64, A65 = (
    9017.0 / 3168.0,
    -355.0 / 33.0,
    46732.0 / 5247.0,
    49.0 / 176.0,
    -5103.0 / 18656.0,
)
B1, B3, B4, B5, B6 = 35.0 / 384.0, 500.0 / 1113.0, 125.0 / 192.0, -2187.0 / 6784.0, 11.0 / 84.0
E1, E3, E4, E5, E6, E7 = (
    71.0 / 57600.0,
    -71.0 / 16695.0,
    71.0 / 1920.0,
    -17253.0 / 339200.0,
    22.0 / 525.0,
    -1.0 / 40.0,
)
SAFETY = 0.9
GROW_MAX = 5.0
SHRINK_MIN = 0.2


def _finite(a, b):
    return math.isfinite(a) and math.isfinite(b)


class FieldKernel:
    """Compiled-form view of a polynomial field.

    ``p_terms``/``q_terms`` are sequences of ``(i, j, coefficient)`` in
    exponent-pair order.
    """

    backend = "python"

    def __init__(self, p_terms, q_terms):
        self.p_terms = [(int(i), int(j), float(c)) for i, j, c in p_terms]
        self.q_terms = [(int(i), int(j), float(c)) for i, j, c in q_terms]
        terms = self.p_terms + self.q_terms
        self.max_i = max((t[0] for t in terms), default=0)
        self.max_j = max((t[1] for t in terms), default=0)

    def eval(self, x, y):
        xp = [1.0] * (self.max_i + 1)
        yp = [1.0] * (self.max_j + 1)
        for k in range(1, self.max_i + 1):
            xp[k] = xp[k - 1] * x
        for k in range(1, self.max_j + 1):
            yp[k] = yp[k - 1] * y
        p = 0.0
        for i, j, c in self.p_terms:
            p = p + c * xp[i] * yp[j]
        q = 0.0
        for i, j, c in self.q_terms:
            q = q + c * xp[i] * yp[j]
        return p, q

    def rk4_step(self, x, y, h):
        f = self.eval
        h2 = 0.5 * h
        k1x, k1y = f(x, y)
        k2x, k2y = f(x + h2 * k1x, y + h2 * k1y)
        k3x, k3y = f(x + h2 * k2x, y + h2 * k2y)
        k4x, k4y = f(x + h * k3x, y + h * k3y)
        if not (
            _finite(k1x, k1y) and _finite(k2x, k2y) and _finite(k3x, k3y) and _finite(k4x, k4y)
        ):
            raise NonFinite("in RK4 stage", (x, y))
        h6 = h / 6.0
        xn = x + h6 * (k1x + 2.0 * k2x + 2.0 * k3x + k4x)
        yn = y + h6 * (k1y + 2.0 * k2y + 2.0 * k3y + k4y)
        return xn, yn

    def integrate_fixed(self, x0, y0, h, t_max, window):
        """RK4 with step ``|h|``; the sign of ``h`` sets the time direction."""
        wx0, wx1, wy0, wy1 = window
        direction = 1.0 if h > 0 else -1.0
        ha = abs(h)
        n = int(math.ceil(t_max / ha * (1.0 - 1e-12)))
        ts = [0.0]
        xs = [x0]
        ys = [y0]
        msg = ""
        if not (wx0 <= x0 <= wx1 and wy0 <= y0 <= wy1):
            return ts, xs, ys, LEFT_WINDOW, msg
        x, y = x0, y0
        code = TIME_LIMIT
        for k in range(1, n + 1):
            tau = t_max if k == n else k * ha
            step = tau - (k - 1) * ha
            try:
                x, y = self.rk4_step(x, y, direction * step)
            except NonFinite as exc:
                code = STEP_UNDERFLOW
                msg = str(exc)
                break
            if not (_finite(x, y)):
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

    def integrate_adaptive(
        self,
        x0,
        y0,
        t_max,
        direction,
        rtol,
        atol,
        h_init,
        h_min,
        h_max,
        window,
        eq_x,
        eq_y,
        capture_radius,
    ):
        """Dormand-Prince 5(4) with local extrapolation.

        Returns ``(ts, xs, ys, code, n_accepted, message)``.
        """
        f = self.eval
        wx0, wx1, wy0, wy1 = window
        neq = len(eq_x)
        ts = [0.0]
        xs = [x0]
        ys = [y0]
        if not (wx0 <= x0 <= wx1 and wy0 <= y0 <= wy1):
            return ts, xs, ys, LEFT_WINDOW, 0, ""
        x, y = x0, y0
        k1x, k1y = f(x, y)
        if not _finite(k1x, k1y):
            return ts, xs, ys, STEP_UNDERFLOW, 0, "non-finite field at start"
        tau = 0.0
        h = h_init
        naccept = 0
        code = TIME_LIMIT
        msg = ""
        cap2 = capture_radius * capture_radius
        while True:
            remaining = t_max - tau
            if remaining <= 0.0:
                break
            last = h >= remaining
            hs = remaining if last else h
            s = direction * hs
            k2x, k2y = f(x + s * (A21 * k1x), y + s * (A21 * k1y))
            k3x, k3y = f(x + s * (A31 * k1x + A32 * k2x), y + s * (A31 * k1y + A32 * k2y))
            k4x, k4y = f(
                x + s * (A41 * k1x + A42 * k2x + A43 * k3x),
                y + s * (A41 * k1y + A42 * k2y + A43 * k3y),
            )
            k5x, k5y = f(
                x + s * (A51 * k1x + A52 * k2x + A53 * k3x + A54 * k4x),
                y + s * (A51 * k1y + A52 * k2y + A53 * k3y + A54 * k4y),
            )
            k6x, k6y = f(
                x + s * (A61 * k1x + A62 * k2x + A63 * k3x + A64 * k4x + A65 * k5x),
                y + s * (A61 * k1y + A62 * k2y + A63 * k3y + A64 * k4y + A65 * k5y),
            )
            xn = x + s * (B1 * k1x + B3 * k3x + B4 * k4x + B5 * k5x + B6 * k6x)
            yn = y + s * (B1 * k1y + B3 * k3y + B4 * k4y + B5 * k5y + B6 * k6y)
            k7x, k7y = f(xn, yn)
            ex = s * (E1 * k1x + E3 * k3x + E4 * k4x + E5 * k5x + E6 * k6x + E7 * k7x)
            ey = s * (E1 * k1y + E3 * k3y + E4 * k4y + E5 * k5y + E6 * k6y + E7 * k7y)
            scx = atol + rtol * max(abs(x), abs(xn))
            scy = atol + rtol * max(abs(y), abs(yn))
            err = max(abs(ex) / scx, abs(ey) / scy)
            if not (math.isfinite(err) and _finite(k7x, k7y)) or err > 1.0:
                if hs <= h_min:
                    code = STEP_UNDERFLOW
                    msg = f"step size fell below h_min={h_min!r} at t={direction * tau!r}"
                    break
                if math.isfinite(err):
                    factor = max(SHRINK_MIN, SAFETY * err ** -0.2)
                else:
                    factor = SHRINK_MIN
                h = max(h_min, hs * min(1.0, factor))
                continue
            tau = t_max if last else tau + hs
            if not (wx0 <= xn <= wx1 and wy0 <= yn <= wy1):
                code = LEFT_WINDOW
                break
            x, y = xn, yn
            k1x, k1y = k7x, k7y
            naccept += 1
            ts.append(direction * tau)
            xs.append(x)
            ys.append(y)
            captured = False
            for e in range(neq):
                dx = x - eq_x[e]
                dy = y - eq_y[e]
                if dx * dx + dy * dy < cap2:
                    captured = True
                    break
            if captured:
                code = EQUILIBRIUM_CAPTURE
                break
            if err == 0.0:
                factor = GROW_MAX
            else:
                factor = min(GROW_MAX, max(SHRINK_MIN, SAFETY * err ** -0.2))
            h = min(h_max, max(h_min, hs * factor))
        return ts, xs, ys, code, naccept, msg

    def orientation_grid(self, xs, ys, floor):
        """Angles in [0, pi) of the field at every (xs[c], ys[r]); NaN below ``floor``."""
        xs = np.asarray(xs, dtype=float)
        ys = np.asarray(ys, dtype=float)
        out = np.empty((len(ys), len(xs)))
        for r in range(len(ys)):
            for c in range(len(xs)):
                p, q = self.eval(xs[c], ys[r])
                if not (math.hypot(p, q) >= floor):
                    out[r, c] = math.nan
                    continue
                a = math.atan2(q, p)
                if a < 0.0:
                    a += math.pi
                if a >= math.pi:
                    a -= math.pi
                out[r, c] = a
        return out
