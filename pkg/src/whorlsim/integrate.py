"""Fixed-step RK4 and adaptive Dormand-Prince integration of planar fields.

The inner loops live in the backend kernel (compiled when available); this
module wraps them in :class:`Trajectory` values and adds axis-crossing
detection on the cubic Hermite dense output.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import NamedTuple, Sequence

import numpy as np

from . import _backend
from .dynamics import PlanarField, Window

TERMINATIONS = {
    _backend.TIME_LIMIT: "time-limit",
    _backend.LEFT_WINDOW: "left-window",
    _backend.STEP_UNDERFLOW: "step-underflow",
    _backend.EQUILIBRIUM_CAPTURE: "equilibrium-capture",
}


@dataclass(frozen=True, eq=False)
class Trajectory:
    """Samples ``(t, x, y)`` of one integration run.

    Times are strictly increasing for forward runs and strictly decreasing
    for backward runs. Every sample lies inside the integration window
    except possibly the starting point.
    """

    t: np.ndarray
    x: np.ndarray
    y: np.ndarray
    termination: str = "time-limit"
    field: PlanarField | None = None
    n_accepted: int = 0
    message: str = ""

    def __len__(self):
        return len(self.t)

    @property
    def samples(self) -> np.ndarray:
        return np.column_stack([self.t, self.x, self.y])

    @property
    def start(self) -> tuple[float, float]:
        return float(self.x[0]), float(self.y[0])

    @property
    def end(self) -> tuple[float, float]:
        return float(self.x[-1]), float(self.y[-1])

    def dense(self, per_segment: int = 16, fld: PlanarField | None = None) -> np.ndarray:
        """Cubic Hermite dense output, ``per_segment`` points per step, as (N, 3)."""
        fld = fld or self.field
        if fld is None or len(self.t) < 2:
            return self.samples
        dx, dy = fld(self.x, self.y)
        dx = np.broadcast_to(dx, self.x.shape)
        dy = np.broadcast_to(dy, self.y.shape)
        s = np.arange(per_segment) / per_segment
        h = np.diff(self.t)[:, None]
        parts = [
            self.t[:-1, None] + s * h,
            _hermite(s, h, self.x[:-1, None], self.x[1:, None], dx[:-1, None], dx[1:, None]),
            _hermite(s, h, self.y[:-1, None], self.y[1:, None], dy[:-1, None], dy[1:, None]),
        ]
        body = np.stack([p.ravel() for p in parts], axis=1)
        return np.vstack([body, self.samples[-1:]])

    @classmethod
    def from_samples(cls, samples, termination="time-limit", fld=None):
        arr = np.asarray(samples, dtype=float).reshape(-1, 3)
        return cls(arr[:, 0].copy(), arr[:, 1].copy(), arr[:, 2].copy(), termination, fld)


@dataclass(frozen=True)
class IntegratorConfig:
    rel_tol: float = 1e-9
    abs_tol: float = 1e-12
    h_init: float = 1e-3
    h_min: float = 1e-12
    h_max: float = 0.1
    window: Window = field(default_factory=Window.unbounded)
    capture_radius: float | None = 1e-6

    def __post_init__(self):
        if not (0 < self.h_min <= self.h_init <= self.h_max):
            raise ValueError("need 0 < h_min <= h_init <= h_max")
        if not (self.rel_tol > 0 and self.abs_tol > 0):
            raise ValueError("tolerances must be positive")
        if self.capture_radius is not None and self.capture_radius < 0:
            raise ValueError("capture_radius must be nonnegative")
        object.__setattr__(self, "window", Window(*self.window))


def step_rk4(fld: PlanarField, state, h: float) -> tuple[float, float]:
    """One classical RK4 step. Raises NonFinite if a stage blows up."""
    if h == 0 or not math.isfinite(h):
        raise ValueError("step must be nonzero and finite")
    x, y = state
    return fld.kernel.rk4_step(float(x), float(y), float(h))


def integrate_fixed(
    fld: PlanarField,
    state,
    h: float,
    t_max: float,
    window: Window | None = None,
    backward: bool = False,
) -> Trajectory:
    if not (h > 0 and t_max > 0):
        raise ValueError("h and t_max must be positive")
    window = Window.unbounded() if window is None else Window(*window)
    x0, y0 = map(float, state)
    ts, xs, ys, code, msg = fld.kernel.integrate_fixed(
        x0, y0, -h if backward else h, float(t_max), tuple(window)
    )
    return Trajectory(
        np.asarray(ts), np.asarray(xs), np.asarray(ys), TERMINATIONS[code], fld,
        len(ts) - 1, msg,
    )


def integrate_adaptive(
    fld: PlanarField,
    state,
    config: IntegratorConfig | None = None,
    t_max: float = 10.0,
    backward: bool = False,
    equilibria: Sequence[tuple[float, float]] = (),
) -> Trajectory:
    """Integrate until ``t_max``, window exit, step underflow or capture.

    ``equilibria`` are the points checked against ``config.capture_radius``.
    """
    config = config or IntegratorConfig()
    if t_max < 0:
        raise ValueError("t_max must be nonnegative")
    x0, y0 = map(float, state)
    if config.capture_radius:
        eq_x = [float(p[0]) for p in equilibria]
        eq_y = [float(p[1]) for p in equilibria]
    else:
        eq_x, eq_y = [], []
    ts, xs, ys, code, naccept, msg = fld.kernel.integrate_adaptive(
        x0,
        y0,
        float(t_max),
        -1.0 if backward else 1.0,
        config.rel_tol,
        config.abs_tol,
        config.h_init,
        config.h_min,
        config.h_max,
        tuple(config.window),
        eq_x,
        eq_y,
        float(config.capture_radius or 0.0),
    )
    return Trajectory(
        np.asarray(ts), np.asarray(xs), np.asarray(ys), TERMINATIONS[code], fld, naccept, msg
    )


class Crossing(NamedTuple):
    t: float
    x: float
    direction: int  # +1 when y goes from negative to positive


def _hermite(s, h, p0, p1, m0, m1):
    s2 = s * s
    s3 = s2 * s
    return (
        (2 * s3 - 3 * s2 + 1) * p0
        + (s3 - 2 * s2 + s) * h * m0
        + (-2 * s3 + 3 * s2) * p1
        + (s3 - s2) * h * m1
    )


def axis_crossings(traj: Trajectory, fld: PlanarField | None = None) -> list[Crossing]:
    """Points where the trajectory crosses ``y = 0``, ordered by sample order.

    Each crossing is refined by bisection on the Hermite interpolant of its
    segment; without a field the segment is interpolated linearly.
    """
    fld = fld or traj.field
    t, x, y = traj.t, traj.x, traj.y
    out: list[Crossing] = []
    last = None  # index of last sample with nonzero y
    for i in range(len(t)):
        if y[i] == 0.0:
            continue
        if last is not None and (y[i] > 0) != (y[last] > 0):
            direction = 1 if y[i] > 0 else -1
            if i == last + 1:
                out.append(_refine(fld, t, x, y, last, direction))
            else:
                k = last + 1
                out.append(Crossing(float(t[k]), float(x[k]), direction))
        last = i
    return out


def _refine(fld, t, x, y, i, direction, tol=1e-12, max_iter=200):
    t0, t1 = float(t[i]), float(t[i + 1])
    h = t1 - t0
    x0, x1, y0, y1 = float(x[i]), float(x[i + 1]), float(y[i]), float(y[i + 1])
    if fld is not None:
        mx0, my0 = fld.kernel.eval(x0, y0)
        mx1, my1 = fld.kernel.eval(x1, y1)
    else:
        mx0 = mx1 = (x1 - x0) / h
        my0 = my1 = (y1 - y0) / h
    lo, hi = 0.0, 1.0
    s = 0.5
    for _ in range(max_iter):
        s = 0.5 * (lo + hi)
        ys = _hermite(s, h, y0, y1, my0, my1)
        if abs(ys) < tol:
            break
        if (ys > 0) == (y0 > 0):
            lo = s
        else:
            hi = s
    return Crossing(t0 + s * h, _hermite(s, h, x0, x1, mx0, mx1), direction)
