"""Phase portraits, cusp separatrices and orientation images."""
from __future__ import annotations

import math
from dataclasses import dataclass, field, replace
from typing import Sequence, Union

import numpy as np

from .dynamics import PlanarField, Window
from .equilibria import CUSP, EquilibriumReport, analyze, find_equilibria
from .errors import WhorlError
from .integrate import IntegratorConfig, Trajectory, integrate_adaptive


STREAMLINE = "streamline"
SEPARATRIX = "separatrix"

DEFAULT_WINDOW = Window(-1.6, 1.6, -1.2, 1.2)
DEFAULT_RING_RADII = (0.15, 0.3, 0.45, 0.6)
SEPARATRIX_EPS = 1e-4
SEPARATRIX_T = 300.0
MIN_SEPARATRIX_STEPS = 10
FIELD_FLOOR = 1e-12
MASK_FRACTION = 0.05


@dataclass(frozen=True)
class GridSeeds:
    """Centers of an ``nx x ny`` cell grid over the window."""

    nx: int
    ny: int

    def points(self, window: Window):
        dx = window.width / self.nx
        dy = window.height / self.ny
        return [
            (window.x0 + (i + 0.5) * dx, window.y1 - (j + 0.5) * dy)
            for j in range(self.ny)
            for i in range(self.nx)
        ]


@dataclass(frozen=True)
class RingSeeds:
    center: tuple[float, float]
    radii: tuple[float, ...]
    count: int

    def points(self, window: Window):
        cx, cy = self.center
        return [
            (cx + r * math.cos(2 * math.pi * k / self.count),
             cy + r * math.sin(2 * math.pi * k / self.count))
            for r in self.radii
            for k in range(self.count)
        ]


@dataclass(frozen=True)
class ExplicitSeeds:
    pts: tuple[tuple[float, float], ...] = ()

    def points(self, window: Window):
        return [tuple(map(float, p)) for p in self.pts]


SeedStrategy = Union[GridSeeds, RingSeeds, ExplicitSeeds]


def default_seeds() -> tuple[SeedStrategy, ...]:
    return (RingSeeds((0.0, 0.0), DEFAULT_RING_RADII, 8), GridSeeds(6, 4))


@dataclass(frozen=True)
class PortraitSpec:
    field: PlanarField
    window: Window = DEFAULT_WINDOW
    seeds: tuple[SeedStrategy, ...] = field(default_factory=default_seeds)
    t_forward: float = 20.0
    t_backward: float = 20.0
    integrator: IntegratorConfig = field(default_factory=IntegratorConfig)
    include_separatrices: bool = False
    separatrix_eps: float = SEPARATRIX_EPS
    separatrix_t: float = SEPARATRIX_T

    def __post_init__(self):
        object.__setattr__(self, "window", Window(*self.window).checked())
        if isinstance(self.seeds, (GridSeeds, RingSeeds, ExplicitSeeds)):
            object.__setattr__(self, "seeds", (self.seeds,))
        if self.t_forward < 0 or self.t_backward < 0 or self.separatrix_t < 0:
            raise ValueError("time horizons must be nonnegative")

    def seed_points(self) -> list[tuple[float, float]]:
        pts = []
        for strategy in self.seeds:
            pts.extend(strategy.points(self.window))
        return pts


@dataclass(frozen=True)
class Curve:
    role: str
    trajectory: Trajectory
    seed_index: int


@dataclass
class Portrait:
    window: Window
    curves: list[Curve]
    equilibria: list[EquilibriumReport]
    failures: list[tuple[int, str]] = field(default_factory=list)

    @property
    def trajectories(self) -> list[Trajectory]:
        return [c.trajectory for c in self.curves]

    def by_role(self, role: str) -> list[Trajectory]:
        return [c.trajectory for c in self.curves if c.role == role]


def trace_separatrices(
    fld: PlanarField,
    cusps: Sequence[tuple[float, float]],
    eps: float = SEPARATRIX_EPS,
    config: IntegratorConfig | None = None,
    t_max: float = SEPARATRIX_T,
    equilibria: Sequence[tuple[float, float]] | None = None,
    min_steps: int = MIN_SEPARATRIX_STEPS,
) -> list[Trajectory]:
    """Launch from ``(x* +- eps, y*)`` at each cusp, forward and backward.

    Launches that take fewer than ``min_steps`` accepted steps before
    leaving the window are dropped.
    """
    if not 0 < eps < 1:
        raise ValueError("eps must lie in (0, 1)")
    config = config or IntegratorConfig()
    stops = list(cusps) if equilibria is None else list(equilibria)
    out = []
    for cx, cy in cusps:
        for dx in (eps, -eps):
            for backward in (False, True):
                traj = integrate_adaptive(
                    fld, (cx + dx, cy), config, t_max, backward=backward, equilibria=stops
                )
                if traj.n_accepted < min_steps:
                    continue
                out.append(traj)
    return out


def compute_portrait(spec: PortraitSpec) -> Portrait:
    fld = spec.field
    config = replace(spec.integrator, window=spec.window)
    reports = analyze(fld, spec.window)
    eq_points = [r.location for r in reports]
    curves: list[Curve] = []
    failures: list[tuple[int, str]] = []
    for idx, seed in enumerate(spec.seed_points()):
        for horizon, backward in ((spec.t_forward, False), (spec.t_backward, True)):
            if horizon <= 0:
                continue
            try:
                traj = integrate_adaptive(
                    fld, seed, config, horizon, backward=backward, equilibria=eq_points
                )
            except WhorlError as exc:
                failures.append((idx, str(exc)))
                continue
            if traj.termination == "step-underflow":
                failures.append((idx, traj.message))
            if len(traj) >= 2:
                curves.append(Curve(STREAMLINE, traj, idx))
    if spec.include_separatrices:
        cusps = [r.location for r in reports if r.kind == CUSP]
        try:
            seps = trace_separatrices(
                fld, cusps, spec.separatrix_eps, config, spec.separatrix_t, eq_points
            )
        except WhorlError as exc:
            failures.append((-1, str(exc)))
            seps = []
        curves.extend(Curve(SEPARATRIX, t, -1) for t in seps)
    return Portrait(spec.window, curves, reports, failures)


@dataclass(frozen=True, eq=False)
class OrientationField:
    """Ridge angles in [0, pi) on a ``height x width`` grid, top row first.

    Masked cells hold NaN in ``angles``.
    """

    width: int
    height: int
    angles: np.ndarray
    mask: np.ndarray
    window: Window | None = None

    def cell_centers(self):
        return _cell_centers(self.window, self.width, self.height)


def _cell_centers(window: Window, width: int, height: int):
    dx = window.width / width
    dy = window.height / height
    xs = np.array([window.x0 + (c + 0.5) * dx for c in range(width)])
    ys = np.array([window.y1 - (r + 0.5) * dy for r in range(height)])
    return xs, ys


def orientation_field(
    fld: PlanarField,
    window: Window,
    width: int,
    height: int,
    mask_radius: float | None = None,
    field_floor: float = FIELD_FLOOR,
    equilibria: Sequence[tuple[float, float]] | None = None,
) -> OrientationField:
    """Flow direction modulo pi sampled at cell centers.

    Cells within ``mask_radius`` (default 5% of the window width) of an
    equilibrium, or where the field magnitude is below ``field_floor``,
    are masked.
    """
    if width < 2 or height < 2:
        raise ValueError("grid must be at least 2x2")
    window = Window(*window).checked()
    if mask_radius is None:
        mask_radius = MASK_FRACTION * window.width
    if equilibria is None:
        equilibria = find_equilibria(fld, window)
    xs, ys = _cell_centers(window, width, height)
    angles = fld.kernel.orientation_grid(xs, ys, field_floor)
    mask = np.isnan(angles)
    X, Y = np.meshgrid(xs, ys, indexing="xy")
    for ex, ey in equilibria:
        mask |= np.hypot(X - ex, Y - ey) < mask_radius
    angles = np.where(mask, np.nan, angles)
    return OrientationField(width, height, angles, mask, window)
