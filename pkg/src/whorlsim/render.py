"""SVG, PGM and CSV serializers.

All writers are deterministic: the same input always yields the same bytes.

SVG output uses only ``svg``, ``polyline``, ``circle``, ``rect`` and
``line`` elements. Window coordinates map affinely onto the canvas with the
y axis flipped. Equilibrium glyphs: circle for centers and foci, filled
square for nodes, cross for cusps, diamond for everything else.

PGM output is binary ``P5`` with maxval 255. Unmasked cells map angles in
[0, pi) onto gray levels 0..254; masked cells are 255.
"""
from __future__ import annotations

import io
import math
from dataclasses import dataclass

import numpy as np

from .equilibria import (
    CENTER, CUSP, DEGENERATE_NODE, FOCUS_OR_CENTER, NODE_DEGENERATE, STABLE_FOCUS,
    STABLE_NODE, UNSTABLE_FOCUS, UNSTABLE_NODE,
)
from .integrate import Trajectory
from .portrait import SEPARATRIX, OrientationField, Portrait

CIRCLE_KINDS = frozenset({CENTER, STABLE_FOCUS, UNSTABLE_FOCUS, FOCUS_OR_CENTER})
SQUARE_KINDS = frozenset({STABLE_NODE, UNSTABLE_NODE, DEGENERATE_NODE, NODE_DEGENERATE})
MASKED = 255
GRAY_MAX = 254


@dataclass(frozen=True)
class SvgStyle:
    width: int = 800
    height: int = 600
    stroke_width: float = 1.0
    streamline_color: str = "#3b6ea5"
    separatrix_color: str = "#c0392b"
    axis_color: str = "#bbbbbb"
    glyph_size: float = 6.0
    precision: int = 3

    def __post_init__(self):
        if self.width <= 0 or self.height <= 0 or self.stroke_width <= 0 or self.glyph_size <= 0:
            raise ValueError("style dimensions must be positive")
        if not 1 <= self.precision <= 6:
            raise ValueError("precision must be in [1, 6]")


def _num(v: float, precision: int) -> str:
    s = f"{v:.{precision}f}"
    if s.startswith("-") and not s.strip("-0."):
        s = s[1:]
    return s


def render_svg(portrait: Portrait, style: SvgStyle | None = None) -> str:
    style = style or SvgStyle()
    w = portrait.window
    W, H, p = style.width, style.height, style.precision

    def to_view(x, y):
        return (x - w.x0) / w.width * W, (w.y1 - y) / w.height * H

    def fmt(v):
        return _num(v, p)

    out = io.StringIO()
    out.write('<?xml version="1.0" encoding="UTF-8"?>\n')
    out.write(
        f'<svg xmlns="http://www.w3.org/2000/svg" version="1.1" width="{W}" height="{H}" '
        f'viewBox="0 0 {W} {H}">\n'
    )
    ax, ay = to_view(0.0, 0.0)
    if w.y0 <= 0.0 <= w.y1:
        out.write(
            f'<line class="axis" x1="0" y1="{fmt(ay)}" x2="{W}" y2="{fmt(ay)}" '
            f'stroke="{style.axis_color}" stroke-width="{fmt(style.stroke_width / 2)}"/>\n'
        )
    if w.x0 <= 0.0 <= w.x1:
        out.write(
            f'<line class="axis" x1="{fmt(ax)}" y1="0" x2="{fmt(ax)}" y2="{H}" '
            f'stroke="{style.axis_color}" stroke-width="{fmt(style.stroke_width / 2)}"/>\n'
        )
    for curve in portrait.curves:
        traj = curve.trajectory
        color = style.separatrix_color if curve.role == SEPARATRIX else style.streamline_color
        vx, vy = to_view(traj.x, traj.y)
        pts = " ".join(f"{fmt(a)},{fmt(b)}" for a, b in zip(vx.tolist(), vy.tolist()))
        out.write(
            f'<polyline class="{curve.role}" points="{pts}" fill="none" '
            f'stroke="{color}" stroke-width="{fmt(style.stroke_width)}"/>\n'
        )
    g = style.glyph_size
    for rep in portrait.equilibria:
        cx, cy = to_view(*rep.location)
        kind = rep.kind
        if kind in CIRCLE_KINDS:
            out.write(
                f'<circle class="{kind}" cx="{fmt(cx)}" cy="{fmt(cy)}" r="{fmt(g / 2)}" '
                f'fill="none" stroke="black" stroke-width="{fmt(style.stroke_width)}"/>\n'
            )
        elif kind in SQUARE_KINDS:
            out.write(
                f'<rect class="{kind}" x="{fmt(cx - g / 2)}" y="{fmt(cy - g / 2)}" '
                f'width="{fmt(g)}" height="{fmt(g)}" fill="black"/>\n'
            )
        elif kind == CUSP:
            h = g / 2
            for x1, y1, x2, y2 in ((cx - h, cy - h, cx + h, cy + h), (cx - h, cy + h, cx + h, cy - h)):
                out.write(
                    f'<line class="{kind}" x1="{fmt(x1)}" y1="{fmt(y1)}" x2="{fmt(x2)}" '
                    f'y2="{fmt(y2)}" stroke="black" '
                    f'stroke-width="{fmt(style.stroke_width * 1.5)}"/>\n'
                )
        else:
            side = g / math.sqrt(2)
            out.write(
                f'<rect class="{kind}" x="{fmt(cx - side / 2)}" y="{fmt(cy - side / 2)}" '
                f'width="{fmt(side)}" height="{fmt(side)}" fill="none" stroke="black" '
                f'transform="rotate(45 {fmt(cx)} {fmt(cy)})"/>\n'
            )
    out.write("</svg>\n")
    return out.getvalue()


def quantize_angle(angle: float) -> int:
    a = math.fmod(angle, math.pi)
    if a < 0:
        a += math.pi
    if a >= math.pi:
        a = 0.0
    return min(GRAY_MAX, int(math.floor(255.0 * a / math.pi + 0.5)))


def write_pgm(of: OrientationField) -> bytes:
    header = f"P5\n{of.width} {of.height}\n255\n".encode("ascii")
    payload = bytearray(of.width * of.height)
    angles = np.asarray(of.angles, dtype=float).reshape(of.height, of.width)
    mask = np.asarray(of.mask, dtype=bool).reshape(of.height, of.width)
    k = 0
    for r in range(of.height):
        for c in range(of.width):
            a = angles[r, c]
            payload[k] = MASKED if mask[r, c] or math.isnan(a) else quantize_angle(a)
            k += 1
    return header + bytes(payload)


def _short(v: float) -> str:
    s = repr(float(v))
    return s[:-2] if s.endswith(".0") else s


def write_csv(traj: Trajectory) -> str:
    lines = ["t,x,y"]
    for t, x, y in zip(traj.t.tolist(), traj.x.tolist(), traj.y.tolist()):
        lines.append(f"{_short(t)},{_short(x)},{_short(y)}")
    return "\n".join(lines) + "\n"


def read_csv(text: str) -> Trajectory:
    rows = text.splitlines()
    if not rows or rows[0] != "t,x,y":
        raise ValueError("missing t,x,y header")
    samples = [tuple(float(v) for v in row.split(",")) for row in rows[1:] if row]
    return Trajectory.from_samples(samples)


def write_orientation_csv(of: OrientationField) -> str:
    """One row per cell: ``row,col,x,y,angle`` with an empty angle when masked."""
    xs, ys = of.cell_centers()
    lines = ["row,col,x,y,angle"]
    for r in range(of.height):
        for c in range(of.width):
            a = of.angles[r, c]
            cell = "" if of.mask[r, c] or math.isnan(a) else _short(a)
            lines.append(f"{r},{c},{_short(xs[c])},{_short(ys[r])},{cell}")
    return "\n".join(lines) + "\n"
