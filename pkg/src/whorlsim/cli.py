"""Command-line front end.

Exit codes: 0 success, 1 usage error, 2 field parse error, 3 numerical
failure. Diagnostics go to stderr; output files are written atomically.
"""
from __future__ import annotations

import argparse
import os
import sys
import tempfile

import numpy as np

from .dynamics import PlanarField, Window, whorl_family
from .equilibria import analyze
from .errors import FieldSyntaxError, NumericalError, UnboundParam
from .integrate import IntegratorConfig, integrate_adaptive
from .portrait import (
    DEFAULT_WINDOW, ExplicitSeeds, GridSeeds, PortraitSpec, RingSeeds, compute_portrait,
    default_seeds, orientation_field,
)
from .render import SvgStyle, render_svg, write_csv, write_orientation_csv, write_pgm

PRESETS = {
    "concentric": 0.0,
    "spiral-ur-ll": 0.2,
    "spiral-lr-ul": -0.2,
    "composite-s": 0.9,
}

EXIT_OK, EXIT_USAGE, EXIT_PARSE, EXIT_NUMERIC = 0, 1, 2, 3


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(f"{self.prog}: error: {message}")


def _window(text):
    try:
        return Window.parse(text)
    except ValueError as exc:
        raise argparse.ArgumentTypeError(str(exc)) from None


def _grid(text):
    try:
        w, h = (int(v) for v in text.lower().split("x"))
    except ValueError:
        raise argparse.ArgumentTypeError(f"grid must look like WxH, got {text!r}") from None
    if w < 2 or h < 2:
        raise argparse.ArgumentTypeError("grid dimensions must be at least 2")
    return w, h


def _seeds(text):
    """``default``, ``none``, ``grid:NXxNY``, ``ring:R1,R2,...:COUNT`` or ``x,y;x,y;...``."""
    try:
        if text == "default":
            return default_seeds()
        if text == "none":
            return (ExplicitSeeds(()),)
        if text.startswith("grid:"):
            nx, ny = (int(v) for v in text[5:].lower().split("x"))
            return (GridSeeds(nx, ny),)
        if text.startswith("ring:"):
            radii, count = text[5:].split(":")
            return (RingSeeds((0.0, 0.0), tuple(float(r) for r in radii.split(",")), int(count)),)
        pts = tuple(tuple(float(v) for v in p.split(",")) for p in text.split(";") if p)
        if any(len(p) != 2 for p in pts):
            raise ValueError
        return (ExplicitSeeds(pts),)
    except ValueError:
        raise argparse.ArgumentTypeError(f"cannot read seeds {text!r}") from None


def _param(text):
    name, sep, value = text.partition("=")
    if not sep or not name:
        raise argparse.ArgumentTypeError(f"expected NAME=VALUE, got {text!r}")
    try:
        return name.strip(), float(value)
    except ValueError:
        raise argparse.ArgumentTypeError(f"bad value in {text!r}") from None


def _add_field_source(p):
    g = p.add_argument_group("field source (exactly one)")
    g.add_argument("--theta", type=float, help="whorl family parameter")
    g.add_argument("--class", dest="preset", choices=sorted(PRESETS),
                   help="preset: concentric=0, spiral-ur-ll=0.2, spiral-lr-ul=-0.2, composite-s=0.9")
    g.add_argument("--px", help="x' component, e.g. 'y' (explicit '*', '^' powers, no division; "
                                "'-x^2' means -(x^2))")
    g.add_argument("--py", help="y' component")
    g.add_argument("--param", action="append", type=_param, default=[], metavar="NAME=VALUE",
                   help="parameter binding for --px/--py (repeatable)")


def _add_portrait_opts(p):
    p.add_argument("--window", type=_window, default=DEFAULT_WINDOW,
                   help="x0,x1,y0,y1 (default: -1.6,1.6,-1.2,1.2)")
    p.add_argument("--seeds", type=_seeds, default=None,
                   help="default | none | grid:NXxNY | ring:R1,R2,..:COUNT | 'x,y;x,y' "
                        "(default: 8 seeds on rings 0.15,0.3,0.45,0.6 plus a 6x4 grid)")
    p.add_argument("--t-max", type=float, default=20.0,
                   help="forward and backward horizon per seed (default: %(default)s)")
    p.add_argument("--separatrices", action="store_true", help="trace separatrices from cusps")
    p.add_argument("--rtol", type=float, default=1e-9, help="relative tolerance (default: %(default)s)")
    p.add_argument("--atol", type=float, default=1e-12, help="absolute tolerance (default: %(default)s)")
    p.add_argument("--precision", type=int, default=3, help="SVG decimals (default: %(default)s)")


def build_parser():
    parser = _Parser(prog="whorlsim", description="Phase portraits, equilibria and orientation images of polynomial "
        "planar fields, with presets for the whorl family.",
        epilog="exit codes: 0 ok, 1 usage, 2 field parse error, 3 numerical failure")
    sub = parser.add_subparsers(dest="command", parser_class=_Parser)

    p = sub.add_parser("equilibria", help="find and classify equilibria")
    _add_field_source(p)
    p.add_argument("--window", type=_window, default=Window(-2, 2, -2, 2),
                   help="search window x0,x1,y0,y1 (default: -2,2,-2,2)")
    p.add_argument("--tol", type=float, default=1e-10, help="residual tolerance (default: %(default)s)")

    p = sub.add_parser("portrait", help="write a phase portrait as SVG")
    _add_field_source(p)
    _add_portrait_opts(p)
    p.add_argument("--out", required=True, help="output SVG path")

    p = sub.add_parser("orientation", help="write an orientation image (PGM or CSV)")
    _add_field_source(p)
    p.add_argument("--window", type=_window, default=DEFAULT_WINDOW,
                   help="x0,x1,y0,y1 (default: -1.6,1.6,-1.2,1.2)")
    p.add_argument("--grid", type=_grid, default=(256, 192), help="WxH (default: 256x192)")
    p.add_argument("--format", choices=["pgm", "csv"], help="default: from --out extension")
    p.add_argument("--out", required=True, help="output path")

    p = sub.add_parser("trajectory", help="integrate one trajectory and write CSV")
    _add_field_source(p)
    p.add_argument("--x0", type=float, required=True)
    p.add_argument("--y0", type=float, required=True)
    p.add_argument("--t-max", type=float, default=20.0, help="default: %(default)s")
    p.add_argument("--backward", action="store_true", help="integrate backward in time")
    p.add_argument("--window", type=_window, default=None, help="stop on leaving x0,x1,y0,y1")
    p.add_argument("--rtol", type=float, default=1e-9, help="default: %(default)s")
    p.add_argument("--atol", type=float, default=1e-12, help="default: %(default)s")
    p.add_argument("--out", help="output CSV path (default: stdout)")

    p = sub.add_parser("sweep", help="portraits for evenly spaced theta values")
    p.add_argument("--theta-from", type=float, required=True)
    p.add_argument("--theta-to", type=float, required=True)
    p.add_argument("--steps", type=int, required=True)
    p.add_argument("--out-dir", required=True)
    _add_portrait_opts(p)
    return parser


def field_from_args(args) -> PlanarField:
    given = [args.theta is not None, args.preset is not None,
             args.px is not None or args.py is not None]
    if sum(given) != 1:
        raise UsageError("give exactly one of --theta, --class, or --px/--py")
    if args.px is not None or args.py is not None:
        if args.px is None or args.py is None:
            raise UsageError("--px and --py must be given together")
        params = dict(args.param)
        if len(params) != len(args.param):
            raise UsageError("duplicate --param name")
        return PlanarField.from_text(args.px, args.py, params)
    if args.param:
        raise UsageError("--param only applies to --px/--py")
    theta = args.theta if args.theta is not None else PRESETS[args.preset]
    return whorl_family(theta)


def write_atomic(path, data):
    """Write via a temp file in the target directory and rename into place."""
    path = os.fspath(path)
    directory = os.path.dirname(os.path.abspath(path))
    if isinstance(data, str):
        data = data.encode("utf-8")
    fd, tmp = tempfile.mkstemp(dir=directory, prefix=".whorlsim-", suffix=".tmp")
    try:
        with os.fdopen(fd, "wb") as fh:
            fh.write(data)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def _use_color(stream) -> bool:
    return "NO_COLOR" not in os.environ and hasattr(stream, "isatty") and stream.isatty()


_KIND_COLORS = {"center": "32", "cusp": "35", "stable-focus": "36", "unstable-focus": "33"}


def _fmt_complex(z: complex) -> str:
    if z.imag == 0:
        return f"{z.real:.6g}"
    sign = "+" if z.imag >= 0 else "-"
    return f"{z.real:.6g}{sign}{abs(z.imag):.6g}i"


def format_reports(reports, color=False) -> str:
    rows = [("x", "y", "eigenvalues", "kind", "normal form (k, a_k, n, b_n)")]
    for r in reports:
        nf = ""
        if r.normal_form is not None:
            k, a, n, b = r.normal_form.as_tuple()
            nf = f"({k}, {a:.6g}, {'-' if n is None else n}, {b:.6g})"
        kind = r.kind + (f" ({r.diagnostic})" if r.diagnostic else "")
        rows.append((
            f"{r.location[0] + 0.0:.6f}", f"{r.location[1] + 0.0:.6f}",
            ", ".join(_fmt_complex(e) for e in r.eigenvalues), kind, nf,
        ))
    widths = [max(len(row[i]) for row in rows) for i in range(5)]
    lines = []
    for n, row in enumerate(rows):
        cells = [c.ljust(w) for c, w in zip(row, widths)]
        if color and n > 0:
            code = _KIND_COLORS.get(reports[n - 1].kind)
            if code:
                cells[3] = f"\033[{code}m{cells[3]}\033[0m"
        lines.append("  ".join(cells).rstrip())
    return "\n".join(lines) + "\n"


def _portrait_spec(fld, args) -> PortraitSpec:
    cfg = IntegratorConfig(rel_tol=args.rtol, abs_tol=args.atol)
    return PortraitSpec(
        field=fld,
        window=args.window,
        seeds=args.seeds if args.seeds is not None else default_seeds(),
        t_forward=args.t_max,
        t_backward=args.t_max,
        integrator=cfg,
        include_separatrices=args.separatrices,
    )


def _cmd_equilibria(args, out):
    fld = field_from_args(args)
    reports = analyze(fld, args.window, args.tol)
    out.write(format_reports(reports, _use_color(out)))
    return EXIT_OK


def _cmd_portrait(args, out):
    fld = field_from_args(args)
    portrait = compute_portrait(_portrait_spec(fld, args))
    for idx, msg in portrait.failures:
        print(f"whorlsim: seed {idx}: {msg}", file=sys.stderr)
    write_atomic(args.out, render_svg(portrait, SvgStyle(precision=args.precision)))
    return EXIT_OK


def _cmd_orientation(args, out):
    fld = field_from_args(args)
    fmt = args.format or ("csv" if args.out.lower().endswith(".csv") else "pgm")
    w, h = args.grid
    of = orientation_field(fld, args.window, w, h)
    write_atomic(args.out, write_pgm(of) if fmt == "pgm" else write_orientation_csv(of))
    return EXIT_OK


def _cmd_trajectory(args, out):
    fld = field_from_args(args)
    kwargs = {} if args.window is None else {"window": args.window}
    cfg = IntegratorConfig(rel_tol=args.rtol, abs_tol=args.atol, **kwargs)
    traj = integrate_adaptive(fld, (args.x0, args.y0), cfg, args.t_max, backward=args.backward)
    if traj.termination == "step-underflow":
        raise NumericalError(traj.message or "step-size underflow")
    text = write_csv(traj)
    if args.out:
        write_atomic(args.out, text)
    else:
        out.write(text)
    return EXIT_OK


def _cmd_sweep(args, out):
    if args.steps < 1:
        raise UsageError("--steps must be at least 1")
    os.makedirs(args.out_dir, exist_ok=True)
    thetas = np.linspace(args.theta_from, args.theta_to, args.steps)
    style = SvgStyle(precision=args.precision)
    for k, theta in enumerate(thetas):
        portrait = compute_portrait(_portrait_spec(whorl_family(float(theta)), args))
        path = os.path.join(args.out_dir, f"sweep_{k:04d}.svg")
        write_atomic(path, render_svg(portrait, style))
    return EXIT_OK


COMMANDS = {
    "equilibria": _cmd_equilibria,
    "portrait": _cmd_portrait,
    "orientation": _cmd_orientation,
    "trajectory": _cmd_trajectory,
    "sweep": _cmd_sweep,
}


def run(argv=None, out=None) -> int:
    out = out or sys.stdout
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        if args.command is None:
            raise UsageError(parser.format_usage().strip())
        return COMMANDS[args.command](args, out)
    except UsageError as exc:
        print(exc, file=sys.stderr)
        return EXIT_USAGE
    except (FieldSyntaxError, UnboundParam) as exc:
        print(f"whorlsim: field error: {exc}", file=sys.stderr)
        return EXIT_PARSE
    except NumericalError as exc:
        print(f"whorlsim: numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    except ValueError as exc:
        print(f"whorlsim: {exc}", file=sys.stderr)
        return EXIT_USAGE


def main():
    sys.exit(run())
