"""Whorl fingerprint classes as phase portraits of the planar system

    x' = y,  y' = -x (x^2 - 1)^2 + theta y (x^2 - 1)^2.
"""
from ._backend import BACKEND
from .dynamics import Jet1, PlanarField, Window, eval_field, hamiltonian, jet, whorl_family
from .equilibria import (
    EquilibriumReport,
    NormalFormData,
    analyze,
    classify,
    classify_degenerate,
    classify_linear,
    extract_normal_form,
    find_equilibria,
)
from .integrate import (
    IntegratorConfig,
    Trajectory,
    axis_crossings,
    integrate_adaptive,
    integrate_fixed,
    step_rk4,
)
from .poly import (
    ParamBinding,
    ParamPolynomial,
    Polynomial2,
    bind,
    differentiate,
    evaluate,
    parse_poly,
    taylor_shift,
    tokenize,
)
from .portrait import (
    OrientationField,
    Portrait,
    PortraitSpec,
    compute_portrait,
    orientation_field,
    trace_separatrices,
)
from .render import SvgStyle, render_svg, write_csv, write_pgm

__version__ = "0.1.0"

__all__ = [
    "analyze",
    "axis_crossings",
    "BACKEND",
    "bind",
    "classify",
    "classify_degenerate",
    "classify_linear",
    "compute_portrait",
    "differentiate",
    "EquilibriumReport",
    "eval_field",
    "evaluate",
    "extract_normal_form",
    "find_equilibria",
    "hamiltonian",
    "integrate_adaptive",
    "integrate_fixed",
    "IntegratorConfig",
    "jet",
    "Jet1",
    "NormalFormData",
    "orientation_field",
    "OrientationField",
    "ParamBinding",
    "ParamPolynomial",
    "parse_poly",
    "PlanarField",
    "Polynomial2",
    "Portrait",
    "PortraitSpec",
    "render_svg",
    "step_rk4",
    "SvgStyle",
    "taylor_shift",
    "tokenize",
    "trace_separatrices",
    "Trajectory",
    "whorl_family",
    "Window",
    "write_csv",
    "write_pgm",
]
