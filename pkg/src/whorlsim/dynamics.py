"""Planar polynomial vector fields and the whorl family.

The whorl family is

    x' = y
    y' = -x (x^2 - 1)^2 + theta y (x^2 - 1)^2

which has a core at the origin and two deltas at (+-1, 0).
"""
from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property
from typing import Mapping, NamedTuple

import numpy as np

from .poly import ParamBinding, Polynomial2, bind, differentiate, evaluate, parse_poly

WHORL_P = "y"
WHORL_Q = "-x*(x^2-1)^2 + theta*y*(x^2-1)^2"


class Window(NamedTuple):
    """Axis-aligned rectangle ``[x0, x1] x [y0, y1]``."""

    x0: float
    x1: float
    y0: float
    y1: float

    @classmethod
    def parse(cls, text: str) -> "Window":
        parts = [float(v) for v in text.split(",")]
        if len(parts) != 4:
            raise ValueError(f"window needs four comma-separated numbers, got {text!r}")
        return cls(*parts).checked()

    @classmethod
    def unbounded(cls) -> "Window":
        inf = float("inf")
        return cls(-inf, inf, -inf, inf)

    def checked(self) -> "Window":
        if not (self.x0 < self.x1 and self.y0 < self.y1):
            raise ValueError(f"empty window {tuple(self)}")
        return self

    @property
    def width(self) -> float:
        return self.x1 - self.x0

    @property
    def height(self) -> float:
        return self.y1 - self.y0

    def contains(self, x: float, y: float, slack: float = 0.0) -> bool:
        return (
            self.x0 - slack <= x <= self.x1 + slack
            and self.y0 - slack <= y <= self.y1 + slack
        )


@dataclass(frozen=True, eq=False)
class PlanarField:
    """Vector field ``(p, q)`` with every parameter already bound."""

    p: Polynomial2
    q: Polynomial2
    params: tuple[ParamBinding, ...] = ()

    def __post_init__(self):
        if self.p.is_zero and self.q.is_zero:
            raise ValueError("at least one field component must be nonzero")
        names = [b.name for b in self.params]
        if len(names) != len(set(names)):
            raise ValueError("parameter names must be unique")

    def __eq__(self, other):
        if not isinstance(other, PlanarField):
            return NotImplemented
        return self.p == other.p and self.q == other.q

    def __hash__(self):
        return hash((self.p, self.q))

    @classmethod
    def from_text(
        cls, px: str, py: str, params: Mapping[str, float] | None = None
    ) -> "PlanarField":
        params = dict(params or {})
        p = bind(parse_poly(px, params), params)
        q = bind(parse_poly(py, params), params)
        bindings = tuple(ParamBinding(k, float(v)) for k, v in sorted(params.items()))
        return cls(p, q, bindings)

    @cached_property
    def partials(self) -> tuple[Polynomial2, Polynomial2, Polynomial2, Polynomial2]:
        """(dP/dx, dP/dy, dQ/dx, dQ/dy)."""
        return (
            differentiate(self.p, "x"),
            differentiate(self.p, "y"),
            differentiate(self.q, "x"),
            differentiate(self.q, "y"),
        )

    @cached_property
    def kernel(self):
        """Backend kernel (compiled when available) for this field."""
        from ._backend import FieldKernel

        return FieldKernel(
            [(i, j, c) for (i, j), c in self.p.items()],
            [(i, j, c) for (i, j), c in self.q.items()],
        )

    @property
    def is_second_order(self) -> bool:
        """True when the field has the shape ``x' = y``."""
        return self.p == Polynomial2({(0, 1): 1.0})

    def __call__(self, x, y):
        return evaluate(self.p, x, y), evaluate(self.q, x, y)


@dataclass(frozen=True)
class Jet1:
    value: np.ndarray
    jacobian: np.ndarray


def whorl_family(theta: float) -> PlanarField:
    theta = float(theta)
    if not np.isfinite(theta):
        raise ValueError("theta must be finite")
    return PlanarField.from_text(WHORL_P, WHORL_Q, {"theta": theta})


def eval_field(fld: PlanarField, point) -> np.ndarray:
    x, y = point
    return np.array([evaluate(fld.p, x, y), evaluate(fld.q, x, y)])


def jet(fld: PlanarField, point) -> Jet1:
    x, y = point
    px, py, qx, qy = fld.partials
    jac = np.array(
        [
            [evaluate(px, x, y), evaluate(py, x, y)],
            [evaluate(qx, x, y), evaluate(qy, x, y)],
        ]
    )
    return Jet1(eval_field(fld, point), jac)


def hamiltonian(point) -> float:
    """Energy ``y^2/2 + (x^2-1)^3/6`` conserved by the whorl field at theta = 0.

    Only meaningful for theta = 0; callers are responsible for that.
    """
    x, y = point
    s = x * x - 1.0
    return 0.5 * y * y + s * s * s / 6.0


def hamiltonian_gradient() -> tuple[Polynomial2, Polynomial2]:
    """Exact (dH/dx, dH/dy) of :func:`hamiltonian` as polynomials."""
    return bind(parse_poly("x*(x^2-1)^2")), bind(parse_poly("y"))
