"""Locating and classifying equilibria of planar polynomial fields.

Hyperbolic and other nondegenerate points are classified from the trace
and determinant of the Jacobian. Points with a double-zero (nilpotent)
Jacobian on fields of the shape ``x' = y`` are reduced to the normal form

    x' = y,  y' = a_k u^k (1 + ...) + b_n u^n y (1 + ...) + y^2 R

about the equilibrium and classified with the standard decision table for
that form (saddle, focus-or-center, node, elliptic domain, cusp,
saddle-node).
"""
from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .dynamics import PlanarField, Window, jet
from .errors import FlatField, NewtonStall, NormalFormError, NotDoubleZero, NotSecondOrderShape
from .poly import Polynomial2, differentiate, evaluate, taylor_shift

log = logging.getLogger(__name__)

CENTER = "center"
STABLE_FOCUS = "stable-focus"
UNSTABLE_FOCUS = "unstable-focus"
STABLE_NODE = "stable-node"
UNSTABLE_NODE = "unstable-node"
DEGENERATE_NODE = "degenerate-node"
SADDLE = "saddle"
CUSP = "cusp"
SADDLE_NODE = "saddle-node"
ELLIPTIC_DOMAIN = "elliptic-domain"
FOCUS_OR_CENTER = "focus-or-center"
NODE_DEGENERATE = "node-degenerate-theorem"
NOT_CLASSIFIED = "not-classified"
DEGENERATE = "degenerate"

KINDS = (
    CENTER, STABLE_FOCUS, UNSTABLE_FOCUS, STABLE_NODE, UNSTABLE_NODE, DEGENERATE_NODE,
    SADDLE, CUSP, SADDLE_NODE, ELLIPTIC_DOMAIN, FOCUS_OR_CENTER, NODE_DEGENERATE,
    NOT_CLASSIFIED,
)
NORMAL_FORM_KINDS = frozenset(
    {CUSP, SADDLE_NODE, ELLIPTIC_DOMAIN, FOCUS_OR_CENTER, NODE_DEGENERATE}
)

ZERO_EIG_TOL = 1e-9
COEF_TOL = 1e-9


@dataclass(frozen=True)
class NormalFormData:
    k: int
    a_k: float
    n: Optional[int]
    b_n: float

    def __post_init__(self):
        if self.k < 2:
            raise ValueError("k must be at least 2")
        if self.a_k == 0:
            raise ValueError("a_k must be nonzero")
        if self.b_n == 0 and self.n is not None:
            raise ValueError("n must be absent when b_n = 0")
        if self.b_n != 0 and (self.n is None or self.n < 1):
            raise ValueError("n must be >= 1 when b_n != 0")

    @property
    def m(self) -> int:
        return self.k // 2

    @property
    def lam(self) -> Optional[float]:
        if self.k % 2 == 1:
            return self.b_n**2 + 4 * (self.m + 1) * self.a_k
        return None

    def as_tuple(self):
        return (self.k, self.a_k, self.n, self.b_n)


@dataclass(frozen=True)
class EquilibriumReport:
    location: tuple[float, float]
    jacobian: np.ndarray
    eigenvalues: tuple[complex, complex]
    kind: str
    normal_form: Optional[NormalFormData] = None
    diagnostic: str = ""


# --------------------------------------------------------------------------
# locating


@dataclass(frozen=True)
class _Newton:
    fld: PlanarField
    det: Polynomial2 = field(init=False)
    det_grad: tuple[Polynomial2, Polynomial2] = field(init=False)

    def __post_init__(self):
        px, py, qx, qy = self.fld.partials
        d = px * qy - py * qx
        object.__setattr__(self, "det", d)
        object.__setattr__(self, "det_grad", (differentiate(d, "x"), differentiate(d, "y")))

    def residual(self, z):
        return np.array(self.fld(z[0], z[1]))

    def jac(self, z):
        return jet(self.fld, z).jacobian


def _damped_newton(nw: _Newton, z0, max_iter: int):
    z = np.array(z0, dtype=float)
    F = nw.residual(z)
    fn = float(np.max(np.abs(F)))
    for _ in range(max_iter):
        if fn == 0.0:
            break
        J = nw.jac(z)
        try:
            d = np.linalg.solve(J, -F)
        except np.linalg.LinAlgError:
            d = np.linalg.lstsq(J, -F, rcond=None)[0]
        if not np.all(np.isfinite(d)):
            break
        lam = 1.0
        improved = False
        while lam >= 1.0 / 1024:
            zn = z + lam * d
            Fn = nw.residual(zn)
            fnn = float(np.max(np.abs(Fn)))
            if np.isfinite(fnn) and fnn < fn:
                improved = True
                break
            lam *= 0.5
        if not improved:
            break
        step = lam * float(np.max(np.abs(d)))
        z, F, fn = zn, Fn, fnn
        if step <= 1e-15 * (1.0 + float(np.max(np.abs(z)))):
            break
    return z, fn


def _polish_singular(nw: _Newton, z, max_iter: int = 30):
    """Gauss-Newton on (P, Q, det J) = 0.

    A root where the Jacobian is singular is a multiple root of (P, Q) and
    only determined to about sqrt(machine eps) by Newton on (P, Q) alone;
    adding det J = 0 makes it a regular root of the stacked system.
    """
    dx, dy = nw.det_grad
    z = np.array(z, dtype=float)
    for _ in range(max_iter):
        r = np.append(nw.residual(z), evaluate(nw.det, z[0], z[1]))
        A = np.vstack(
            [nw.jac(z), [evaluate(dx, z[0], z[1]), evaluate(dy, z[0], z[1])]]
        )
        d = np.linalg.lstsq(A, -r, rcond=None)[0]
        if not np.all(np.isfinite(d)):
            break
        z = z + d
        if float(np.max(np.abs(d))) <= 1e-16 * (1.0 + float(np.max(np.abs(z)))):
            break
    return z


def _candidates(fld: PlanarField, window: Window, grid: int):
    xs = np.linspace(window.x0, window.x1, grid + 1)
    ys = np.linspace(window.y0, window.y1, grid + 1)
    X, Y = np.meshgrid(xs, ys, indexing="xy")
    P, Q = fld(X, Y)
    P = np.broadcast_to(P, X.shape)
    Q = np.broadcast_to(Q, X.shape)

    def straddles(V):
        corners = np.stack([V[:-1, :-1], V[1:, :-1], V[:-1, 1:], V[1:, 1:]])
        return (corners.min(axis=0) <= 0) & (corners.max(axis=0) >= 0)

    cx = 0.5 * (xs[:-1] + xs[1:])
    cy = 0.5 * (ys[:-1] + ys[1:])
    CX, CY = np.meshgrid(cx, cy, indexing="xy")
    Pc, Qc = fld(CX, CY)
    R = np.hypot(np.broadcast_to(Pc, CX.shape), np.broadcast_to(Qc, CX.shape))
    padded = np.pad(R, 1, constant_values=np.inf)
    local_min = np.ones_like(R, dtype=bool)
    for di in (-1, 0, 1):
        for dj in (-1, 0, 1):
            if di or dj:
                shifted = padded[1 + di : 1 + di + R.shape[0], 1 + dj : 1 + dj + R.shape[1]]
                local_min &= R <= shifted
    mask = (straddles(P) & straddles(Q)) | local_min
    rows, cols = np.nonzero(mask)
    return [(float(CX[r, c]), float(CY[r, c])) for r, c in zip(rows, cols)]


def find_equilibria(
    fld: PlanarField,
    window: Window,
    tol: float = 1e-10,
    grid: int = 64,
    max_iter: int = 50,
    diagnostics: list | None = None,
) -> list[tuple[float, float]]:
    """All equilibria in ``window`` with ``|P|, |Q| < tol``, sorted by (x, y).

    Candidates come from a ``grid x grid`` cell scan (sign changes of both
    components, or local minima of the residual) and are refined by damped
    Newton with the exact Jacobian. Failed candidates are appended to
    ``diagnostics`` as :class:`NewtonStall` instances.
    """
    window = Window(*window).checked()
    if tol <= 0:
        raise ValueError("tol must be positive")
    nw = _Newton(fld)
    found: list[tuple[float, float]] = []
    for cand in _candidates(fld, window, grid):
        z, fn = _damped_newton(nw, cand, max_iter)
        J = nw.jac(z)
        scale = 1.0 + float(np.linalg.norm(J))
        if np.all(np.isfinite(J)) and np.linalg.svd(J, compute_uv=False)[-1] < 1e-4 * scale:
            zp = _polish_singular(nw, z)
            fp = float(np.max(np.abs(nw.residual(zp))))
            if (
                np.all(np.isfinite(zp))
                and fp < tol
                and abs(evaluate(nw.det, zp[0], zp[1])) <= abs(evaluate(nw.det, z[0], z[1]))
            ):
                z, fn = zp, fp
        if not (np.all(np.isfinite(z)) and fn < tol):
            stall = NewtonStall(cand)
            log.debug("%s", stall)
            if diagnostics is not None:
                diagnostics.append(stall)
            continue
        if not window.contains(z[0], z[1], slack=tol):
            continue
        point = (float(z[0]) + 0.0, float(z[1]) + 0.0)
        if any(math.dist(point, q) <= 100 * tol for q in found):
            continue
        found.append(point)
    return sorted(found)


# --------------------------------------------------------------------------
# classification


def eigenvalues(jacobian) -> tuple[complex, complex]:
    """Roots of ``l^2 - tr l + det``, larger real part (then imag) first."""
    J = np.asarray(jacobian, dtype=float)
    tr = float(J[0, 0] + J[1, 1])
    det = float(J[0, 0] * J[1, 1] - J[0, 1] * J[1, 0])
    disc = tr * tr - 4.0 * det
    if disc >= 0:
        r = math.sqrt(disc)
        return complex((tr + r) / 2), complex((tr - r) / 2)
    r = math.sqrt(-disc)
    return complex(tr / 2, r / 2), complex(tr / 2, -r / 2)


def _zero_threshold(J, tol):
    return tol * (1.0 + float(np.linalg.norm(J)))


def classify_linear(jacobian, tol: float = ZERO_EIG_TOL) -> str:
    """Trace/determinant taxonomy; returns ``"degenerate"`` on any zero eigenvalue."""
    J = np.asarray(jacobian, dtype=float)
    zt = _zero_threshold(J, tol)
    l1, l2 = eigenvalues(J)
    if abs(l1) < zt or abs(l2) < zt:
        return DEGENERATE
    re = l1.real
    if abs(l1 - l2) < zt:
        return DEGENERATE_NODE
    if l1.imag != 0.0:
        if abs(re) < zt:
            return CENTER
        return UNSTABLE_FOCUS if re > 0 else STABLE_FOCUS
    if (l1.real > 0) != (l2.real > 0):
        return SADDLE
    return UNSTABLE_NODE if re > 0 else STABLE_NODE


def node_stability(jacobian) -> str:
    tr = float(np.trace(np.asarray(jacobian, dtype=float)))
    return "unstable" if tr > 0 else "stable"


def extract_normal_form(
    fld: PlanarField, eq, tol: float = ZERO_EIG_TOL, coef_tol: float = COEF_TOL
) -> NormalFormData:
    """Read ``k, a_k, n, b_n`` off the Taylor expansion about ``eq``.

    ``Q(x, y) = F(x) + y G(x) + y^2 R(x, y)``; ``a_k`` is the lowest
    coefficient of ``F`` of degree >= 2 and ``b_n`` the lowest coefficient
    of ``G`` of degree >= 1, both in powers of ``x - x_eq``. Coefficients
    below ``coef_tol`` times the largest shifted coefficient count as zero.
    """
    if not fld.is_second_order:
        raise NotSecondOrderShape("field is not of the form x' = y")
    J = jet(fld, eq).jacobian
    zt = _zero_threshold(J, tol)
    l1, l2 = eigenvalues(J)
    if abs(l1) >= zt or abs(l2) >= zt:
        raise NotDoubleZero(f"Jacobian at {tuple(eq)} has eigenvalues {l1}, {l2}")
    shifted = taylor_shift(fld.q, float(eq[0]), 0.0)
    scale = max((abs(c) for _, c in shifted.items()), default=0.0)
    cut = coef_tol * max(scale, 1.0)
    F = {i: c for (i, j), c in shifted.items() if j == 0 and abs(c) > cut}
    G = {i: c for (i, j), c in shifted.items() if j == 1 and abs(c) > cut}
    ks = sorted(i for i in F if i >= 2)
    if not ks:
        raise FlatField(f"no x^k term with k >= 2 about {tuple(eq)}")
    k = ks[0]
    ns = sorted(i for i in G if i >= 1)
    if ns:
        return NormalFormData(k, F[k], ns[0], G[ns[0]])
    return NormalFormData(k, F[k], None, 0.0)


def classify_degenerate(nf: NormalFormData) -> str:
    k, a, n, b = nf.k, nf.a_k, nf.n, nf.b_n
    m = nf.m
    if k % 2 == 0:
        if b == 0 or n >= m:
            return CUSP
        return SADDLE_NODE
    if a > 0:
        return SADDLE
    if b == 0 or n > m:
        return FOCUS_OR_CENTER
    if n == m and nf.lam < 0:
        return FOCUS_OR_CENTER
    # n < m, or n == m with lambda >= 0
    return NODE_DEGENERATE if n % 2 == 0 else ELLIPTIC_DOMAIN


def classify(fld: PlanarField, eq, tol: float = ZERO_EIG_TOL) -> EquilibriumReport:
    loc = (float(eq[0]), float(eq[1]))
    J = jet(fld, loc).jacobian
    eig = eigenvalues(J)
    kind = classify_linear(J, tol)
    if kind == DEGENERATE_NODE:
        return EquilibriumReport(loc, J, eig, kind, diagnostic=node_stability(J))
    if kind != DEGENERATE:
        return EquilibriumReport(loc, J, eig, kind)
    zt = _zero_threshold(J, tol)
    nzero = sum(abs(l) < zt for l in eig)
    if nzero == 1:
        return EquilibriumReport(
            loc, J, eig, NOT_CLASSIFIED, diagnostic="single zero eigenvalue"
        )
    if float(np.max(np.abs(J))) < zt:
        return EquilibriumReport(loc, J, eig, NOT_CLASSIFIED, diagnostic="zero Jacobian")
    try:
        nf = extract_normal_form(fld, loc, tol)
    except NormalFormError as exc:
        return EquilibriumReport(loc, J, eig, NOT_CLASSIFIED, diagnostic=str(exc))
    return EquilibriumReport(loc, J, eig, classify_degenerate(nf), nf)


def analyze(fld: PlanarField, window: Window, tol: float = 1e-10, **kwargs):
    """Find and classify every equilibrium in ``window``."""
    return [classify(fld, p) for p in find_equilibria(fld, window, tol, **kwargs)]
