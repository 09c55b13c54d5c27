"""Acceptance criteria 1-10, each at its stated tolerance.

Run with ``pytest tests/test_acceptance.py``; a PASS/FAIL line per
criterion is printed in the terminal summary. Running this file directly
does the same.
"""
import io
import itertools
import math
import xml.etree.ElementTree as ET
from pathlib import Path

import numpy as np
import pytest

from whorlsim.cli import run
from whorlsim.dynamics import hamiltonian, whorl_family
from whorlsim.equilibria import (
    CENTER, CUSP, STABLE_FOCUS, STABLE_NODE, UNSTABLE_FOCUS, UNSTABLE_NODE,
    NormalFormData, classify, classify_degenerate, extract_normal_form, find_equilibria,
)
from whorlsim.integrate import IntegratorConfig, axis_crossings, integrate_adaptive, integrate_fixed
from whorlsim.portrait import (
    DEFAULT_WINDOW, ExplicitSeeds, PortraitSpec, compute_portrait, trace_separatrices,
)
from whorlsim.render import render_svg, write_csv, write_pgm
from whorlsim.portrait import OrientationField
from whorlsim.dynamics import Window

GOLDEN = Path(__file__).parent / "golden"
THETAS = (-2.0, -0.9, -0.2, 0.0, 0.2, 0.9, 2.0)


def test_criterion_01_equilibrium_set():
    expected = [(-1.0, 0.0), (0.0, 0.0), (1.0, 0.0)]
    for theta in THETAS:
        found = find_equilibria(whorl_family(theta), Window(-2, 2, -2, 2))
        assert len(found) == 3, (theta, found)
        for (x, y), (ex, ey) in zip(sorted(found), expected):
            assert abs(x - ex) < 1e-9 and abs(y - ey) < 1e-9, (theta, found)


@pytest.mark.parametrize("theta,kind", [
    (0.0, CENTER), (-0.2, STABLE_FOCUS), (-1.9, STABLE_FOCUS), (0.2, UNSTABLE_FOCUS),
    (1.9, UNSTABLE_FOCUS), (-3.0, STABLE_NODE), (3.0, UNSTABLE_NODE),
])
def test_criterion_02_origin_linear_classes(theta, kind):
    rep = classify(whorl_family(theta), (0.0, 0.0))
    assert rep.kind == kind
    disc = complex(theta * theta - 4) ** 0.5
    want = sorted([(theta + disc) / 2, (theta - disc) / 2], key=lambda z: (z.real, z.imag))
    got = sorted(rep.eigenvalues, key=lambda z: (z.real, z.imag))
    for g, w in zip(got, want):
        assert abs(g - w) < 1e-12


@pytest.mark.parametrize("theta", THETAS + (-3.0, 3.0))
def test_criterion_03_cusps(theta):
    fld = whorl_family(theta)
    for x, a_sign in ((1.0, -1), (-1.0, 1)):
        nf = extract_normal_form(fld, (x, 0.0))
        assert nf.k == 2
        assert abs(nf.a_k - 4 * a_sign) < 1e-9
        if theta == 0:
            assert nf.b_n == 0 and nf.n is None
        else:
            assert nf.n == 2 and abs(nf.b_n - 4 * theta) < 1e-9
        assert classify_degenerate(nf) == CUSP
        assert classify(fld, (x, 0.0)).kind == CUSP


def _oracle(k, a, n, b):
    """Decision rules written out as a flat list, independent of the library."""
    odd, m = k % 2 == 1, k // 2
    lam = b * b + 4 * (m + 1) * a
    rules = [
        (odd and a > 0, "saddle"),
        (odd and a < 0 and b == 0, "focus-or-center"),
        (odd and a < 0 and b != 0 and n > m, "focus-or-center"),
        (odd and a < 0 and b != 0 and n == m and lam < 0, "focus-or-center"),
        (odd and a < 0 and b != 0 and n % 2 == 0 and n < m, "node-degenerate-theorem"),
        (odd and a < 0 and b != 0 and n % 2 == 0 and n == m and lam >= 0, "node-degenerate-theorem"),
        (odd and a < 0 and b != 0 and n % 2 == 1 and n < m, "elliptic-domain"),
        (odd and a < 0 and b != 0 and n % 2 == 1 and n == m and lam >= 0, "elliptic-domain"),
        (not odd and b == 0, "cusp"),
        (not odd and b != 0 and n >= m, "cusp"),
        (not odd and b != 0 and n < m, "saddle-node"),
    ]
    hits = {label for cond, label in rules if cond}
    assert len(hits) == 1, (k, a, n, b, hits)
    return hits.pop()


def test_criterion_04_degenerate_table():
    cases = 0
    for k, n, b, a in itertools.product(range(2, 10), range(1, 10), (0.0, 1.0, -1.0, 5.0, -5.0),
                                        (1.0, -1.0, 4.0, -4.0)):
        nf = NormalFormData(k, a, None if b == 0 else n, b)
        assert classify_degenerate(nf) == _oracle(k, a, n, b), nf
        cases += 1
    assert cases == 8 * 9 * 5 * 4


def test_criterion_05_conservation():
    fld = whorl_family(0.0)
    tr = integrate_adaptive(fld, (0.5, 0.0), IntegratorConfig(rel_tol=1e-10), 50.0)
    H = hamiltonian((tr.x, tr.y))
    assert np.max(np.abs(H - H[0])) < 1e-8
    returns = [c.x for c in axis_crossings(tr) if c.direction == -1]
    assert returns and all(abs(x - 0.5) < 1e-6 for x in returns)


def test_criterion_06_separatrix_geometry():
    cfg = IntegratorConfig(window=DEFAULT_WINDOW)
    eq = [(0.0, 0.0), (1.0, 0.0), (-1.0, 0.0)]
    seps = trace_separatrices(whorl_family(0.0), [(1.0, 0.0), (-1.0, 0.0)], 1e-4, cfg,
                              equilibria=eq)
    dense = [(tr.start, tr.dense(32)) for tr in seps]
    peak = min(np.min(np.hypot(d[:, 1], d[:, 2] - math.sqrt(1 / 3))) for _, d in dense)
    assert peak < 1e-3
    hetero = min(np.min(np.hypot(d[:, 1] + 1, d[:, 2])) for s, d in dense if s[0] > 0)
    assert hetero < 1e-3


def test_criterion_07_spiral_classes():
    tr = integrate_adaptive(whorl_family(0.2), (0.01, 0.0), IntegratorConfig(), 80.0)
    radii = [c.x for c in axis_crossings(tr) if c.x > 0]
    inner = list(itertools.takewhile(lambda r: r < 0.9, radii))
    assert len(inner) >= 4
    assert all(b > a for a, b in zip(inner, inner[1:]))

    seeds = PortraitSpec(whorl_family(0.2)).seed_points()
    up = compute_portrait(PortraitSpec(whorl_family(0.2), seeds=ExplicitSeeds(tuple(seeds))))
    down = compute_portrait(PortraitSpec(
        whorl_family(-0.2), seeds=ExplicitSeeds(tuple((x, -y) for x, y in seeds))
    ))
    key = lambda c: (c.seed_index, c.trajectory.t[-1] > 0)
    pos = {key(c): c.trajectory for c in up.curves}
    assert len(down.curves) == len(up.curves)
    for c in down.curves:
        mirror = pos[(c.seed_index, not (c.trajectory.t[-1] > 0))]
        a = c.trajectory
        assert len(a) == len(mirror)
        assert np.max(np.abs(a.t + mirror.t)) < 1e-8
        assert np.max(np.abs(a.x - mirror.x)) < 1e-8
        assert np.max(np.abs(a.y + mirror.y)) < 1e-8


def test_criterion_08_composite_class():
    p = compute_portrait(PortraitSpec(whorl_family(0.9), include_separatrices=True))
    kinds = {r.location: r.kind for r in p.equilibria}
    assert len(kinds) == 3
    by_x = {round(x, 9) + 0.0: k for (x, _), k in kinds.items()}
    assert by_x == {0.0: UNSTABLE_FOCUS, 1.0: CUSP, -1.0: CUSP}
    root = ET.fromstring(render_svg(p))
    assert root.tag.endswith("svg") and len(list(root.iter("{http://www.w3.org/2000/svg}polyline")))


def test_criterion_09_rk4_order():
    from scipy.integrate import solve_ivp

    fld = whorl_family(0.5)
    ref = solve_ivp(lambda t, z: fld(z[0], z[1]), (0.0, 1.0), [0.3, 0.1], method="DOP853",
                    rtol=1e-13, atol=1e-15).y[:, -1]

    def err(h):
        tr = integrate_fixed(fld, (0.3, 0.1), h, 1.0)
        return math.hypot(tr.x[-1] - ref[0], tr.y[-1] - ref[1])

    for h in (0.1, 0.05, 0.01):
        ratio = err(h) / err(h / 2)
        assert abs(ratio - 16) <= 0.2 * 16, (h, ratio)


def _golden_artifacts():
    from whorlsim.portrait import Portrait

    empty = render_svg(Portrait(DEFAULT_WINDOW, [], [])).encode()
    a = np.array([[0, math.pi / 2], [math.pi * 255 / 256, np.nan]])
    pgm = write_pgm(OrientationField(2, 2, a, np.isnan(a), Window(-1, 1, -1, 1)))
    csv = write_csv(integrate_fixed(whorl_family(0.0), (0.5, 0.0), 0.1, 1.0)).encode()
    portrait = render_svg(compute_portrait(PortraitSpec(whorl_family(0.2)))).encode()
    return {"empty_portrait.svg": empty, "quant_2x2.pgm": pgm, "rk4_whorl0.csv": csv,
            "whorl_0.2.svg": portrait}


def test_criterion_10_format_exactness(tmp_path):
    first, second = _golden_artifacts(), _golden_artifacts()
    for name, data in first.items():
        assert data == second[name], name
        assert data == (GOLDEN / name).read_bytes(), name
    a, b = tmp_path / "a.svg", tmp_path / "b.svg"
    assert run(["portrait", "--class", "spiral-ur-ll", "--out", str(a)], io.StringIO()) == 0
    assert run(["portrait", "--px", "y", "--py", "-x*(x^2-1)^2 + theta*y*(x^2-1)^2",
                "--param", "theta=0.2", "--out", str(b)], io.StringIO()) == 0
    assert a.read_bytes() == b.read_bytes()


if __name__ == "__main__":
    raise SystemExit(pytest.main([__file__, "-q"]))
