"""The compiled kernel and the pure-Python fallback must agree exactly."""
import math

import numpy as np
import pytest

from whorlsim import _backend
from whorlsim.dynamics import whorl_family

pytestmark = pytest.mark.skipif(
    _backend.CompiledFieldKernel is None, reason="compiled kernel not built"
)


def _pair(theta=0.3):
    f = whorl_family(theta)
    p = [(i, j, c) for (i, j), c in f.p.items()]
    q = [(i, j, c) for (i, j), c in f.q.items()]
    return _backend.PyFieldKernel(p, q), _backend.CompiledFieldKernel(p, q)


def test_selected_backend_is_compiled():
    assert _backend.BACKEND == "cython"
    assert whorl_family(0.0).kernel.backend == "cython"


def test_eval_identical():
    py, cy = _pair()
    rng = np.random.default_rng(0)
    for x, y in rng.uniform(-3, 3, (200, 2)):
        assert py.eval(x, y) == cy.eval(x, y)


def test_rk4_identical():
    py, cy = _pair(-0.7)
    rng = np.random.default_rng(1)
    for x, y, h in rng.uniform(-1, 1, (100, 3)):
        assert py.rk4_step(x, y, h) == cy.rk4_step(x, y, h)


def test_fixed_identical():
    py, cy = _pair(0.2)
    w = (-2.0, 2.0, -2.0, 2.0)
    a = py.integrate_fixed(0.4, 0.1, 0.01, 30.0, w)
    b = cy.integrate_fixed(0.4, 0.1, 0.01, 30.0, w)
    assert a[3:] == b[3:]
    for u, v in zip(a[:3], b[:3]):
        np.testing.assert_array_equal(np.asarray(u), np.asarray(v))


@pytest.mark.parametrize("theta,start,direction", [
    (0.0, (0.5, 0.0), 1.0), (0.2, (0.01, 0.0), 1.0), (0.9, (0.3, 0.3), -1.0),
])
def test_adaptive_identical(theta, start, direction):
    py, cy = _pair(theta)
    args = (start[0], start[1], 40.0, direction, 1e-9, 1e-12, 1e-3, 1e-12, 0.1,
            (-1.6, 1.6, -1.2, 1.2), [0.0, 1.0, -1.0], [0.0, 0.0, 0.0], 1e-6)
    a = py.integrate_adaptive(*args)
    b = cy.integrate_adaptive(*args)
    assert a[3:] == b[3:]
    for u, v in zip(a[:3], b[:3]):
        np.testing.assert_array_equal(np.asarray(u), np.asarray(v))


def test_orientation_identical():
    py, cy = _pair(0.5)
    xs = np.linspace(-1.5, 1.5, 31)
    ys = np.linspace(1.0, -1.0, 21)
    a = np.asarray(py.orientation_grid(xs, ys, 1e-12))
    b = np.asarray(cy.orientation_grid(xs, ys, 1e-12))
    np.testing.assert_array_equal(a, b)
    finite = a[~np.isnan(a)]
    assert np.all((finite >= 0) & (finite < math.pi))


def test_nonfinite_both_raise():
    from whorlsim.errors import NonFinite

    p, q = [(2, 0, 1.0)], [(0, 1, 1.0)]
    for cls in (_backend.PyFieldKernel, _backend.CompiledFieldKernel):
        with pytest.raises(NonFinite):
            cls(p, q).rk4_step(1e200, 0.0, 0.1)
