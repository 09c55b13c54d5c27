import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from whorlsim.dynamics import (
    PlanarField,
    eval_field,
    hamiltonian,
    hamiltonian_gradient,
    jet,
    whorl_family,
)
from whorlsim.poly import Polynomial2

thetas = st.floats(-3, 3, allow_nan=False)
coords = st.floats(-2, 2, allow_nan=False)


def test_theta_zero_is_quintic():
    f = whorl_family(0)
    assert f.p == Polynomial2({(0, 1): 1})
    assert f.q == Polynomial2({(5, 0): -1, (3, 0): 2, (1, 0): -1})


def test_theta_terms():
    q = whorl_family(0.2).q.terms
    assert {k: v for k, v in q.items() if k[1] == 1} == {(4, 1): 0.2, (2, 1): -0.4, (0, 1): 0.2}
    qn = whorl_family(-0.2).q.terms
    assert {k: v for k, v in qn.items() if k[1] == 1} == {(4, 1): -0.2, (2, 1): 0.4, (0, 1): -0.2}


def test_params_recorded():
    assert whorl_family(0.9).params[0].name == "theta"
    assert whorl_family(0.9).params[0].value == 0.9


def test_rejects_nonfinite_theta():
    with pytest.raises(ValueError):
        whorl_family(float("nan"))


def test_rejects_zero_field():
    with pytest.raises(ValueError):
        PlanarField.from_text("0", "x - x")


@pytest.mark.parametrize(
    "theta, point, expected",
    [(0.3, (0, 0), (0, 0)), (0.2, (0, 1), (1, 0.2)), (0.9, (2, 0), (0, -18))],
)
def test_eval_field(theta, point, expected):
    np.testing.assert_allclose(eval_field(whorl_family(theta), point), expected, atol=1e-15)


@pytest.mark.parametrize("theta", [-1.3, 0, 0.2, 2.5])
def test_jacobian_at_equilibria(theta):
    np.testing.assert_array_equal(jet(whorl_family(theta), (0, 0)).jacobian, [[0, 1], [-1, theta]])
    for x in (-1, 1):
        np.testing.assert_array_equal(jet(whorl_family(theta), (x, 0)).jacobian, [[0, 1], [0, 0]])


def test_jacobian_off_equilibrium():
    np.testing.assert_array_equal(jet(whorl_family(0), (2, 0)).jacobian, [[0, 1], [-57, 0]])


def test_hamiltonian_values():
    assert hamiltonian((0, 0)) == pytest.approx(-1 / 6, abs=1e-16)
    assert hamiltonian((1, 0)) == 0 and hamiltonian((-1, 0)) == 0
    assert hamiltonian((0.5, 0)) == -0.0703125


def test_jacobian_matches_finite_differences():
    rng = np.random.default_rng(1)
    h = 1e-5
    for _ in range(100):
        theta = rng.uniform(-3, 3)
        f = whorl_family(theta)
        x, y = rng.uniform(-1.5, 1.5, size=2)
        J = jet(f, (x, y)).jacobian
        fd = np.column_stack([
            (eval_field(f, (x + h, y)) - eval_field(f, (x - h, y))) / (2 * h),
            (eval_field(f, (x, y + h)) - eval_field(f, (x, y - h))) / (2 * h),
        ])
        assert np.max(np.abs(J - fd)) < 1e-6


@settings(max_examples=200, deadline=None)
@given(thetas, coords, coords)
def test_odd_symmetry(theta, x, y):
    f = whorl_family(theta)
    a = eval_field(f, (x, y))
    b = eval_field(f, (-x, -y))
    np.testing.assert_allclose(b, -a, rtol=0, atol=1e-12 * (1 + np.abs(a).max()))


@settings(max_examples=200, deadline=None)
@given(thetas, coords, coords)
def test_parameter_reversal(theta, x, y):
    p, q = eval_field(whorl_family(theta), (x, -y))
    pr, qr = eval_field(whorl_family(-theta), (x, y))
    assert p == -pr
    assert q == pytest.approx(qr, abs=1e-12)


def test_energy_level_sets_are_invariant():
    hx, hy = hamiltonian_gradient()
    f = whorl_family(0)
    assert (hx * f.p + hy * f.q).is_zero


def test_hamiltonian_gradient_matches_closed_form():
    hx, hy = hamiltonian_gradient()
    for x, y in [(0.3, -0.7), (1.4, 0.2)]:
        h = 1e-6
        assert hx.evaluate(x, y) == pytest.approx(
            (hamiltonian((x + h, y)) - hamiltonian((x - h, y))) / (2 * h), rel=1e-7
        )
        assert hy.evaluate(x, y) == y
