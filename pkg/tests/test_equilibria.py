import cmath

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from whorlsim.dynamics import PlanarField, Window, whorl_family
from whorlsim.equilibria import (
    NORMAL_FORM_KINDS,
    NormalFormData,
    classify,
    classify_degenerate,
    classify_linear,
    eigenvalues,
    extract_normal_form,
    find_equilibria,
)
from whorlsim.errors import FlatField, NotDoubleZero, NotSecondOrderShape

BOX = Window(-2, 2, -2, 2)
THETAS = [-3, -2, -0.9, -0.2, 0, 0.2, 0.9, 2, 3]


def close_set(found, expected, tol):
    return len(found) == len(expected) and all(
        min(np.hypot(f[0] - e[0], f[1] - e[1]) for f in found) < tol for e in expected
    )


class TestFind:
    @pytest.mark.parametrize("theta", THETAS)
    def test_three_equilibria(self, theta):
        pts = find_equilibria(whorl_family(theta), BOX, 1e-10)
        assert close_set(pts, [(0, 0), (-1, 0), (1, 0)], 1e-9)

    def test_empty_window(self):
        assert find_equilibria(whorl_family(0), Window(2, 3, -1, 1)) == []

    def test_linear_center(self):
        assert find_equilibria(PlanarField.from_text("y", "-x"), Window(-1, 1, -1, 1)) == [(0.0, 0.0)]

    def test_residual_and_separation(self):
        f = PlanarField.from_text("x^2 + y^2 - 1", "x - y")
        tol = 1e-10
        pts = find_equilibria(f, BOX, tol)
        assert len(pts) == 2
        for x, y in pts:
            P, Q = f(x, y)
            assert abs(P) < tol and abs(Q) < tol
        assert np.hypot(pts[0][0] - pts[1][0], pts[0][1] - pts[1][1]) > 100 * tol

    def test_rejects_bad_input(self):
        with pytest.raises(ValueError):
            find_equilibria(whorl_family(0), Window(1, 0, 0, 1))
        with pytest.raises(ValueError):
            find_equilibria(whorl_family(0), BOX, tol=0)

    def test_stall_diagnostics_are_not_fatal(self):
        # x^2 + 1 has no real zero; every candidate stalls
        diags = []
        assert find_equilibria(PlanarField.from_text("x^2 + 1", "y"), BOX, diagnostics=diags) == []
        assert diags


class TestLinear:
    def test_center(self):
        J = [[0, 1], [-1, 0]]
        assert classify_linear(J) == "center"
        assert eigenvalues(J) == (1j, -1j)

    def test_unstable_focus(self):
        assert classify_linear([[0, 1], [-1, 0.2]]) == "unstable-focus"

    def test_unstable_node(self):
        J = [[0, 1], [-1, 3]]
        assert classify_linear(J) == "unstable-node"
        l1, l2 = eigenvalues(J)
        assert l1.real == pytest.approx((3 + 5**0.5) / 2, abs=1e-15)
        assert l2.real == pytest.approx((3 - 5**0.5) / 2, abs=1e-15)

    def test_double_zero(self):
        assert classify_linear([[0, 1], [0, 0]]) == "degenerate"

    def test_saddle(self):
        assert classify_linear([[1, 0], [0, -2]]) == "saddle"

    @pytest.mark.parametrize("theta, kind", [(2, "degenerate-node"), (-2, "degenerate-node")])
    def test_repeated(self, theta, kind):
        assert classify_linear([[0, 1], [-1, theta]]) == kind
        rep = classify(whorl_family(theta), (0, 0))
        assert rep.diagnostic == ("unstable" if theta > 0 else "stable")

    def test_eigenvalue_formula(self):
        rng = np.random.default_rng(3)
        for theta in rng.uniform(-4, 4, 50):
            l1, l2 = eigenvalues([[0, 1], [-1, theta]])
            r = cmath.sqrt(theta * theta - 4)
            assert abs(l1 - (theta + r) / 2) < 1e-12
            assert abs(l2 - (theta - r) / 2) < 1e-12


class TestNormalForm:
    @pytest.mark.parametrize("theta", [0.2, -0.7, 0.9])
    def test_cusps_with_theta(self, theta):
        f = whorl_family(theta)
        left = extract_normal_form(f, (-1, 0))
        right = extract_normal_form(f, (1, 0))
        assert (left.k, left.a_k, left.n) == (2, 4, 2)
        assert (right.k, right.a_k, right.n) == (2, -4, 2)
        assert left.b_n == pytest.approx(4 * theta, rel=1e-14)
        assert right.b_n == pytest.approx(4 * theta, rel=1e-14)

    def test_theta_zero(self):
        nf = extract_normal_form(whorl_family(0), (-1, 0))
        assert (nf.k, nf.a_k, nf.n, nf.b_n) == (2, 4, None, 0)

    def test_errors(self):
        with pytest.raises(NotSecondOrderShape):
            extract_normal_form(PlanarField.from_text("2*y", "x^2"), (0, 0))
        with pytest.raises(NotDoubleZero):
            extract_normal_form(whorl_family(0), (0, 0))
        with pytest.raises(FlatField):
            extract_normal_form(PlanarField.from_text("y", "x*y"), (0, 0))

    def test_higher_order(self):
        nf = extract_normal_form(PlanarField.from_text("y", "-x^3 + x*y + y^2"), (0, 0))
        assert nf.as_tuple() == (3, -1.0, 1, 1.0)
        assert nf.m == 1 and nf.lam == 1 - 8

    def test_invariants(self):
        with pytest.raises(ValueError):
            NormalFormData(1, 1.0, None, 0.0)
        with pytest.raises(ValueError):
            NormalFormData(2, 0.0, None, 0.0)
        with pytest.raises(ValueError):
            NormalFormData(2, 1.0, 1, 0.0)


class TestDegenerateTable:
    @pytest.mark.parametrize(
        "nf, kind",
        [
            (NormalFormData(2, 4, None, 0), "cusp"),
            (NormalFormData(2, 4, 2, 0.8), "cusp"),
            (NormalFormData(4, -1, 1, 2), "saddle-node"),
            (NormalFormData(3, 1, None, 0), "saddle"),
            (NormalFormData(3, -1, 1, 1), "focus-or-center"),
            (NormalFormData(7, -1, 2, 1), "node-degenerate-theorem"),
            (NormalFormData(7, -1, 1, 1), "elliptic-domain"),
        ],
    )
    def test_examples(self, nf, kind):
        assert classify_degenerate(nf) == kind

    @settings(max_examples=300, deadline=None)
    @given(
        st.integers(1, 5).map(lambda m: 2 * m),
        st.floats(0.1, 10),
        st.one_of(st.none(), st.integers(1, 9)),
        st.sampled_from([1.0, -1.0, 5.0, -5.0]),
    )
    def test_even_k_ignores_sign_of_a(self, k, a, n, b):
        b = 0.0 if n is None else b
        assert classify_degenerate(NormalFormData(k, a, n, b)) == classify_degenerate(
            NormalFormData(k, -a, n, b)
        )


class TestClassify:
    def test_center(self):
        assert classify(whorl_family(0), (0, 0)).kind == "center"

    def test_cusp(self):
        rep = classify(whorl_family(0.9), (1, 0))
        assert rep.kind == "cusp"
        assert rep.normal_form.k == 2

    def test_stable_focus(self):
        assert classify(whorl_family(-0.2), (0, 0)).kind == "stable-focus"

    def test_single_zero_not_classified(self):
        rep = classify(PlanarField.from_text("x", "y^2"), (0, 0))
        assert rep.kind == "not-classified"

    def test_extraction_failure_reported(self):
        rep = classify(PlanarField.from_text("y + x^2", "-x^2"), (0, 0))
        assert rep.kind == "not-classified"
        assert "x' = y" in rep.diagnostic

    @pytest.mark.parametrize("theta", THETAS)
    def test_report_invariants(self, theta):
        f = whorl_family(theta)
        for p in find_equilibria(f, BOX):
            rep = classify(f, p)
            if rep.kind == "center":
                assert all(abs(l.real) < 1e-12 and l.imag != 0 for l in rep.eigenvalues)
            if rep.kind in NORMAL_FORM_KINDS:
                assert all(abs(l) < 1e-9 for l in rep.eigenvalues)
                assert rep.normal_form is not None
