import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from arithfwd.g2pp import G2ppParams, GaussianLaw2D, RISK_NEUTRAL, bond_log_inverse, factor_law, forward_measure
from arithfwd.quadrature import QuadratureError, gaussian_expectation_2d, hermite_rule, psd_cholesky

from conftest import TABLE2_PARAMS


def law(mean, cov):
    return GaussianLaw2D(np.asarray(mean, float), np.asarray(cov, float), 1.0, RISK_NEUTRAL)


class TestHermiteRule:
    def test_order_one(self):
        r = hermite_rule(1)
        assert list(r.nodes) == [0.0] and list(r.weights) == [1.0]

    def test_order_two(self):
        r = hermite_rule(2)
        np.testing.assert_allclose(r.nodes, [-1.0, 1.0], rtol=1e-15)
        np.testing.assert_allclose(r.weights, [0.5, 0.5], rtol=1e-15)

    def test_fourth_moment(self):
        r = hermite_rule(16)
        assert np.dot(r.weights, r.nodes**4) == pytest.approx(3.0, abs=1e-12)

    @pytest.mark.parametrize("order", [0, 129, 2.5])
    def test_unsupported_order(self, order):
        with pytest.raises(ValueError):
            hermite_rule(order)

    @pytest.mark.parametrize("order", [1, 2, 5, 16, 32, 64, 128])
    def test_rule_invariants(self, order):
        r = hermite_rule(order)
        assert np.all(r.weights > 0)
        assert abs(r.weights.sum() - 1.0) < 1e-14
        np.testing.assert_array_equal(r.nodes, -r.nodes[::-1])

    @pytest.mark.parametrize("order", [3, 8, 20])
    def test_polynomial_exactness(self, order):
        r = hermite_rule(order)
        for deg in range(2 * order):
            exact = 0.0 if deg % 2 else float(math.prod(range(deg - 1, 0, -2)))
            got = np.dot(r.weights, r.nodes**deg)
            scale = float(math.prod(range(deg, 0, -2))) or 1.0
            assert got == pytest.approx(exact, rel=1e-10, abs=1e-12 * scale)


class TestExpectation:
    cov = [[0.004, -0.001], [-0.001, 0.009]]

    def test_constant(self):
        assert gaussian_expectation_2d(law([0.1, 0.2], self.cov), lambda x, y: 3.5 + 0 * x) == pytest.approx(3.5, rel=1e-14)

    def test_linear(self):
        assert gaussian_expectation_2d(law([0.1, 0.2], self.cov), lambda x, y: x) == pytest.approx(0.1, abs=1e-12)

    def test_lognormal_moment(self):
        c = np.array(self.cov)
        expected = math.exp(0.5 * (c[0, 0] + 2 * c[0, 1] + c[1, 1]))
        assert gaussian_expectation_2d(law([0, 0], c), lambda x, y: np.exp(x + y)) == pytest.approx(expected, rel=1e-10)

    def test_cross_moment(self):
        assert gaussian_expectation_2d(law([0, 0], self.cov), lambda x, y: x * y) == pytest.approx(-0.001, rel=1e-12)

    def test_degenerate_law_is_point_evaluation(self):
        assert gaussian_expectation_2d(law([0.3, -0.2], np.zeros((2, 2))), lambda x, y: np.exp(x) * y) == math.exp(0.3) * -0.2

    def test_rank_one_eta_zero(self):
        cov = [[0.01, 0.0], [0.0, 0.0]]
        val = gaussian_expectation_2d(law([0, 0.05], cov), lambda x, y: np.exp(x) + y)
        assert val == pytest.approx(math.exp(0.005) + 0.05, rel=1e-13)

    def test_perfect_correlation(self):
        cov = [[0.01, 0.02], [0.02, 0.04]]
        val = gaussian_expectation_2d(law([0, 0], cov), lambda x, y: (2 * x - y) ** 2 + x * x)
        assert val == pytest.approx(0.01, rel=1e-10, abs=1e-15)

    def test_non_psd_rejected(self):
        with pytest.raises(ValueError):
            gaussian_expectation_2d(law([0, 0], [[0.01, 0.02], [0.02, 0.01]]), lambda x, y: x)

    def test_non_finite_reports_node(self):
        with pytest.raises(QuadratureError) as info:
            gaussian_expectation_2d(law([0, 0], self.cov), lambda x, y: np.where(x > 0.1, np.inf, 0.0))
        assert info.value.node[0] > 0.1
        assert info.value.value == math.inf

    @settings(max_examples=100)
    @given(st.floats(0.0, 0.1), st.floats(0.0, 0.1), st.floats(-1, 1), st.floats(-0.2, 0.2), st.floats(-0.2, 0.2))
    def test_affine_exponential_closed_form(self, s1, s2, rho, c1, c2):
        cov = np.array([[s1 * s1, rho * s1 * s2], [rho * s1 * s2, s2 * s2]])
        m = np.array([0.01, -0.02])
        expected = math.exp(c1 * m[0] + c2 * m[1] + 0.5 * (c1 * c1 * cov[0, 0] + 2 * c1 * c2 * cov[0, 1] + c2 * c2 * cov[1, 1]))
        got = gaussian_expectation_2d(law(m, cov), lambda x, y: np.exp(c1 * x + c2 * y))
        assert got == pytest.approx(expected, rel=1e-12)


def test_psd_cholesky_reconstructs():
    c = np.array([[4.0, 2.0, 0.0], [2.0, 5.0, 0.0], [0.0, 0.0, 0.0]])
    L = psd_cholesky(c)
    np.testing.assert_allclose(L @ L.T, c, atol=1e-15)
    assert np.all(np.triu(L, 1) == 0)


@pytest.mark.parametrize("row", TABLE2_PARAMS)
def test_convergence_32_vs_64(row):
    # integrands of the factor formula at the 6m-after-1y configuration
    p = G2ppParams(*row)
    t_k, t_next, t_e, tau = 1.0, 1.0 + 1 / 360, 1.5, 1 / 360
    from arithfwd.curve import FlatCurve

    curve = FlatCurve(0.05)
    c0, ba, bb = bond_log_inverse(p, curve, t_k, t_next)
    d0, da, db = bond_log_inverse(p, curve, t_k, t_e)
    lw = factor_law(p, t_k, forward_measure(t_e))
    fns = [
        lambda x, y: np.expm1(c0 + ba * x + bb * y) / tau,
        lambda x, y: np.exp(d0 + da * x + db * y),
        lambda x, y: np.expm1(c0 + ba * x + bb * y) / tau * np.exp(d0 + da * x + db * y),
    ]
    for f in fns:
        lo, hi = gaussian_expectation_2d(lw, f, 32), gaussian_expectation_2d(lw, f, 64)
        assert abs(lo / hi - 1) < 1e-10
