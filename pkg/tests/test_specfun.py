import math

import numpy as np
import pytest
from numpy.testing import assert_allclose

from starfd.exceptions import NumericError
from starfd.specfun import (QuadratureRule, gauss_legendre, hyper_pFq,
                            integrate_adaptive)


class TestHyperPFQ:
    def test_0f0_is_exp(self):
        assert_allclose(hyper_pFq([], [], 0.5), math.exp(0.5), rtol=1e-14)

    def test_1f0_is_geometric(self):
        assert_allclose(hyper_pFq([1], [], 0.3), 1.0 / 0.7, rtol=1e-14)

    def test_3f2_reference_value(self):
        # Independent oracle: mpmath.hyper with 50-digit working precision.
        mp = pytest.importorskip("mpmath")
        mp.mp.dps = 50
        ref = float(mp.hyper([1, 2, 3], [4, 5], 0.1))
        assert_allclose(hyper_pFq([1, 2, 3], [4, 5], 0.1), ref, rtol=1e-13)

    def test_matches_extended_precision_on_random_tuples(self):
        mp = pytest.importorskip("mpmath")
        mp.mp.dps = 40
        rng = np.random.default_rng(20240817)
        for _ in range(100):
            p = int(rng.integers(0, 3))
            q = int(rng.integers(p > 0, 3))  # keep q >= 1 when p > 1
            a = list(np.round(rng.uniform(0.2, 4.0, size=p), 3))
            b = list(np.round(rng.uniform(0.6, 4.0, size=q), 3))
            z = float(np.round(rng.uniform(-0.9, 0.9), 4))
            ref = float(mp.hyper(a, b, z))
            assert_allclose(hyper_pFq(a, b, z), ref, rtol=1e-10,
                            err_msg=f"a={a} b={b} z={z}")

    def test_rejects_nonpositive_integer_lower_parameter(self):
        with pytest.raises(ValueError):
            hyper_pFq([1.0], [-2.0], 0.1)

    def test_divergent_series_raises_with_diagnostic(self):
        # 3F2 at |z| > 1 diverges; the error carries the last term size.
        with pytest.raises(NumericError, match="term"):
            hyper_pFq([0.5, 1.35, 0.85], [-0.5, 1.0], 1.0e4)

    def test_z_zero(self):
        assert hyper_pFq([2.0], [3.0], 0.0) == 1.0


class TestGaussLegendre:
    def test_two_point_rule(self):
        rule = gauss_legendre(2)
        assert_allclose(rule.nodes, [-1 / math.sqrt(3), 1 / math.sqrt(3)],
                        rtol=1e-15)
        assert_allclose(rule.weights, [1.0, 1.0], rtol=1e-15)

    def test_polynomial_exactness_degree_2n_minus_1(self):
        # n-node Gauss-Legendre integrates x^k exactly for k <= 2n - 1.
        for n in (2, 5, 16):
            rule = gauss_legendre(n)
            for k in range(2 * n):
                exact = 0.0 if k % 2 else 2.0 / (k + 1)
                got = float(np.sum(rule.weights * rule.nodes ** k))
                assert abs(got - exact) < 1e-13, (n, k)

    def test_exponential_integral(self):
        rule = gauss_legendre(64)
        got = rule.integrate(np.exp, -1.0, 1.0)
        assert_allclose(got, math.e - 1.0 / math.e, rtol=1e-13)

    def test_weights_sum_and_symmetry(self):
        rule = gauss_legendre(33)
        assert abs(rule.weights.sum() - 2.0) < 1e-12
        assert_allclose(rule.nodes, -rule.nodes[::-1], atol=1e-15)

    def test_invalid_rule_rejected(self):
        with pytest.raises(ValueError):
            QuadratureRule(nodes=np.array([0.0, 0.5]),
                           weights=np.array([1.0, 0.5]))
        with pytest.raises(ValueError):
            gauss_legendre(0)


class TestIntegrateAdaptive:
    def test_monomial(self):
        got = integrate_adaptive(lambda x: x * x, 0.0, 1.0, tol=1e-12)
        assert_allclose(got, 1.0 / 3.0, rtol=1e-12)

    def test_sine(self):
        got = integrate_adaptive(math.sin, 0.0, math.pi, tol=1e-12)
        assert_allclose(got, 2.0, rtol=1e-12)

    def test_cross_module_disk_expectation(self):
        from starfd.geometry import exp_pathloss_center_disk
        m, R = 2.7, 50.0
        got = integrate_adaptive(
            lambda r: (1.0 + r) ** (-m) * 2.0 * r / R ** 2, 0.0, R,
            tol=1e-12)
        assert_allclose(got, exp_pathloss_center_disk(R, m), rtol=1e-10)

    def test_matches_scipy_quad(self):
        quad = pytest.importorskip("scipy.integrate").quad

        def f(x):
            return math.exp(-x) * math.cos(7.0 * x) / math.sqrt(x + 0.01)

        got = integrate_adaptive(f, 0.0, 3.0, tol=1e-11)
        ref, _ = quad(f, 0.0, 3.0, epsabs=1e-13, epsrel=1e-13, limit=500)
        assert_allclose(got, ref, rtol=1e-9)

    def test_bad_interval_rejected(self):
        with pytest.raises(ValueError):
            integrate_adaptive(math.sin, 1.0, 1.0)

    def test_nonfinite_integrand_raises(self):
        with pytest.raises(NumericError):
            integrate_adaptive(lambda x: float("nan") if x > 0.5 else 1.0,
                               0.0, 1.0)

    def test_depth_limit_reported(self):
        # A step at an irrational point cannot be resolved by bisection to
        # the requested tolerance; the integrator must give up loudly.
        c = 1.0 / math.sqrt(2.0)
        with pytest.raises(NumericError, match="depth"):
            integrate_adaptive(lambda x: 0.0 if x < c else 1.0, 0.0, 1.0,
                               tol=1e-15)
