import math

import mpmath
import numpy as np
import pytest

from conetrace.numerics import (
    QuadratureConfig,
    QuadratureError,
    gaussian_tail_bound,
    geometric_ladder,
    integrate_adaptive,
    integrate_gaussian_tail,
    riemann_zeta,
)


def rel(a, b):
    return abs(a - b) / max(abs(a), abs(b), 1e-300)


class TestIntegrateAdaptive:
    def test_constant(self):
        res = integrate_adaptive(lambda x: np.ones_like(x), 0.0, 1.0)
        assert rel(res.value, 1.0) < 1e-13

    def test_sine_closed_form(self):
        res = integrate_adaptive(lambda x: np.sin(x), 0.0, math.pi)
        assert rel(res.value, 2.0) < 1e-12

    def test_truncated_gaussian_vs_erf_oracle(self):
        # Oracle: half the Gaussian mass from a high-precision evaluation.
        U = 9.0
        res = integrate_adaptive(lambda x: np.exp(-x * x), 0.0, U)
        oracle = float(mpmath.sqrt(mpmath.pi) / 2 * mpmath.erf(U))
        assert rel(res.value, oracle) < 1e-12

    def test_error_estimate_covers_refinement(self):
        # Halving rel_tol moves the value by less than the reported estimate.
        integrands = [
            lambda x: np.exp(-x * x) * np.cos(5 * x),
            lambda x: 1.0 / (1.0 + 30.0 * x * x),
            lambda x: np.sqrt(x) * np.exp(-x),
        ]
        for f in integrands:
            loose = integrate_adaptive(f, 0.0, 10.0, QuadratureConfig(rel_tol=1e-6))
            tight = integrate_adaptive(f, 0.0, 10.0, QuadratureConfig(rel_tol=5e-7))
            assert abs(loose.value - tight.value) <= loose.error_estimate + 1e-15

    def test_complex_coupled(self):
        z = 1 + 2j
        res = integrate_adaptive(lambda u: np.exp(-u * u / (4 * z)), 0.0, 40.0)
        assert rel(res.value, np.sqrt(np.pi * z)) < 1e-12

    def test_failure_carries_partial_value(self):
        cfg = QuadratureConfig(rel_tol=1e-10, max_subdivisions=8)
        with pytest.raises(QuadratureError) as err:
            integrate_adaptive(lambda x: 1.0 / x, 1e-300, 1.0, cfg)
        assert err.value.partial_value.real > 0
        assert err.value.error_estimate > 0

    def test_rejects_bad_interval(self):
        with pytest.raises(ValueError):
            integrate_adaptive(lambda x: x, 1.0, 0.0)

    def test_deterministic(self):
        f = lambda x: np.exp(-x) * np.sin(7 * x)
        a = integrate_adaptive(f, 0.0, 20.0)
        b = integrate_adaptive(f, 0.0, 20.0)
        assert a.value == b.value and a.error_estimate == b.error_estimate

    def test_breakpoints_catch_narrow_mass(self):
        # Mass near zero inside a vast interval is invisible to a single
        # panel but recovered with a geometric ladder.
        f = lambda v: 1.0 / (1.0 + v * v)
        res = integrate_adaptive(f, 0.0, 1e10,
                                 breakpoints=geometric_ladder(0.0, 1e10, 0.5))
        assert rel(res.value, math.pi / 2) < 1e-10


class TestGaussianTail:
    def test_pure_gaussian(self):
        res = integrate_gaussian_tail(lambda u: np.exp(-u * u), 1.0)
        assert rel(res.value, math.sqrt(math.pi) / 2) < 1e-12

    def test_linear_times_gaussian(self):
        res = integrate_gaussian_tail(lambda u: u * np.exp(-u * u / 4), 0.25,
                                      poly_degree=1)
        assert rel(res.value, 2.0) < 1e-12

    def test_cone_integrand_truncation_doubling(self, cfg):
        s2 = math.sin(math.pi / 3) ** 2

        def g(u):
            return np.exp(-u * u / 4) * np.cosh(u / 2) / (np.sinh(u / 2) ** 2 + s2)

        res = integrate_gaussian_tail(g, 0.25, cfg, envelope_coeff=1.0 / s2)
        U = math.sqrt(math.log(1.0 / cfg.tail_cutoff_tol) / 0.25)
        ref = integrate_adaptive(g, 0.0, 2.0 * U, cfg)
        assert rel(res.value, ref.value) < 1e-10

    def test_domain_error(self):
        with pytest.raises(ValueError):
            integrate_gaussian_tail(lambda u: np.exp(-u * u), 0.0)
        with pytest.raises(ValueError):
            integrate_gaussian_tail(lambda u: np.exp(-u * u), -1.0)

    def test_randomized_agreement_with_plain_adaptive(self, rng, cfg):
        # 100 random smooth envelopes: the truncated result matches plain
        # adaptive integration over [0, 2U] within combined estimates.
        for _ in range(100):
            eta = float(rng.uniform(0.05, 5.0))
            a, b, c = rng.uniform(-2, 2, size=3)
            w = float(rng.uniform(0.0, 3.0))

            def g(u):
                return (a + b * u + c * u * u) * np.cos(w * u) * np.exp(-eta * u * u)

            coeff = 3.0 * max(abs(a), abs(b), abs(c), 1e-6)
            res = integrate_gaussian_tail(g, eta, cfg, poly_degree=2,
                                          envelope_coeff=coeff)
            U = 2.0 * math.sqrt(math.log(1.0 / cfg.tail_cutoff_tol) / eta)
            ref = integrate_adaptive(g, 0.0, 2.0 * U, cfg)
            tol = res.error_estimate + ref.error_estimate + 1e-14
            assert abs(res.value - ref.value) <= tol

    def test_tail_bound_decreases(self):
        bounds = [gaussian_tail_bound(1.0, U) for U in (1.0, 2.0, 4.0, 8.0)]
        assert all(x > y for x, y in zip(bounds, bounds[1:]))


class TestRiemannZeta:
    def test_basel(self):
        assert rel(riemann_zeta(2.0), math.pi ** 2 / 6) < 1e-12

    def test_near_pole_laurent_oracle(self):
        # zeta(1+x) = 1/x + euler_gamma + O(x)
        x = 1e-6
        expected = 1.0 / x + 0.5772156649015329
        assert abs(riemann_zeta(1.0 + x) - expected) / expected < 0.01

    def test_s3_brute_force_oracle(self):
        K = 10 ** 7
        k = np.arange(1, K + 1, dtype=float)
        partial = float(np.sum(1.0 / (k ** 3)))
        # Midpoint tail estimate: sum_{k>K} k^-3 = 1/(2 (K+1/2)^2) + O(K^-4).
        oracle = partial + 1.0 / (2.0 * (K + 0.5) ** 2)
        assert rel(riemann_zeta(3.0), oracle) < 1e-10

    def test_strictly_decreasing_to_one(self):
        values = [riemann_zeta(float(s)) for s in (2, 4, 8, 16, 32)]
        assert all(x > y for x, y in zip(values, values[1:]))
        assert abs(values[-1] - 1.0) < 1e-9

    def test_domain_error(self):
        for s in (1.0, 0.5, -3.0):
            with pytest.raises(ValueError):
                riemann_zeta(s)

    def test_matches_mpmath_across_range(self):
        for s in (1.001, 1.5, 2.5, 7.0, 19.0):
            assert rel(riemann_zeta(s), float(mpmath.zeta(s))) < 1e-12


class TestConfigValidation:
    def test_invariants(self):
        with pytest.raises(ValueError):
            QuadratureConfig(rel_tol=0.0)
        with pytest.raises(ValueError):
            QuadratureConfig(abs_tol=-1.0)
        with pytest.raises(ValueError):
            QuadratureConfig(max_subdivisions=0)
        with pytest.raises(ValueError):
            QuadratureConfig(tail_cutoff_tol=1e-3)

    def test_defaults(self, cfg):
        assert cfg.rel_tol == 1e-10
        assert cfg.tail_cutoff_tol == 1e-14
