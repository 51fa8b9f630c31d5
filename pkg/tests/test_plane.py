import math

import numpy as np
import pytest

from conetrace.plane import (
    ComplexTime,
    as_time,
    complex_bound_reference,
    hk_plane,
    hk_plane_result,
)


def rel(a, b):
    return abs(a - b) / max(abs(a), abs(b), 1e-300)


class TestComplexTime:
    def test_invariants(self):
        z = ComplexTime(2.0, -3.0)
        assert z.eta == 2.0 / (4 * (4.0 + 9.0))
        assert z.eta <= 1.0 / (4 * z.t)
        assert z.modulus == math.hypot(2.0, 3.0)
        with pytest.raises(ValueError):
            ComplexTime(0.0, 1.0)
        with pytest.raises(ValueError):
            ComplexTime(-1.0)

    def test_coercion(self):
        assert as_time(1.5) == ComplexTime(1.5)
        assert as_time(1 + 2j) == ComplexTime(1.0, 2.0)
        z = ComplexTime(1.0, 2.0)
        assert as_time(z) is z


class TestRealTimeKernel:
    def test_continuity_across_branch(self):
        near = hk_plane(1.0, 1e-6)
        at = hk_plane(1.0, 0.0)
        assert rel(near, at) < 1e-5

    def test_monotone_decay_in_distance(self):
        vals = [hk_plane(1.0, d).real for d in (0.5, 1.0, 2.0, 4.0)]
        assert all(a > b for a, b in zip(vals, vals[1:]))

    def test_positive_for_real_time(self):
        for t in (0.05, 1.0, 8.0):
            for d in (0.0, 0.3, 2.0):
                v = hk_plane(t, d)
                assert v.imag == 0.0 and v.real > 0.0

    def test_long_time_envelope(self):
        # |K(t,0)| <= e^{-t/4}/(4 pi t), decaying to zero.
        prev = None
        for t in (1.0, 10.0, 50.0, 100.0):
            v = hk_plane(t, 0.0).real
            assert v <= math.exp(-t / 4) / (4 * math.pi * t) * (1 + 1e-12)
            if prev is not None:
                assert v < prev
            prev = v

    def test_semigroup_diagonal_spot_check(self):
        # K(t1+t2, 0) against an independent refined-trapezoid evaluation of
        # the diagonal spectral integral.
        for t1, t2 in ((0.5, 0.5), (1.0, 2.0)):
            t = t1 + t2
            r = np.linspace(0.0, 30.0, 2 ** 18)
            f = np.exp(-(0.25 + r * r) * t) * np.tanh(np.pi * r) * r
            coarse = np.trapezoid(f[::2], r[::2])
            fine = np.trapezoid(f, r)
            oracle = (4 * fine - coarse) / 3 / (2 * np.pi)
            assert rel(hk_plane(t, 0.0).real, oracle) < 1e-10

    def test_substitution_against_trapezoid_oracle(self, rng):
        # Independent path: substitute u = d + w^2 instead of
        # cosh u = cosh d + v^2, integrate by refined trapezoid + Richardson.
        for _ in range(20):
            t = float(rng.uniform(0.2, 5.0))
            d = float(rng.uniform(0.1, 4.0))
            U = math.sqrt(d * d + 4 * t * math.log(1e16))
            W = math.sqrt(U - d)

            def integrand(w):
                u = d + w * w
                num = 2.0 * w * u * np.exp(-u * u / (4 * t))
                den = np.sqrt(np.cosh(u) - np.cosh(d))
                # Limit at w = 0: den ~ w sqrt(sinh d).
                out = np.where(w == 0.0, 2.0 * d * np.exp(-d * d / (4 * t))
                               / np.sqrt(np.sinh(d)), num / np.maximum(den, 1e-300))
                return out

            w = np.linspace(0.0, W, 2 ** 17 + 1)
            f = integrand(w)
            coarse = np.trapezoid(f[::2], w[::2])
            fine = np.trapezoid(f, w)
            integral = (4 * fine - coarse) / 3
            pref = math.sqrt(2) * math.exp(-t / 4) / (4 * math.pi * t) ** 1.5
            assert rel(hk_plane(t, d).real, pref * integral) < 1e-8

    def test_huge_distance_returns_zero_with_envelope(self):
        res = hk_plane_result(1.0, 650.0)
        assert res.value == 0.0
        assert res.error_estimate >= 0.0


class TestComplexTimeKernel:
    def test_conjugate_symmetry(self):
        for t in (0.5, 1.0, 2.0):
            for s in (0.5, 1.0, 3.0):
                z = ComplexTime(t, s)
                a = hk_plane(z, 1.2)
                b = hk_plane(z.conjugate(), 1.2)
                assert a == b.conjugate()

    def test_bound_reduces_to_kernel_at_real_time(self):
        for d in (0.0, 1.0, 3.0):
            assert complex_bound_reference(ComplexTime(1.0), d) == hk_plane(1.0, d).real

    def test_envelope_grid(self):
        for t in (0.5, 1.0):
            for s in (0.0, 1.0, 5.0):
                for d in (0.0, 1.0, 3.0):
                    z = ComplexTime(t, s)
                    k = abs(hk_plane(z, d))
                    bound = complex_bound_reference(z, d)
                    assert k <= bound * (1 + 1e-13)
                    if s != 0.0:
                        assert k < bound

    def test_tau_dominates_t(self):
        for t in (0.5, 2.0):
            for s in (0.0, 1.0, 4.0):
                zt = ComplexTime(t, s)
                tau = zt.modulus ** 2 / zt.t
                assert tau >= t - 1e-15
                if s == 0.0:
                    assert rel(tau, t) < 1e-15

    def test_error_estimate_scales(self):
        res = hk_plane_result(ComplexTime(1.0, 2.0), 1.0)
        assert res.error_estimate < 1e-10 * max(abs(res.value), 1.0)


class TestDomainErrors:
    def test_negative_distance(self):
        with pytest.raises(ValueError):
            hk_plane(1.0, -0.5)
