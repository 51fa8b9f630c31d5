"""Heat kernels and heat traces on the infinite hyperbolic cone.

The trace of the periodized kernel minus the plane kernel over the cone
truncated below volume delta has the closed form

    I_{q,delta}(z) = e^{-z/4} / (2 q sqrt(pi z))
                     * sum_{n=1}^{q-1} (1/sin(n pi/q))
                       int_{d(n,q,delta)}^inf e^{-u^2/4z} f'(u, q, n) du

where, writing sigma = sin(n pi / q) and P = 1 + q delta / 2 pi,

    f'(u) = (P sigma / sqrt 2) sinh u
            / [ (cosh u - 1 + 2 sigma^2) sqrt(cosh u - cosh d) ],
    d = d(n,q,delta) = arccosh(1 + 2 sigma^2 (P^2 - 1)),

and int f' du = pi/2 over the full range.  The substitution
cosh u = cosh d + v^2 turns the n-th integral into the smooth Lorentzian
form

    J_n = sqrt(2) P sigma int_0^inf e^{-u(v)^2/4z} / (v^2 + 2 sigma^2 P^2) dv,

which this module integrates.  At delta = 0 the trace reduces to the
elliptic trace of a single cone, for which the direct integral

    (e^{-z/4} / (q sqrt(16 pi z))) sum_n int_0^inf
        e^{-u^2/4z} cosh(u/2) / (sinh^2(u/2) + sigma^2) du

is implemented as an independent code path, along with the classical
full-line representation

    sum_n e^{-t/4} / (2 q sigma)
        int_-inf^inf e^{-2 pi n r / q - t r^2} / (1 + e^{-2 pi r}) dr

(real time), equal to it by Fourier duality.  A brute-force oracle
integrates the periodized kernel difference over the truncated cone
directly, validating the closed-form algebra.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .geometry import ConeParams, ConePoint, arccosh1p, reduced_sine
from .numerics import (
    DEFAULT_CONFIG,
    IntegralResult,
    QuadratureConfig,
    QuadratureError,
    geometric_ladder,
    integrate_adaptive,
    riemann_zeta,
)
from .plane import ComplexTime, as_time, hk_plane, hk_plane_envelope

__all__ = [
    "DegenerationBoundParams",
    "TruncationGeometry",
    "cone_heat_kernel",
    "periodized_kernel",
    "elliptic_cone_trace",
    "elliptic_cone_trace_result",
    "elliptic_cone_trace_hejhal",
    "truncated_cone_trace",
    "truncated_cone_trace_result",
    "truncated_cone_trace_oracle",
    "truncated_cone_trace_oracle_result",
    "degeneration_bound",
]

TWO_PI = 2.0 * math.pi


def _cone_order(cone) -> int:
    """Accept ConeParams or a bare integer order; q = 1 is the empty-sum limit."""
    q = cone.q if isinstance(cone, ConeParams) else int(cone)
    if q < 1:
        raise ValueError(f"cone order must be >= 1, got {q}")
    return q


def _index_pairs(q: int, use_pair_symmetry: bool):
    """Yield (n, weight) covering n = 1..q-1, folding the n <-> q-n symmetry."""
    if not use_pair_symmetry:
        for n in range(1, q):
            yield n, 1
        return
    for n in range(1, q // 2 + 1):
        if 2 * n == q:
            yield n, 1
        else:
            yield n, 2


@dataclass(frozen=True)
class DegenerationBoundParams:
    """Inputs of the explicit truncated-trace bound.

    eta is the Gaussian decay rate of the time point, gamma =
    log(1 + (delta/2pi)^2), and delta > 0 is the truncation level.
    """

    eta: float
    gamma: float
    delta: float

    def __post_init__(self) -> None:
        if not (self.eta > 0.0):
            raise ValueError(f"eta must be positive, got {self.eta}")
        if not (self.delta > 0.0):
            raise ValueError(
                f"delta must be positive (gamma = 0 puts zeta at its pole), "
                f"got {self.delta}")
        expected = math.log1p((self.delta / TWO_PI) ** 2)
        if not math.isclose(self.gamma, expected, rel_tol=1e-12):
            raise ValueError(f"gamma inconsistent with delta: {self.gamma} vs {expected}")

    @classmethod
    def from_time(cls, z, delta: float) -> "DegenerationBoundParams":
        zt = as_time(z)
        if not (delta > 0.0):
            raise ValueError(f"delta must be positive, got {delta}")
        return cls(eta=zt.eta, gamma=math.log1p((delta / TWO_PI) ** 2), delta=delta)


@dataclass(frozen=True)
class TruncationGeometry:
    """Helper evaluations a, b, c, d entering the truncated-trace algebra.

    For fixed (n, q, delta): a(rho) is the rotation displacement at height
    rho, b(x) its form in the x = cosh(rho) variable, c(u) the inverse
    relation, and d() = b(1 + q delta / 2pi) the lower integration limit.
    """

    n: int
    q: int
    delta: float

    def __post_init__(self) -> None:
        if self.q < 2 or not (1 <= self.n <= self.q - 1):
            raise ValueError(f"need q >= 2 and 1 <= n <= q-1, got n={self.n}, q={self.q}")
        if self.delta < 0.0:
            raise ValueError(f"delta must be >= 0, got {self.delta}")

    @property
    def sigma(self) -> float:
        return reduced_sine(self.n, self.q)

    def a(self, rho: float) -> float:
        """Displacement arccosh(1 + 2 sigma^2 sinh^2 rho)."""
        return arccosh1p(2.0 * self.sigma ** 2 * math.sinh(rho) ** 2)

    def b(self, x: float) -> float:
        """Displacement in the x = cosh(rho) variable, x >= 1."""
        if x < 1.0:
            raise ValueError(f"b requires x >= 1, got {x}")
        return arccosh1p(2.0 * self.sigma ** 2 * (x * x - 1.0))

    def c(self, u: float) -> float:
        """Solve cosh u - 1 = 2 sigma^2 (x^2 - 1) for x >= 1."""
        if u < 0.0:
            raise ValueError(f"c requires u >= 0, got {u}")
        return math.sqrt(1.0 + 2.0 * math.sinh(0.5 * u) ** 2 / (2.0 * self.sigma ** 2))

    def d(self) -> float:
        """Lower integration limit b(1 + q delta / 2pi)."""
        return arccosh1p(self._cosh_d_minus_1())

    def _cosh_d_minus_1(self) -> float:
        # 2 sigma^2 (P^2 - 1) with P = 1 + q delta / 2pi, assembled without
        # cancellation: P^2 - 1 = (P-1)(P+1) and P - 1 = q delta / 2pi exactly.
        pm1 = self.q * self.delta / TWO_PI
        return 2.0 * self.sigma ** 2 * pm1 * (pm1 + 2.0)


def periodized_kernel(q: int, z, p1: ConePoint, p2: ConePoint,
                      cfg: QuadratureConfig = DEFAULT_CONFIG) -> complex:
    """Sum of plane kernels over the order-q rotation orbit of p2.

    Pairwise displacements come from the hyperbolic law of cosines in the
    disc model, arranged as cosh d - 1 = 2 sinh^2((rho1-rho2)/2)
    + 2 sinh(rho1) sinh(rho2) sin^2(dphi/2) to avoid cancellation.  q = 1
    reduces to the plane kernel itself.
    """
    if q < 1:
        raise ValueError(f"order must be >= 1, got {q}")
    zt = as_time(z)
    total = 0.0 + 0.0j
    for n in range(q):
        dphi = (p1.theta - p2.theta) / q - TWO_PI * n / q
        cm1 = (2.0 * math.sinh(0.5 * (p1.rho - p2.rho)) ** 2
               + 2.0 * math.sinh(p1.rho) * math.sinh(p2.rho) * math.sin(0.5 * dphi) ** 2)
        total += hk_plane(zt, arccosh1p(cm1), cfg)
    return total


def cone_heat_kernel(cone: ConeParams, z, p1: ConePoint, p2: ConePoint,
                     cfg: QuadratureConfig = DEFAULT_CONFIG) -> complex:
    """Heat kernel on the cone: periodization of the plane kernel."""
    return periodized_kernel(cone.q, z, p1, p2, cfg)


def _lorentzian_integral(zt: ComplexTime, sigma: float, P: float,
                         cfg: QuadratureConfig) -> IntegralResult:
    """J_n = sqrt(2) P sigma int_0^inf e^{-u(v)^2/4z} / (v^2 + 2 sigma^2 P^2) dv.

    u(v) = arccosh(cosh d + v^2) with cosh d - 1 = 2 sigma^2 (P^2 - 1); the
    truncation radius in u comes from the decay rate eta, mapped to v-space,
    and the discarded tail is below e^{-eta U^2} * pi/2.
    """
    eta = zt.eta
    z = zt.z
    pm1 = P - 1.0
    cm1 = 2.0 * sigma * sigma * pm1 * (pm1 + 2.0)
    d = arccosh1p(cm1)

    U = math.sqrt(d * d + math.log(1.0 / cfg.tail_cutoff_tol) / eta)
    U = min(max(U, d + 1.0), 700.0)
    V = math.sqrt(2.0 * math.sinh(0.5 * U) ** 2 - cm1)
    # Coefficient of the Lorentzian factor; also its half-width.
    amp = math.sqrt(2.0) * P * sigma

    def integrand(v):
        u = arccosh1p(cm1 + v * v)
        return amp * np.exp(-u * u / (4.0 * z)) / (v * v + 2.0 * sigma * sigma * P * P)

    ladder = geometric_ladder(0.0, V, min(amp, 0.5 * V))
    res = integrate_adaptive(integrand, 0.0, V, cfg, breakpoints=ladder)
    tail = math.exp(-eta * U * U) * min(0.5 * math.pi, amp / V)
    return IntegralResult(res.value, res.error_estimate + tail)


def truncated_cone_trace_result(cone, delta: float, z,
                                cfg: QuadratureConfig = DEFAULT_CONFIG,
                                *, use_pair_symmetry: bool = True) -> IntegralResult:
    """Closed-form truncated trace I_{q,delta}(z) with error estimate.

    delta = 0 recovers the single-cone elliptic trace.  The n-sum is folded
    over the exact n <-> q-n symmetry (weight 2, middle term once for even
    q); set use_pair_symmetry=False to sum all q-1 terms independently.
    """
    q = _cone_order(cone)
    if delta < 0.0:
        raise ValueError(f"delta must be >= 0, got {delta}")
    zt = as_time(z)
    if q == 1:
        return IntegralResult(0.0 + 0.0j, 0.0)
    P = 1.0 + q * delta / TWO_PI
    total = 0.0 + 0.0j
    err = 0.0
    for n, weight in _index_pairs(q, use_pair_symmetry):
        sigma = reduced_sine(n, q)
        try:
            res = _lorentzian_integral(zt, sigma, P, cfg)
        except QuadratureError as exc:
            raise QuadratureError(
                f"truncated cone trace failed at index n={n} (q={q}, "
                f"delta={delta}): {exc}", exc.partial_value, exc.error_estimate) from exc
        total += weight * res.value / sigma
        err += weight * res.error_estimate / sigma
    pref = np.exp(-zt.z / 4.0) / (2.0 * q * np.sqrt(math.pi * zt.z))
    return IntegralResult(pref * total, abs(pref) * err)


def truncated_cone_trace(cone, delta: float, z,
                         cfg: QuadratureConfig = DEFAULT_CONFIG,
                         *, use_pair_symmetry: bool = True) -> complex:
    """Closed-form truncated trace I_{q,delta}(z); real and positive for real z."""
    res = truncated_cone_trace_result(cone, delta, z, cfg,
                                      use_pair_symmetry=use_pair_symmetry)
    if as_time(z).is_real:
        return complex(res.value.real, 0.0)
    return res.value


def elliptic_cone_trace_result(cone, z, cfg: QuadratureConfig = DEFAULT_CONFIG,
                               *, use_pair_symmetry: bool = True) -> IntegralResult:
    """Single-cone elliptic trace via the direct cosh/sinh^2 integral."""
    q = _cone_order(cone)
    zt = as_time(z)
    if q == 1:
        return IntegralResult(0.0 + 0.0j, 0.0)
    z_ = zt.z
    eta = zt.eta
    # Cap keeps sinh^2(u/2) representable; the tail bound absorbs the rest.
    U = min(math.sqrt(math.log(1.0 / cfg.tail_cutoff_tol) / eta) + 4.0, 1400.0)
    total = 0.0 + 0.0j
    err = 0.0
    for n, weight in _index_pairs(q, use_pair_symmetry):
        sigma = reduced_sine(n, q)
        s2 = sigma * sigma

        def integrand(u):
            # sinh^2 may overflow to inf past u ~ 1420; the quotient then
            # correctly flushes to zero.
            with np.errstate(over="ignore"):
                return (np.exp(-u * u / (4.0 * z_)) * np.cosh(0.5 * u)
                        / (np.sinh(0.5 * u) ** 2 + s2))

        ladder = geometric_ladder(0.0, U, min(2.0 * sigma, 0.5 * U))
        try:
            res = integrate_adaptive(integrand, 0.0, U, cfg, breakpoints=ladder)
        except QuadratureError as exc:
            raise QuadratureError(
                f"elliptic cone trace failed at index n={n} (q={q}): {exc}",
                exc.partial_value, exc.error_estimate) from exc
        # Tail: integrand modulus <= 4 e^{-u/2} e^{-eta u^2} for u >= 2.
        tail = 2.0 * math.exp(-0.5 * U - eta * U * U) / (eta * U)
        total += weight * res.value
        err += weight * (res.error_estimate + tail)
    pref = np.exp(-z_ / 4.0) / (q * np.sqrt(16.0 * math.pi * z_))
    return IntegralResult(pref * total, abs(pref) * err)


def elliptic_cone_trace(cone, z, cfg: QuadratureConfig = DEFAULT_CONFIG,
                        *, use_pair_symmetry: bool = True) -> complex:
    """Single-cone elliptic trace; real and positive for real time."""
    res = elliptic_cone_trace_result(cone, z, cfg, use_pair_symmetry=use_pair_symmetry)
    if as_time(z).is_real:
        return complex(res.value.real, 0.0)
    return res.value


def elliptic_cone_trace_hejhal(cone, t: float,
                               cfg: QuadratureConfig = DEFAULT_CONFIG,
                               *, use_pair_symmetry: bool = True) -> float:
    """Single-cone elliptic trace via the full-line representation (real time only).

    sum_n e^{-t/4}/(2 q sin(n pi/q)) int_-inf^inf
        e^{-2 pi n r / q - t r^2} / (1 + e^{-2 pi r}) dr.

    The n and q-n integrands map to each other under r -> -r, so the same
    pair folding applies.  The sigmoid factor is evaluated through
    logaddexp to stay finite on the negative axis.
    """
    if isinstance(t, ComplexTime):
        if not t.is_real:
            raise ValueError("the full-line representation is stated for real time only")
        t = t.t
    t = float(t)
    if not (t > 0.0):
        raise ValueError(f"need t > 0, got {t}")
    q = _cone_order(cone)
    if q == 1:
        return 0.0
    R = math.sqrt(math.log(1.0 / cfg.tail_cutoff_tol) / t) + 2.0
    total = 0.0
    for n, weight in _index_pairs(q, use_pair_symmetry):
        sigma = reduced_sine(n, q)
        rate = TWO_PI * n / q

        def integrand(r):
            return np.exp(-rate * r - t * r * r - np.logaddexp(0.0, -TWO_PI * r))

        try:
            res = integrate_adaptive(integrand, -R, R, cfg)
        except QuadratureError as exc:
            raise QuadratureError(
                f"full-line elliptic trace failed at index n={n} (q={q}): {exc}",
                exc.partial_value, exc.error_estimate) from exc
        total += weight * res.value.real / (2.0 * q * sigma)
    return math.exp(-t / 4.0) * total


def truncated_cone_trace_oracle_result(cone, delta: float, z,
                                       cfg: QuadratureConfig = DEFAULT_CONFIG
                                       ) -> IntegralResult:
    """Brute-force truncated trace: integrate the periodized-kernel difference.

    I_{q,delta}(z) = (2 pi / q) int_{r(delta,q)}^inf
        sum_{n=1}^{q-1} K(z, a(n,q,rho)) sinh(rho) drho
    with r(delta,q) = arccosh(1 + q delta / 2pi).  Every kernel value is an
    adaptive quadrature of its own, so this path is slow but shares nothing
    with the closed-form algebra it validates.
    """
    q = _cone_order(cone)
    if delta < 0.0:
        raise ValueError(f"delta must be >= 0, got {delta}")
    zt = as_time(z)
    if q == 1:
        return IntegralResult(0.0 + 0.0j, 0.0)
    inner_cfg = cfg.with_rel_tol(max(cfg.rel_tol * 0.1, 1e-12))
    rho0 = arccosh1p(q * delta / TWO_PI)
    sigmas = [reduced_sine(n, q) for n in range(1, q)]

    def kernel_sum(rho: float) -> complex:
        tot = 0.0 + 0.0j
        sh2 = math.sinh(rho) ** 2
        for sg in sigmas:
            tot += hk_plane(zt, arccosh1p(2.0 * sg * sg * sh2), inner_cfg)
        return tot * math.sinh(rho)

    def envelope(rho: float) -> float:
        sh2 = math.sinh(rho) ** 2
        tot = sum(hk_plane_envelope(zt, arccosh1p(2.0 * sg * sg * sh2)) for sg in sigmas)
        return tot * math.sinh(rho)

    # March the upper limit out until the integrand envelope is negligible
    # against the scale probed just inside the domain.
    scale = abs(kernel_sum(rho0 + 0.5)) + abs(kernel_sum(rho0 + 1.0)) + 1e-300
    R = rho0 + 3.0
    while envelope(R) > 1e-16 * scale and R < rho0 + 300.0:
        R += 1.0

    def integrand(rho_arr):
        return np.array([kernel_sum(float(r)) for r in np.atleast_1d(rho_arr)])

    outer = integrate_adaptive(integrand, rho0, R, cfg)
    measure = TWO_PI / q
    value = measure * outer.value
    # Inner kernels are relatively accurate to inner_cfg.rel_tol; account for
    # them crudely against the magnitude of the result.
    err = measure * outer.error_estimate + abs(value) * inner_cfg.rel_tol * 10.0
    return IntegralResult(value, err)


def truncated_cone_trace_oracle(cone, delta: float, z,
                                cfg: QuadratureConfig = DEFAULT_CONFIG) -> complex:
    """Brute-force truncated trace; see truncated_cone_trace_oracle_result."""
    res = truncated_cone_trace_oracle_result(cone, delta, z, cfg)
    if as_time(z).is_real:
        return complex(res.value.real, 0.0)
    return res.value


def degeneration_bound(params: DegenerationBoundParams, z) -> float:
    """Explicit q-independent bound on |I_{q,delta}(z)|.

    (e^{-t/4} / sqrt(pi |z|)) (delta/2pi)^{-2 eta gamma}
        [zeta(1 + 2 eta gamma) + pi].
    """
    zt = as_time(z)
    if not math.isclose(params.eta, zt.eta, rel_tol=1e-12):
        raise ValueError(f"params.eta {params.eta} does not match the time point "
                         f"(eta = {zt.eta})")
    ex = 2.0 * params.eta * params.gamma
    return (math.exp(-zt.t / 4.0) / math.sqrt(math.pi * zt.modulus)
            * (params.delta / TWO_PI) ** (-ex)
            * (riemann_zeta(1.0 + ex) + math.pi))
