"""Heat kernel on the hyperbolic plane for real and complex time.

For distance d > 0 the kernel is

    K(z, d) = sqrt(2) e^{-z/4} / (4 pi z)^{3/2}
              * int_d^inf u e^{-u^2/4z} / sqrt(cosh u - cosh d) du,

with complex time z = t + i s, t > 0, and on the diagonal

    K(z, 0) = (1/2pi) int_0^inf e^{-(1/4 + r^2) z} tanh(pi r) r dr.

The inverse-square-root endpoint singularity at u = d is removed by the
substitution cosh u = cosh d + v^2, which yields the everywhere-smooth
integrand 2 u(v) e^{-u(v)^2/4z} / sinh(u(v)) with u(v) = arccosh(cosh d + v^2).
The modulus of the oscillatory factor is |e^{-u^2/4z}| = e^{-eta u^2} with
eta = t / (4(t^2 + s^2)), which drives all analytic truncations.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .geometry import arccosh1p
from .numerics import (
    DEFAULT_CONFIG,
    IntegralResult,
    QuadratureConfig,
    geometric_ladder,
    integrate_adaptive,
    integrate_gaussian_tail,
)

__all__ = [
    "ComplexTime",
    "as_time",
    "hk_plane",
    "hk_plane_result",
    "hk_plane_envelope",
    "complex_bound_reference",
]

# Beyond this displacement cosh overflows; the kernel is below 1e-130 there.
_MAX_DISPLACEMENT = 600.0


@dataclass(frozen=True)
class ComplexTime:
    """A complex time point z = t + i s with t > 0."""

    t: float
    s: float = 0.0

    def __post_init__(self) -> None:
        if not (self.t > 0.0 and math.isfinite(self.t) and math.isfinite(self.s)):
            raise ValueError(f"need finite t > 0, got t={self.t}, s={self.s}")

    @property
    def z(self) -> complex:
        return complex(self.t, self.s)

    @property
    def eta(self) -> float:
        """Gaussian decay rate t / (4 (t^2 + s^2)) of |e^{-u^2/4z}|."""
        return self.t / (4.0 * (self.t * self.t + self.s * self.s))

    @property
    def modulus(self) -> float:
        return math.hypot(self.t, self.s)

    @property
    def is_real(self) -> bool:
        return self.s == 0.0

    def conjugate(self) -> "ComplexTime":
        return ComplexTime(self.t, -self.s)

    @classmethod
    def from_complex(cls, z: complex) -> "ComplexTime":
        return cls(float(z.real), float(z.imag))


def as_time(z) -> ComplexTime:
    """Coerce a ComplexTime, complex, or positive float to ComplexTime."""
    if isinstance(z, ComplexTime):
        return z
    if isinstance(z, complex):
        return ComplexTime.from_complex(z)
    return ComplexTime(float(z))


def _prefactor(z: complex) -> complex:
    # Principal branch; z lies in the open right half-plane so no cut is crossed.
    return math.sqrt(2.0) * np.exp(-z / 4.0) / np.power(4.0 * math.pi * z, 1.5)


def hk_plane_envelope(z, d: float) -> float:
    """Crude upper bound on |K(z, d)|, used for truncation decisions.

    Splits the u-integral at d+1: the collar piece is bounded by the local
    square-root primitive, the far piece by 1/sqrt(cosh u - cosh d)
    <= 2.4 e^{-u/2} valid for u >= d + 1.
    """
    zt = as_time(z)
    log_pref = -zt.t / 4.0 - 1.5 * math.log(4.0 * math.pi * zt.modulus) + 0.5 * math.log(2.0)
    log_env = log_pref - zt.eta * d * d - 0.5 * d + math.log(8.0 * (d + 2.0))
    if log_env < -700.0:
        return 0.0
    return math.exp(log_env)


def hk_plane_result(z, d: float, cfg: QuadratureConfig = DEFAULT_CONFIG) -> IntegralResult:
    """Heat kernel value with its accumulated quadrature error estimate."""
    zt = as_time(z)
    if d < 0:
        raise ValueError(f"distance must be >= 0, got {d}")
    if d == 0.0:
        return _hk_diagonal(zt, cfg)
    return _hk_offdiag(zt, d, cfg)


def hk_plane(z, d: float, cfg: QuadratureConfig = DEFAULT_CONFIG) -> complex:
    """Heat kernel K(z, d) on the hyperbolic plane; real z gives a positive real."""
    res = hk_plane_result(z, d, cfg)
    if as_time(z).is_real:
        return complex(res.value.real, 0.0)
    return res.value


def _hk_diagonal(zt: ComplexTime, cfg: QuadratureConfig) -> IntegralResult:
    z = zt.z

    def integrand(r):
        return np.exp(-(0.25 + r * r) * z) * np.tanh(math.pi * r) * r

    res = integrate_gaussian_tail(
        integrand, zt.t, cfg,
        poly_degree=1, envelope_coeff=math.exp(-zt.t / 4.0))
    scale = 1.0 / (2.0 * math.pi)
    return IntegralResult(scale * res.value, scale * res.error_estimate)


def _hk_offdiag(zt: ComplexTime, d: float, cfg: QuadratureConfig) -> IntegralResult:
    if d > _MAX_DISPLACEMENT:
        return IntegralResult(0.0 + 0.0j, hk_plane_envelope(zt, d))
    z = zt.z
    eta = zt.eta
    cm1 = 2.0 * math.sinh(0.5 * d) ** 2  # cosh d - 1, no cancellation

    # Truncate in u where e^{-eta u^2} has shed tail_cutoff_tol relative to
    # the e^{-eta d^2} scale of the integral; keep U >= d+1 for the far-zone
    # bound and cap so cosh cannot overflow.
    U = math.sqrt(d * d + math.log(1.0 / cfg.tail_cutoff_tol) / eta)
    U = min(max(U, d + 1.0), 700.0)
    V = math.sqrt(2.0 * math.sinh(0.5 * U) ** 2 - cm1)

    def integrand(v):
        u = arccosh1p(cm1 + v * v)
        return 2.0 * u * np.exp(-u * u / (4.0 * z)) / np.sinh(u)

    ladder = geometric_ladder(0.0, V, min(1.0, 0.5 * V))
    res = integrate_adaptive(integrand, 0.0, V, cfg, breakpoints=ladder)
    # Tail beyond U: int_U^inf u e^{-eta u^2}/sqrt(cosh u - cosh d) du
    #   <= 2.4 e^{-eta U^2} (2U + 4) e^{-U/2}.
    tail = 2.4 * math.exp(-eta * U * U) * (2.0 * U + 4.0) * math.exp(-0.5 * U)
    pref = _prefactor(z)
    return IntegralResult(pref * res.value,
                          abs(pref) * (res.error_estimate + tail))


def complex_bound_reference(z, d: float, cfg: QuadratureConfig = DEFAULT_CONFIG) -> float:
    """Right-hand side of the complex-time envelope for |K(z, d)|.

    Returns e^{s^2/4t} t^{-3/2} (t^2+s^2)^{3/4} K(tau, d) with tau = |z|^2/t,
    computed with the real-time kernel.  At s = 0 this reduces exactly to
    K(t, d).
    """
    zt = as_time(z)
    if d < 0:
        raise ValueError(f"distance must be >= 0, got {d}")
    if zt.is_real:
        return hk_plane(zt, d, cfg).real
    tau = zt.modulus ** 2 / zt.t
    pref = (math.exp(zt.s * zt.s / (4.0 * zt.t))
            * zt.t ** -1.5
            * (zt.t * zt.t + zt.s * zt.s) ** 0.75)
    return pref * hk_plane(ComplexTime(tau), d, cfg).real
