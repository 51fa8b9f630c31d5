"""Exact geometry of hyperbolic cones, truncated cones, and cusps.

An infinite hyperbolic cone of integer order q >= 2 is the half-infinite
cylinder {(rho, theta) : rho > 0, theta in [0, 2pi)} with metric
drho^2 + q^{-2} sinh^2(rho) dtheta^2; its apex angle is 2pi/q, the meridian
at height rho has length (2pi/q) sinh(rho), and the volume form is
q^{-1} sinh(rho) drho dtheta.  Truncating at enclosed volume eps gives a
collar whose radius, volume and boundary length all have closed forms.
The q -> infinity limit is a cusp.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

__all__ = [
    "ConeParams",
    "ConePoint",
    "TruncatedConeMetrics",
    "SurfaceSignature",
    "ApexAtInfinityError",
    "arccosh1p",
    "meridian_length",
    "cone_displacement",
    "truncated_cone_metrics",
    "nested_boundary_distance",
    "cusp_truncated_metrics",
    "cone_to_cusp_coords",
    "cusp_to_cone_coords",
    "orbifold_volume",
    "reduced_sine",
]

TWO_PI = 2.0 * math.pi


class ApexAtInfinityError(ValueError):
    """The cone apex maps to y = infinity in cusp coordinates."""


def arccosh1p(y):
    """arccosh(1 + y) for y >= 0, stable near y = 0 and safe for huge y.

    Written as log1p(y + sqrt(y (y + 2))) this avoids the catastrophic
    cancellation of arccosh(x) when x - 1 is tiny, which happens for
    displacement arguments near 1 at large cone order.  Past y ~ 1e150 the
    product under the root would overflow, so the asymptotic log(2y) branch
    takes over (relative error below 1/y).  Accepts scalars or ndarrays.
    """
    y = np.asarray(y, dtype=float)
    if np.any(y < 0):
        raise ValueError("arccosh1p requires y >= 0")
    with np.errstate(over="ignore"):
        exact = np.log1p(y + np.sqrt(y * (y + 2.0)))
    out = np.where(y > 1e150, math.log(2.0) + np.log(np.maximum(y, 1.0)), exact)
    return float(out) if out.ndim == 0 else out


def reduced_sine(n: int, q: int) -> float:
    """sin(pi n / q) with argument reduction; exact n <-> q-n symmetry.

    The index is reduced mod q and folded to min(m, q-m) before the sine is
    taken, so the n and q-n evaluations are bit-identical even for q ~ 1e4.
    """
    m = n % q
    m = min(m, q - m)
    return math.sin(math.pi * m / q)


@dataclass(frozen=True)
class ConeParams:
    """An infinite hyperbolic cone of integer order q >= 2."""

    q: int

    def __post_init__(self) -> None:
        if not isinstance(self.q, int) or self.q < 2:
            raise ValueError(f"cone order must be an integer >= 2, got {self.q}")

    @property
    def angle(self) -> float:
        """Apex angle 2pi/q, in (0, pi]."""
        return TWO_PI / self.q


@dataclass(frozen=True)
class ConePoint:
    """A point (rho, theta) on the cone; rho is geodesic distance from the apex."""

    rho: float
    theta: float

    def __post_init__(self) -> None:
        if not (self.rho >= 0.0 and math.isfinite(self.rho)):
            raise ValueError(f"rho must be finite and >= 0, got {self.rho}")
        if not (0.0 <= self.theta < TWO_PI):
            raise ValueError(f"theta must lie in [0, 2pi), got {self.theta}")


@dataclass(frozen=True)
class TruncatedConeMetrics:
    """Radius, volume and boundary length of a truncated cone or cusp collar.

    For a cusp collar the radius field stores the boundary horocycle height
    (2*eps), which is not a geodesic distance; see cusp_truncated_metrics.
    """

    radius: float
    volume: float
    boundary_length: float

    def __post_init__(self) -> None:
        for name in ("radius", "volume", "boundary_length"):
            v = getattr(self, name)
            if not (v >= 0.0 and math.isfinite(v)):
                raise ValueError(f"{name} must be finite and >= 0, got {v}")


@dataclass(frozen=True)
class SurfaceSignature:
    """Topological data (genus, cusp count, cone orders) of a hyperbolic orbifold."""

    genus: int
    cusps: int
    cone_orders: tuple[int, ...]

    def __post_init__(self) -> None:
        if self.genus < 0 or self.cusps < 0:
            raise ValueError("genus and cusp count must be nonnegative")
        orders = tuple(int(q) for q in self.cone_orders)
        object.__setattr__(self, "cone_orders", orders)
        for q in orders:
            if q < 2:
                raise ValueError(f"cone orders must be >= 2, got {q}")
        if self.euler_defect >= 0.0:
            raise ValueError(
                f"signature is not hyperbolic: 2 - 2g - p - sum(1 - 1/q) = "
                f"{self.euler_defect:g} >= 0")

    @property
    def euler_defect(self) -> float:
        """2 - 2*genus - cusps - sum(1 - 1/q); negative iff hyperbolic."""
        return (2.0 - 2.0 * self.genus - self.cusps
                - sum(1.0 - 1.0 / q for q in self.cone_orders))


def meridian_length(cone: ConeParams, rho: float) -> float:
    """Length (2pi/q) sinh(rho) of the meridian circle at height rho."""
    if rho < 0:
        raise ValueError(f"rho must be >= 0, got {rho}")
    return cone.angle * math.sinh(rho)


def cone_displacement(cone: ConeParams, n: int, rho: float) -> float:
    """Displacement d(z, g^n z) of the order-q rotation at distance rho from the apex.

    cosh d = 1 + 2 sin^2(pi n / q) sinh^2(rho); evaluated through the stable
    arccosh(1 + y) branch.
    """
    if rho < 0:
        raise ValueError(f"rho must be >= 0, got {rho}")
    s = reduced_sine(n, cone.q)
    return arccosh1p(2.0 * s * s * math.sinh(rho) ** 2)


def truncated_cone_metrics(cone: ConeParams, eps: float) -> TruncatedConeMetrics:
    """Metrics of the truncated cone of enclosed volume eps.

    radius = arccosh(1 + eps q / 2pi), volume = eps (bit-for-bit),
    boundary length = sqrt(4 pi eps / q + eps^2).
    """
    if not (eps > 0.0 and math.isfinite(eps)):
        raise ValueError(f"eps must be positive, got {eps}")
    x = eps * cone.q / TWO_PI
    return TruncatedConeMetrics(
        radius=arccosh1p(x),
        volume=eps,
        boundary_length=math.sqrt(4.0 * math.pi * eps / cone.q + eps * eps),
    )


def _nested_g(cone: ConeParams, eps: float) -> float:
    x = eps * cone.q
    return x + TWO_PI + math.sqrt(x * (4.0 * math.pi + x))


def nested_boundary_distance(cone: ConeParams, eps1: float, eps2: float) -> float:
    """Geodesic distance between the boundaries of two nested truncated cones.

    Equals log(g(eps2)/g(eps1)) with g(e) = e q + 2 pi + sqrt(e q (4 pi + e q)),
    which telescopes over nested levels and agrees with the difference of
    truncation radii.
    """
    if not (0.0 < eps1 <= eps2):
        raise ValueError(f"need 0 < eps1 <= eps2, got ({eps1}, {eps2})")
    return math.log(_nested_g(cone, eps2) / _nested_g(cone, eps1))


def cusp_truncated_metrics(eps: float) -> TruncatedConeMetrics:
    """Metrics of the cusp collar of enclosed volume eps/2.

    Volume and boundary length both equal eps/2.  The radius field stores
    the boundary horocycle height 2*eps of the strip model {y > 2 eps}; it
    is a coordinate label, not a geodesic distance from anything.
    """
    if not (eps > 0.0 and math.isfinite(eps)):
        raise ValueError(f"eps must be positive, got {eps}")
    return TruncatedConeMetrics(radius=2.0 * eps, volume=0.5 * eps,
                                boundary_length=0.5 * eps)


def cone_to_cusp_coords(cone: ConeParams, p: ConePoint) -> tuple[float, float]:
    """Map (rho, theta) to the cylinder coordinates (x, y) used in degeneration.

    theta = 2 pi x and rho = 2 artanh(exp(-alpha y)) with alpha = 2 pi / q,
    so x = theta / 2pi and y = -log(tanh(rho/2)) / alpha.  The apex rho = 0
    corresponds to y = infinity and raises ApexAtInfinityError.
    """
    if p.rho == 0.0:
        raise ApexAtInfinityError("rho = 0 maps to y = infinity")
    x = p.theta / TWO_PI
    y = -math.log(math.tanh(0.5 * p.rho)) / cone.angle
    return x, y


def cusp_to_cone_coords(cone: ConeParams, x: float, y: float) -> ConePoint:
    """Inverse of cone_to_cusp_coords."""
    if not (0.0 <= x < 1.0):
        raise ValueError(f"x must lie in [0, 1), got {x}")
    if not (y > 0.0):
        raise ValueError(f"y must be positive, got {y}")
    rho = 2.0 * math.atanh(math.exp(-cone.angle * y))
    return ConePoint(rho=rho, theta=TWO_PI * x)


def orbifold_volume(sig: SurfaceSignature) -> float:
    """Hyperbolic area 2pi (2g - 2 + p + sum(1 - 1/q)) of the orbifold."""
    area = -TWO_PI * sig.euler_defect
    if not area > 0.0:
        raise ValueError(f"non-hyperbolic signature {sig}")
    return area
