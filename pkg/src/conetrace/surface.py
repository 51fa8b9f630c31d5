"""Full-surface heat traces assembled from geometry and length-spectrum data.

The standard (regularized) trace of a finite-volume hyperbolic surface
splits into an identity term vol(M) K(z, 0), a hyperbolic term summed over
primitive geodesic classes,

    HTr(z) = e^{-z/4} / sqrt(16 pi z)
             sum_l sum_{n>=1} l / sinh(n l / 2) e^{-(n l)^2 / 4z},

and an elliptic term summed over cone orders.  The degenerating trace DTr
is the elliptic contribution of a flagged subset of cones; subtracting it
from HTr + ETr gives the reduced trace whose degeneration limit exists.

The same three geometric terms, fed with a transform pair (H, H_hat),
form the geometric side of the trace formula

    sum_n H(r_n) = vol/(4 pi) int H(r) tanh(pi r) r dr
                 + sum_l sum_n l/(2 sinh(n l/2)) H_hat(n l)
                 + sum_q sum_n 1/(2 q sin(n pi/q))
                       int H(r) e^{-2 pi n r/q} / (1 + e^{-2 pi r}) dr,

whose spectral side sums H over r_n with eigenvalue lambda_n = 1/4 + r_n^2.
"""

from __future__ import annotations

import json
import math
from collections import Counter
from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np

from .cone import elliptic_cone_trace_result
from .geometry import SurfaceSignature, orbifold_volume
from .numerics import (
    DEFAULT_CONFIG,
    IntegralResult,
    QuadratureConfig,
    QuadratureError,
    integrate_adaptive,
)
from .plane import as_time, hk_plane_result

__all__ = [
    "LengthSpectrum",
    "SurfaceData",
    "TraceValue",
    "TestFunctionPair",
    "gaussian_pair",
    "heat_trace_pair",
    "hyperbolic_trace",
    "elliptic_trace",
    "degenerating_trace",
    "identity_term",
    "identity_term_geometric",
    "standard_trace",
    "reduced_trace",
    "stf_geometric_side",
    "stf_spectral_side_compact",
    "surface_to_dict",
    "surface_from_dict",
    "surface_to_json",
    "surface_from_json",
]

TWO_PI = 2.0 * math.pi
_MAX_WINDING = 100_000


@dataclass(frozen=True)
class LengthSpectrum:
    """Multiset of primitive geodesic lengths with multiplicities.

    Entries are (length, multiplicity) sorted by strictly increasing length;
    all primitive classes with length <= completeness_radius are claimed
    present.  Classes and their inverses are counted as distinct (see
    hyperbolic_trace for the convention flag).
    """

    entries: tuple[tuple[float, int], ...]
    completeness_radius: float = 0.0

    def __post_init__(self) -> None:
        entries = tuple((float(l), int(m)) for l, m in self.entries)
        object.__setattr__(self, "entries", entries)
        prev = 0.0
        for l, m in entries:
            if not (l > prev and math.isfinite(l)):
                raise ValueError(
                    "lengths must be finite, strictly positive and strictly ascending")
            if m < 1:
                raise ValueError(f"multiplicity must be >= 1, got {m}")
            prev = l
        if not (self.completeness_radius >= 0.0):
            raise ValueError("completeness_radius must be >= 0")

    @property
    def total_classes(self) -> int:
        return sum(m for _, m in self.entries)

    def truncated(self, radius: float) -> "LengthSpectrum":
        """Sub-spectrum of classes with length <= radius."""
        kept = tuple((l, m) for l, m in self.entries if l <= radius)
        return LengthSpectrum(kept, min(self.completeness_radius, radius))


@dataclass(frozen=True)
class SurfaceData:
    """Signature, length spectrum, and degeneration flags of one surface."""

    signature: SurfaceSignature
    spectrum: LengthSpectrum
    degenerating_orders: tuple[int, ...] = ()

    def __post_init__(self) -> None:
        orders = tuple(int(q) for q in self.degenerating_orders)
        object.__setattr__(self, "degenerating_orders", orders)
        have = Counter(self.signature.cone_orders)
        want = Counter(orders)
        if want - have:
            raise ValueError(
                f"degenerating orders {orders} are not a sub-multiset of the "
                f"cone orders {self.signature.cone_orders}")

    @property
    def volume(self) -> float:
        return orbifold_volume(self.signature)


@dataclass(frozen=True)
class TraceValue:
    """A trace value with its numerical error estimate.

    error_estimate collects quadrature and analytic-truncation errors;
    completeness_deficit separately bounds the contribution of geodesic
    classes beyond the spectrum's completeness radius (never folded in
    silently).
    """

    value: complex
    error_estimate: float
    completeness_deficit: float = 0.0

    def __post_init__(self) -> None:
        object.__setattr__(self, "value", complex(self.value))
        object.__setattr__(self, "error_estimate", float(self.error_estimate))
        object.__setattr__(self, "completeness_deficit", float(self.completeness_deficit))
        if not (self.error_estimate >= 0.0 and self.completeness_deficit >= 0.0):
            raise ValueError("error fields must be nonnegative")

    @property
    def total_error(self) -> float:
        return self.error_estimate + self.completeness_deficit

    def __add__(self, other: "TraceValue") -> "TraceValue":
        return TraceValue(self.value + other.value,
                          self.error_estimate + other.error_estimate,
                          self.completeness_deficit + other.completeness_deficit)

    def __sub__(self, other: "TraceValue") -> "TraceValue":
        return TraceValue(self.value - other.value,
                          self.error_estimate + other.error_estimate,
                          self.completeness_deficit + other.completeness_deficit)


@dataclass(frozen=True)
class TestFunctionPair:
    """Transform pair (H, H_hat) for the trace formula.

    Admissibility (analyticity of H in the horizontal strip |Im r| <= 1/2 +
    eps and decay of H_hat) is asserted by the caller.  H must accept real
    ndarrays (vectorized) as well as single complex arguments; H_hat takes
    nonnegative reals.  gaussian_decay_rate declares a bound
    |H(r)| <= envelope_coeff * e^{-a r^2} used to truncate the quadratures;
    hat_gaussian_decay_rate plays the same role for H_hat in the geodesic
    sum.
    """

    H: Callable
    H_hat: Callable
    note: str = ""
    gaussian_decay_rate: float | None = None
    hat_gaussian_decay_rate: float | None = None
    envelope_coeff: float = 1.0

    def scaled(self, factor: float) -> "TestFunctionPair":
        """The pair (factor*H, factor*H_hat); the trace formula is linear."""
        return TestFunctionPair(
            H=lambda r, _H=self.H: factor * _H(r),
            H_hat=lambda u, _Hh=self.H_hat: factor * _Hh(u),
            note=f"{self.note} scaled by {factor}",
            gaussian_decay_rate=self.gaussian_decay_rate,
            hat_gaussian_decay_rate=self.hat_gaussian_decay_rate,
            envelope_coeff=self.envelope_coeff * abs(factor),
        )


def gaussian_pair(t: float) -> TestFunctionPair:
    """The Gaussian pair H(r) = e^{-t r^2}, H_hat(u) = (4 pi t)^{-1/2} e^{-u^2/4t}."""
    if not (t > 0.0):
        raise ValueError(f"need t > 0, got {t}")
    return TestFunctionPair(
        H=lambda r: np.exp(-t * np.asarray(r) ** 2),
        H_hat=lambda u: np.exp(-np.asarray(u) ** 2 / (4.0 * t)) / math.sqrt(4.0 * math.pi * t),
        note=f"gaussian pair at t={t}",
        gaussian_decay_rate=t,
        hat_gaussian_decay_rate=1.0 / (4.0 * t),
        envelope_coeff=1.0,
    )


def heat_trace_pair(t: float) -> TestFunctionPair:
    """The heat-trace instance of the pair: H(r) = e^{-(1/4 + r^2) t}.

    With this pair the geometric side of the trace formula equals the
    standard heat trace at time t term by term, and the spectral side is
    sum_n e^{-lambda_n t}.  It is the plain Gaussian pair scaled by
    e^{-t/4}.
    """
    return gaussian_pair(t).scaled(math.exp(-t / 4.0))


def _sin_npq(n: int, q: int) -> float:
    m = n % q
    m = min(m, q - m)
    return math.sin(math.pi * m / q)


def hyperbolic_trace(spectrum: LengthSpectrum, z,
                     cfg: QuadratureConfig = DEFAULT_CONFIG,
                     *, convention: str = "distinct",
                     growth_constant: float = 1.0) -> TraceValue:
    """Geodesic-class sum of the heat trace.

    The n-series of each class is truncated when the analytic bound on the
    remainder (geometric after the ratio e^{-eta (2n+1) l^2}) drops below
    the tail tolerance; the bound joins the error estimate.  Classes beyond
    the completeness radius R contribute at most the crude growth-model
    integral growth_constant * int_R^inf (l / sinh(l/2)) e^l e^{-eta l^2} dl,
    reported separately as completeness_deficit.

    convention: "distinct" uses the stored multiplicities as-is (a class
    and its inverse occupy separate slots); "identified" doubles them, for
    spectra recorded with inverse classes merged.
    """
    if convention not in ("distinct", "identified"):
        raise ValueError(f"unknown convention {convention!r}")
    zt = as_time(z)
    if not spectrum.entries:
        return TraceValue(0.0 + 0.0j, 0.0, 0.0)
    zc = zt.z
    eta = zt.eta
    tt = cfg.tail_cutoff_tol
    factor = 2.0 if convention == "identified" else 1.0

    total = 0.0 + 0.0j
    err = 0.0
    for length, mult in spectrum.entries:
        series = 0.0 + 0.0j
        n = 1
        while True:
            # Underflow/overflow guards: the Gaussian factor is zero past the
            # first test, and sinh overflows past the second.
            if eta * (n * length) ** 2 > 760.0 or 0.5 * n * length > 700.0:
                break
            term = (length / math.sinh(0.5 * n * length)
                    * np.exp(-(n * length) ** 2 / (4.0 * zc)))
            series += term
            ratio = math.exp(-eta * (2 * n + 1) * length * length)
            tail = abs(term) * ratio / (1.0 - ratio)
            if tail <= tt * max(abs(series), 1e-300) or n >= _MAX_WINDING:
                err += factor * mult * tail
                break
            n += 1
        total += factor * mult * series

    pref = np.exp(-zc / 4.0) / np.sqrt(16.0 * math.pi * zc)
    deficit = abs(pref) * factor * _completeness_deficit(
        spectrum.completeness_radius, eta, growth_constant, cfg)
    return TraceValue(pref * total, abs(pref) * err, deficit)


def _completeness_deficit(radius: float, eta: float, growth_constant: float,
                          cfg: QuadratureConfig) -> float:
    """Bound on sum over missing classes of sum_n (l/sinh(nl/2)) e^{-eta n^2 l^2}.

    Models the class density beyond the completeness radius by e^l (the
    crude prime-geodesic growth) times growth_constant; the n >= 2 windings
    of a missing class are absorbed by a capped geometric factor.
    """
    if not math.isfinite(radius):
        return 0.0
    # Drifted Gaussian (l/2 - eta l^2 after folding in 1/sinh) peaks near
    # mu = 1/(4 eta); integrate past it, seeding panels around the bump.
    mu = 0.25 / eta
    width = 1.0 / math.sqrt(eta)
    upper = max(radius, mu) + math.sqrt(math.log(1.0 / cfg.tail_cutoff_tol) / eta)
    if upper <= radius:
        return 0.0

    def integrand(l):
        # Evaluated through logs so extreme decay rates cannot overflow;
        # the exponent clamp only bites where the bound is useless anyway.
        l = np.maximum(l, 1e-12)
        x = 0.5 * l
        log_sinh = np.where(x > 20.0,
                            x - math.log(2.0) + np.log1p(-np.exp(-2.0 * np.minimum(x, 350.0))),
                            np.log(np.sinh(np.minimum(x, 20.0))))
        return np.exp(np.minimum(np.log(l) - log_sinh + l - eta * l * l, 600.0))

    marks = sorted({radius, upper}
                   | {min(max(mu + k * width, radius), upper) for k in range(-4, 5)})
    res = integrate_adaptive(integrand, radius, upper,
                             QuadratureConfig(rel_tol=1e-6, abs_tol=1e-300,
                                              max_subdivisions=cfg.max_subdivisions),
                             breakpoints=marks)
    winding = 1.0 / max(1.0 - math.exp(-3.0 * eta * max(radius, 0.5) ** 2), 0.1)
    return growth_constant * winding * abs(res.value)


def elliptic_trace(orders: Sequence[int], z,
                   cfg: QuadratureConfig = DEFAULT_CONFIG) -> TraceValue:
    """Sum of single-cone elliptic traces over the given orders."""
    zt = as_time(z)
    total = 0.0 + 0.0j
    err = 0.0
    for q in orders:
        res = elliptic_cone_trace_result(int(q), zt, cfg)
        total += res.value
        err += res.error_estimate
    return TraceValue(total, err, 0.0)


def degenerating_trace(surface: SurfaceData, z,
                       cfg: QuadratureConfig = DEFAULT_CONFIG) -> TraceValue:
    """Elliptic trace restricted to the degeneration-flagged cone orders."""
    return elliptic_trace(surface.degenerating_orders, z, cfg)


def identity_term_result(volume: float, z,
                         cfg: QuadratureConfig = DEFAULT_CONFIG) -> IntegralResult:
    if not (volume > 0.0):
        raise ValueError(f"volume must be positive, got {volume}")
    res = hk_plane_result(z, 0.0, cfg)
    return IntegralResult(volume * res.value, volume * res.error_estimate)


def identity_term(volume: float, z, cfg: QuadratureConfig = DEFAULT_CONFIG) -> complex:
    """Identity contribution vol(M) * K(z, 0) to the standard trace."""
    return identity_term_result(volume, z, cfg).value


def identity_term_geometric(volume: float, z,
                            cfg: QuadratureConfig = DEFAULT_CONFIG) -> complex:
    """Identity term as the full-line integral (vol/4pi) int e^{-(r^2+1/4)z} tanh(pi r) r dr.

    An independent code path from identity_term (half-line via the diagonal
    kernel); the two agree because the integrand is even.
    """
    if not (volume > 0.0):
        raise ValueError(f"volume must be positive, got {volume}")
    zt = as_time(z)
    zc = zt.z
    R = math.sqrt(math.log(1.0 / cfg.tail_cutoff_tol) / zt.t) + 2.0

    def integrand(r):
        return np.exp(-(r * r + 0.25) * zc) * np.tanh(math.pi * r) * r

    res = integrate_adaptive(integrand, -R, R, cfg)
    return volume / (4.0 * math.pi) * res.value


def standard_trace(surface: SurfaceData, z,
                   cfg: QuadratureConfig = DEFAULT_CONFIG,
                   *, convention: str = "distinct") -> TraceValue:
    """Regularized heat trace: hyperbolic + elliptic + identity contributions."""
    zt = as_time(z)
    htr = hyperbolic_trace(surface.spectrum, zt, cfg, convention=convention)
    etr = elliptic_trace(surface.signature.cone_orders, zt, cfg)
    idr = identity_term_result(surface.volume, zt, cfg)
    return htr + etr + TraceValue(idr.value, idr.error_estimate, 0.0)


def reduced_trace(surface: SurfaceData, z,
                  cfg: QuadratureConfig = DEFAULT_CONFIG,
                  *, convention: str = "distinct") -> TraceValue:
    """Degeneration-subtracted trace HTr + ETr - DTr (no identity term)."""
    zt = as_time(z)
    htr = hyperbolic_trace(surface.spectrum, zt, cfg, convention=convention)
    etr = elliptic_trace(surface.signature.cone_orders, zt, cfg)
    dtr = degenerating_trace(surface, zt, cfg)
    return htr + etr - dtr


def _pair_radius(pair: TestFunctionPair, cfg: QuadratureConfig) -> float:
    if pair.gaussian_decay_rate is None:
        raise ValueError(
            "the test pair must declare gaussian_decay_rate so the quadrature "
            "can be truncated analytically")
    return math.sqrt(math.log(1.0 / cfg.tail_cutoff_tol) / pair.gaussian_decay_rate) + 2.0


def stf_geometric_side(surface: SurfaceData, pair: TestFunctionPair,
                       cfg: QuadratureConfig = DEFAULT_CONFIG,
                       *, convention: str = "distinct") -> complex:
    """Geometric side of the trace formula for the given transform pair.

    Identity, geodesic, and cone terms; quadrature failures are re-raised
    naming the term that failed.  The cone term's sigmoid factor is bounded
    by 1 on both half-lines, so the truncation radius of H alone applies.
    """
    if convention not in ("distinct", "identified"):
        raise ValueError(f"unknown convention {convention!r}")
    R = _pair_radius(pair, cfg)
    vol = surface.volume
    tt = cfg.tail_cutoff_tol
    factor = 2.0 if convention == "identified" else 1.0

    try:
        res = integrate_adaptive(
            lambda r: np.asarray(pair.H(r)) * np.tanh(math.pi * r) * r, -R, R, cfg)
    except QuadratureError as exc:
        raise QuadratureError(f"identity term: {exc}",
                              exc.partial_value, exc.error_estimate) from exc
    total = vol / (4.0 * math.pi) * res.value

    geodesic = 0.0 + 0.0j
    for length, mult in surface.spectrum.entries:
        partial = 0.0 + 0.0j
        small_streak = 0
        n = 1
        while n <= _MAX_WINDING:
            term = length / (2.0 * math.sinh(0.5 * n * length)) * pair.H_hat(n * length)
            partial += term
            if pair.hat_gaussian_decay_rate is not None:
                if pair.hat_gaussian_decay_rate * (n * length) ** 2 > math.log(1.0 / tt) + 40.0:
                    break
            small_streak = small_streak + 1 if abs(term) <= tt * max(abs(partial), 1e-300) else 0
            if small_streak >= 2:
                break
            n += 1
        geodesic += factor * mult * partial
    total += geodesic

    for q in surface.signature.cone_orders:
        for n in range(1, q):
            rate = TWO_PI * n / q

            def integrand(r):
                return np.asarray(pair.H(r)) * np.exp(-rate * r - np.logaddexp(0.0, -TWO_PI * r))

            try:
                res = integrate_adaptive(integrand, -R, R, cfg)
            except QuadratureError as exc:
                raise QuadratureError(
                    f"cone term (q={q}, n={n}): {exc}",
                    exc.partial_value, exc.error_estimate) from exc
            total += res.value / (2.0 * q * _sin_npq(n, q))
    return total


def stf_spectral_side_compact(eigenvalues: Sequence[float], H: Callable) -> complex:
    """Spectral side sum H(r_n) with lambda_n = 1/4 + r_n^2.

    Eigenvalues below 1/4 give r_n on the imaginary segment [0, i/2];
    negative eigenvalues are rejected.
    """
    total = 0.0 + 0.0j
    for lam in eigenvalues:
        lam = float(lam)
        if lam < 0.0:
            raise ValueError(f"eigenvalues must be nonnegative, got {lam}")
        if lam >= 0.25:
            r = math.sqrt(lam - 0.25)
        else:
            r = 1j * math.sqrt(0.25 - lam)
        total += complex(H(r))
    return total


# ---------------------------------------------------------------------------
# Serialization: plain JSON schema round-tripping bit-exactly.
# ---------------------------------------------------------------------------

def surface_to_dict(surface: SurfaceData) -> dict:
    return {
        "genus": surface.signature.genus,
        "cusps": surface.signature.cusps,
        "cones": list(surface.signature.cone_orders),
        "degenerating": list(surface.degenerating_orders),
        "spectrum": [[l, m] for l, m in surface.spectrum.entries],
        "completeness_radius": surface.spectrum.completeness_radius,
    }


def surface_from_dict(data: dict) -> SurfaceData:
    sig = SurfaceSignature(genus=int(data["genus"]), cusps=int(data["cusps"]),
                           cone_orders=tuple(data["cones"]))
    spec = LengthSpectrum(entries=tuple((l, m) for l, m in data["spectrum"]),
                          completeness_radius=float(data["completeness_radius"]))
    return SurfaceData(signature=sig, spectrum=spec,
                       degenerating_orders=tuple(data["degenerating"]))


def surface_to_json(surface: SurfaceData) -> str:
    return json.dumps(surface_to_dict(surface), indent=2)


def surface_from_json(text: str) -> SurfaceData:
    return surface_from_dict(json.loads(text))
