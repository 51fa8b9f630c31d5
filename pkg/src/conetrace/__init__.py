"""Heat kernels and regularized heat traces on hyperbolic cones and surfaces.

Subpackage map:

  numerics   adaptive Gauss-Kronrod quadrature, Gaussian-tail truncation,
             Riemann zeta on (1, inf);
  geometry   cone/cusp collar formulas, displacement, orbifold volume;
  plane      heat kernel on the hyperbolic plane, real and complex time;
  cone       periodized kernels, elliptic and truncated cone traces, the
             explicit truncation bound;
  surface    full-surface traces (standard, reduced), the trace-formula
             geometric and spectral sides, JSON serialization;
  hecke      triangle-group word enumeration and primitive length spectra;
  cli        batch experiment runner (CSV + JSON sidecars).
"""

__version__ = "0.1.0"

from .geometry import (
    ConeParams,
    ConePoint,
    SurfaceSignature,
    TruncatedConeMetrics,
    cone_displacement,
    meridian_length,
    orbifold_volume,
)
from .numerics import IntegralResult, QuadratureConfig, QuadratureError, riemann_zeta
from .plane import ComplexTime, complex_bound_reference, hk_plane
from .cone import (
    DegenerationBoundParams,
    cone_heat_kernel,
    degeneration_bound,
    elliptic_cone_trace,
    elliptic_cone_trace_hejhal,
    truncated_cone_trace,
    truncated_cone_trace_oracle,
)
from .surface import (
    LengthSpectrum,
    SurfaceData,
    TestFunctionPair,
    TraceValue,
    gaussian_pair,
    heat_trace_pair,
    hyperbolic_trace,
    elliptic_trace,
    degenerating_trace,
    identity_term,
    reduced_trace,
    standard_trace,
    stf_geometric_side,
    stf_spectral_side_compact,
    surface_from_json,
    surface_to_json,
)
from .hecke import (
    HeckeGroup,
    GroupElement,
    Classification,
    classify,
    enumerate_length_spectrum,
    generators,
    geodesic_length,
    limit_group_spectrum,
)

__all__ = [
    "__version__",
    "ConeParams", "ConePoint", "SurfaceSignature", "TruncatedConeMetrics",
    "cone_displacement", "meridian_length", "orbifold_volume",
    "IntegralResult", "QuadratureConfig", "QuadratureError", "riemann_zeta",
    "ComplexTime", "complex_bound_reference", "hk_plane",
    "DegenerationBoundParams", "cone_heat_kernel", "degeneration_bound",
    "elliptic_cone_trace", "elliptic_cone_trace_hejhal",
    "truncated_cone_trace", "truncated_cone_trace_oracle",
    "LengthSpectrum", "SurfaceData", "TestFunctionPair", "TraceValue",
    "gaussian_pair", "heat_trace_pair", "hyperbolic_trace", "elliptic_trace",
    "degenerating_trace", "identity_term", "reduced_trace", "standard_trace",
    "stf_geometric_side", "stf_spectral_side_compact",
    "surface_from_json", "surface_to_json",
    "HeckeGroup", "GroupElement", "Classification", "classify",
    "enumerate_length_spectrum", "generators", "geodesic_length",
    "limit_group_spectrum",
]
