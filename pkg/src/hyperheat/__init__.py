"""Heat kernels on hyperbolic space and radially symmetric spaces.

Reference evaluators (exact n = 3, McKean, Gruet) sit next to Bessel-bridge
Monte Carlo estimators and the deterministic-path expansions built on them.
"""
from .errors import NumericalError, QuadratureError
from .geometry import (
    BallPoint,
    HalfSpacePoint,
    geodesic_distance_ball,
    geodesic_distance_half_space,
    mobius_half_to_ball,
)
from .kernels_closed import (
    KernelValue,
    Method,
    gruet,
    heat_kernel_h3,
    heat_kernel_mckean,
    hyperbolic_bessel_density_exact3,
)
from .kernels_mc import (
    McConfig,
    McEstimate,
    heat_kernel_mc,
    hyperbolic_bessel_density_mc,
    radial_sym_kernel_mc,
)
from .expansions import (
    series_kernel,
    small_time_kernel,
    straight_line_path,
    unbiased_path,
)
from .radial_profiles import RadialProfile, builtin_profile, validate_profile

__version__ = "0.1.0"

__all__ = [
    "NumericalError",
    "QuadratureError",
    "BallPoint",
    "HalfSpacePoint",
    "geodesic_distance_ball",
    "geodesic_distance_half_space",
    "mobius_half_to_ball",
    "KernelValue",
    "Method",
    "gruet",
    "heat_kernel_h3",
    "heat_kernel_mckean",
    "hyperbolic_bessel_density_exact3",
    "McConfig",
    "McEstimate",
    "heat_kernel_mc",
    "hyperbolic_bessel_density_mc",
    "radial_sym_kernel_mc",
    "series_kernel",
    "small_time_kernel",
    "straight_line_path",
    "unbiased_path",
    "RadialProfile",
    "builtin_profile",
    "validate_profile",
]
