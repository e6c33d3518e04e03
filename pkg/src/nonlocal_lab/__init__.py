"""Numerical laboratory for 1D nonlocal transport equations.

Spectral and quadrature implementations of the Hilbert transform, the
fractional Laplacian and the drift family i*k*|k|^(-alpha); verification
harnesses for the weighted inequalities they satisfy; a counterexample
construction for the monotonicity-free case; radial analogues in n >= 2;
and a pseudo-spectral transport simulator with blow-up monitors.
"""

from .core import (Grid1D, QuadratureResult, SampledFunction, WeightSpec,
                   build_grid, cumulative_primitive, weighted_integral)
from .operators import (OperatorSpec, SingularConstant, alpha_kernel_h,
                        calibrate_singular_constant, drift_velocity,
                        fractional_laplacian, hilbert_transform)

__all__ = [
    "Grid1D", "SampledFunction", "WeightSpec", "QuadratureResult",
    "build_grid", "weighted_integral", "cumulative_primitive",
    "OperatorSpec", "SingularConstant", "hilbert_transform",
    "fractional_laplacian", "calibrate_singular_constant", "drift_velocity",
    "alpha_kernel_h",
]

__version__ = "0.1.0"
