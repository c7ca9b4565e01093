"""Numerical disproof of observability inequalities in the semiclassical limit.

Subpackages split along the pipeline: spectral_core (grids, transforms,
quadrature), rfhe (fractional heat evolution), saddle (asymptotic
estimates), eigen_bounded (complex eigenvalue solver on the bounded
v-domain), kolmogorov (hypoelliptic solution builder), observability
(the quotient experiment), figures and cli (reporting).
"""

__version__ = "0.1.0"

__all__ = [
    "cli",
    "eigen_bounded",
    "errors",
    "figures",
    "kolmogorov",
    "observability",
    "rfhe",
    "saddle",
    "spectral_core",
]
