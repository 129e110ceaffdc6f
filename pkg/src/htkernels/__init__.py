"""Heat kernels, fundamental solutions and fractional powers of the
horizontal Laplacian on groups of Heisenberg type."""

from .group import (
    GroupPoint,
    HTypeGroup,
    dilate,
    gauge,
    heisenberg,
    inverse,
    make_standard_group,
    multiply,
    quaternionic,
)
from .kernels import (
    bg_kernel,
    composite_kernel,
    fiber_convolve,
    heat_kernel,
    modified_kernel,
    poisson_kernel_elliptic,
    poisson_kernel_parabolic,
    thick_kernel,
)
from .quadrature import QuadratureConfig

__version__ = "0.1.0"

__all__ = [
    "GroupPoint",
    "HTypeGroup",
    "QuadratureConfig",
    "bg_kernel",
    "composite_kernel",
    "dilate",
    "fiber_convolve",
    "gauge",
    "heat_kernel",
    "heisenberg",
    "inverse",
    "make_standard_group",
    "modified_kernel",
    "multiply",
    "poisson_kernel_elliptic",
    "poisson_kernel_parabolic",
    "quaternionic",
    "thick_kernel",
]
