"""Orthogonal structure, sharp derivative constants and localized kernels on
conic domains and the triangle."""

__version__ = "0.1.0"

from .geometry import (
    ConicPoint,
    WeightSpec,
    dist_ball,
    dist_cone,
    dist_interval,
    dist_sphere,
    dist_surface,
    weight_eval,
)
from .cutoff import CutoffFn
from .bases import BasisIndex, ConeBasis, SurfaceBasis, TriangleBasis
from .operators import DiffOp, SpectralOp, apply_diffop, apply_spectral, spectral_poly
from .kernels import DecayTable, KernelConfig, localized_kernel, repro_kernel_sum
from .pointsets import (
    SeparatedSet,
    ball_separated,
    cone_separated,
    interval_separated,
    separation_certificate,
    sphere_separated,
    surface_separated,
)
from .bernstein import (
    BernsteinReport,
    DivergenceError,
    build_gram,
    divergence_probe,
    growth_fit,
    maximal_function,
    mz_certify,
    remez_certify,
    sharp_constant_p2,
    weighted_norm,
)

__all__ = [
    "__version__",
    "ConicPoint",
    "WeightSpec",
    "dist_ball",
    "dist_cone",
    "dist_interval",
    "dist_sphere",
    "dist_surface",
    "weight_eval",
    "CutoffFn",
    "BasisIndex",
    "ConeBasis",
    "SurfaceBasis",
    "TriangleBasis",
    "DiffOp",
    "SpectralOp",
    "apply_diffop",
    "apply_spectral",
    "spectral_poly",
    "DecayTable",
    "KernelConfig",
    "localized_kernel",
    "repro_kernel_sum",
    "SeparatedSet",
    "ball_separated",
    "cone_separated",
    "interval_separated",
    "separation_certificate",
    "sphere_separated",
    "surface_separated",
    "BernsteinReport",
    "DivergenceError",
    "build_gram",
    "divergence_probe",
    "growth_fit",
    "maximal_function",
    "mz_certify",
    "remez_certify",
    "sharp_constant_p2",
    "weighted_norm",
]
