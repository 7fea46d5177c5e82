"""
Reference function extension methods: Nystrom, multiscale extension and
Laplacian pyramids.
"""

from manifold_oos.baselines.base import FunctionExtender
from manifold_oos.baselines.interpolative import (
    InterpolativeDecomposition,
    randomized_id,
    single_scale_extend,
)
from manifold_oos.baselines.kernels import GaussianKernelConfig, build_gaussian_kernel
from manifold_oos.baselines.mse import MseExtender, MseScale, mse_extend
from manifold_oos.baselines.nystrom import (
    EigenSystem,
    NystromExtender,
    compute_eigensystem,
    nystrom_extend_eigenfunction,
    nystrom_extend_function,
)
from manifold_oos.baselines.pyramid import (
    PyramidExtender,
    PyramidLevel,
    laplacian_pyramid_extend,
    laplacian_pyramid_fit,
)

__all__ = [
    "EigenSystem",
    "FunctionExtender",
    "GaussianKernelConfig",
    "InterpolativeDecomposition",
    "MseExtender",
    "MseScale",
    "NystromExtender",
    "PyramidExtender",
    "PyramidLevel",
    "build_gaussian_kernel",
    "compute_eigensystem",
    "laplacian_pyramid_extend",
    "laplacian_pyramid_fit",
    "mse_extend",
    "nystrom_extend_eigenfunction",
    "nystrom_extend_function",
    "randomized_id",
    "single_scale_extend",
]
