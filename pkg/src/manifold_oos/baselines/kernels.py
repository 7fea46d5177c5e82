"""
Gaussian kernels shared by the baseline extension methods.
"""

from dataclasses import dataclass

import numpy as np
from scipy.spatial.distance import cdist, pdist

from manifold_oos.exceptions import ConfigurationError
from manifold_oos.neighbors.index import as_points


@dataclass(frozen=True)
class GaussianKernelConfig:
    """
    Width of the Gaussian kernel exp(-|x - x'|^2 / epsilon).

    Attributes:
        epsilon: Kernel width, applied to squared distances
    """

    epsilon: float

    def __post_init__(self):
        if not self.epsilon > 0:
            raise ConfigurationError(
                f"Kernel epsilon must be positive, got {self.epsilon}"
            )


def squared_distances(a, b) -> np.ndarray:
    """Matrix of squared Euclidean distances between rows of a and b."""
    return cdist(as_points(a), as_points(b), metric="sqeuclidean")


def gaussian_kernel(a, b, epsilon: float) -> np.ndarray:
    """Kernel matrix exp(-|a_i - b_j|^2 / epsilon)."""
    return np.exp(-squared_distances(a, b) / epsilon)


def build_gaussian_kernel(points, cfg: GaussianKernelConfig) -> np.ndarray:
    """
    Symmetric p x p Gaussian kernel matrix over a point set.

    The diagonal is exactly one.
    """
    kernel = gaussian_kernel(points, points, cfg.epsilon)
    kernel = 0.5 * (kernel + kernel.T)
    np.fill_diagonal(kernel, 1.0)
    return kernel


def row_normalized_kernel(a, b, epsilon: float) -> np.ndarray:
    """
    Gaussian kernel with rows scaled to sum to one.

    Rows whose weights all underflow are left at zero.
    """
    kernel = gaussian_kernel(a, b, epsilon)
    sums = kernel.sum(axis=1, keepdims=True)
    return np.divide(kernel, sums, out=np.zeros_like(kernel), where=sums > 0)


def median_squared_distance(points) -> float:
    """Median squared pairwise distance, the default Nystrom kernel width."""
    points = as_points(points)
    if points.shape[0] < 2:
        return 1.0
    value = float(np.median(pdist(points, metric="sqeuclidean")))
    return value if value > 0 else 1.0


def max_squared_distance(points) -> float:
    """Largest squared pairwise distance, the default coarse kernel width."""
    points = as_points(points)
    if points.shape[0] < 2:
        return 1.0
    value = float(np.max(pdist(points, metric="sqeuclidean")))
    return value if value > 0 else 1.0
