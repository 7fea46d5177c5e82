"""
Nystrom extension of kernel eigenvectors and of functions expanded on them.

Eigenvectors phi of the kernel matrix G satisfy G phi = lambda phi, so the
natural extension to a new point x* is (1 / lambda) sum_j g(x*, x_j) phi_j,
which reproduces phi exactly at training points.
"""

import logging
from dataclasses import dataclass
from typing import Optional

import numpy as np

from manifold_oos.baselines.base import FunctionExtender
from manifold_oos.baselines.kernels import (
    GaussianKernelConfig,
    build_gaussian_kernel,
    gaussian_kernel,
    median_squared_distance,
)
from manifold_oos.exceptions import SpectrumCutoffError

logger = logging.getLogger(__name__)

# Eigenvalues with |lambda| <= SPECTRUM_RTOL * lambda_max are not extended
SPECTRUM_RTOL = 1e-12
# Components kept by NystromExtender; smaller ones amplify round-off by 1/lambda
DEFAULT_RETAIN_RTOL = 1e-6


@dataclass(frozen=True, eq=False)
class EigenSystem:
    """
    Eigen-decomposition of a symmetric kernel matrix.

    Attributes:
        eigenvalues: (m,) eigenvalues sorted descending
        eigenvectors: (p, m) orthonormal eigenvectors as columns
    """

    eigenvalues: np.ndarray
    eigenvectors: np.ndarray

    def __post_init__(self):
        if self.eigenvalues.shape[0] != self.eigenvectors.shape[1]:
            raise ValueError(
                f"{self.eigenvalues.shape[0]} eigenvalues for "
                f"{self.eigenvectors.shape[1]} eigenvectors"
            )

    @property
    def lambda_max(self) -> float:
        return float(np.max(np.abs(self.eigenvalues)))

    @property
    def cutoff(self) -> float:
        return SPECTRUM_RTOL * self.lambda_max

    def count_above(self, rtol: float = SPECTRUM_RTOL) -> int:
        """Number of leading eigenvalues with |lambda| > rtol * lambda_max."""
        return int(np.sum(np.abs(self.eigenvalues) > rtol * self.lambda_max))

    def is_orthonormal(self, atol: float = 1e-8) -> bool:
        gram = self.eigenvectors.T @ self.eigenvectors
        return bool(np.allclose(gram, np.eye(gram.shape[0]), atol=atol))


def compute_eigensystem(kernel: np.ndarray) -> EigenSystem:
    """Eigen-decompose a symmetric kernel matrix, largest eigenvalue first."""
    eigenvalues, eigenvectors = np.linalg.eigh(0.5 * (kernel + kernel.T))
    order = np.argsort(eigenvalues)[::-1]
    return EigenSystem(eigenvalues=eigenvalues[order], eigenvectors=eigenvectors[:, order])


def _check_eigenvalue(lam: float, lambda_max: float) -> None:
    threshold = SPECTRUM_RTOL * abs(lambda_max)
    if not abs(lam) > threshold:
        raise SpectrumCutoffError(lam, threshold)


def nystrom_extend_eigenfunction(
    x_star,
    points,
    phi,
    lam: float,
    cfg: GaussianKernelConfig,
    lambda_max: Optional[float] = None,
):
    """
    Extend one kernel eigenvector to new points.

    Args:
        x_star: Query of length n, or (q, n) queries
        points: (p, n) training points
        phi: Eigenvector of length p
        lam: Its eigenvalue
        cfg: Kernel configuration the eigenvector was computed with
        lambda_max: Largest eigenvalue, for the cutoff; defaults to |lam|

    Returns:
        Extended value (float), or (q,) values for a batch of queries

    Raises:
        SpectrumCutoffError: If |lam| is below the cutoff
    """
    _check_eigenvalue(lam, abs(lam) if lambda_max is None else lambda_max)
    x = np.asarray(x_star, dtype=float)
    single = x.ndim == 1
    values = gaussian_kernel(np.atleast_2d(x), points, cfg.epsilon) @ np.asarray(phi) / lam
    return float(values[0]) if single else values


def nystrom_extend_function(
    x_star,
    f,
    eigensystem: EigenSystem,
    points,
    cfg: GaussianKernelConfig,
    num_components: int,
):
    """
    Extend a function through its expansion on the leading eigenvectors.

    f is projected on the top num_components eigenvectors and the
    projection coefficients weight their Nystrom extensions.

    Raises:
        SpectrumCutoffError: If a requested component is below the cutoff
    """
    available = eigensystem.count_above()
    if num_components > available or num_components < 1:
        idx = min(max(num_components, 1), eigensystem.eigenvalues.shape[0]) - 1
        raise SpectrumCutoffError(float(eigensystem.eigenvalues[idx]), eigensystem.cutoff)

    phis = eigensystem.eigenvectors[:, :num_components]
    lams = eigensystem.eigenvalues[:num_components]
    coefficients = phis.T @ np.asarray(f, dtype=float)

    x = np.asarray(x_star, dtype=float)
    single = x.ndim == 1
    kernel_rows = gaussian_kernel(np.atleast_2d(x), points, cfg.epsilon)
    values = kernel_rows @ (phis @ (coefficients / lams))
    return float(values[0]) if single else values


class NystromExtender(FunctionExtender):
    """
    Nystrom extension through the leading kernel eigenvectors.

    Components with eigenvalue above retain_rtol * lambda_max are kept;
    the kernel width defaults to the median squared pairwise distance.
    """

    name = "nystrom"

    def __init__(self, epsilon: Optional[float] = None, retain_rtol: float = DEFAULT_RETAIN_RTOL):
        super().__init__()
        self.epsilon = epsilon
        self.retain_rtol = retain_rtol
        self.cfg: Optional[GaussianKernelConfig] = None
        self.eigensystem: Optional[EigenSystem] = None
        self.num_components = 0

    def _fit(self) -> None:
        epsilon = self.epsilon or median_squared_distance(self.points)
        self.cfg = GaussianKernelConfig(epsilon)
        self.eigensystem = compute_eigensystem(build_gaussian_kernel(self.points, self.cfg))
        self.num_components = max(1, self.eigensystem.count_above(self.retain_rtol))
        logger.info(
            f"Nystrom fitted: p={self.points.shape[0]} eps={epsilon:.4g} "
            f"components={self.num_components}"
        )

    def extend(self, queries) -> np.ndarray:
        queries = self._queries(queries)
        return nystrom_extend_function(
            queries, self.values, self.eigensystem, self.points, self.cfg, self.num_components
        )
