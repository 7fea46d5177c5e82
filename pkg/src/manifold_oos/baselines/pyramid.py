"""
Laplacian pyramid approximation and extension of a function.

Level 0 smooths f with a row-normalized Gaussian kernel of width sigma0;
level l smooths the residual left by the coarser levels with width
sigma0 / 2^l. The extension to a new point applies the same normalized
kernels from that point to the training points.
"""

import logging
from dataclasses import dataclass
from typing import List, Optional, Sequence, Union

import numpy as np

from manifold_oos.baselines.base import FunctionExtender
from manifold_oos.baselines.kernels import max_squared_distance, row_normalized_kernel
from manifold_oos.exceptions import NoConvergenceError
from manifold_oos.neighbors.index import as_points

logger = logging.getLogger(__name__)

DEFAULT_MAX_LEVELS = 15
# Relative slack when checking that residual norms do not grow
MONOTONE_RTOL = 1e-12


@dataclass(frozen=True, eq=False)
class PyramidLevel:
    """
    One level of a fitted Laplacian pyramid.

    Attributes:
        level: Level number l
        sigma: Kernel width sigma0 / 2^l
        residual: Residual d_l this level smooths (d_0 = f)
        approximation: Smoothed residual s_l at the training points
    """

    level: int
    sigma: float
    residual: np.ndarray
    approximation: np.ndarray

    def __post_init__(self):
        if not self.sigma > 0:
            raise ValueError(f"sigma must be positive, got {self.sigma}")


def laplacian_pyramid_fit(
    points,
    f,
    sigma0: float,
    err: float,
    max_levels: int = DEFAULT_MAX_LEVELS,
) -> List[PyramidLevel]:
    """
    Fit a Laplacian pyramid to f on the training points.

    Stops as soon as the training residual norm drops below err.

    Raises:
        NoConvergenceError: If the residual grows between levels, or
            max_levels are used without reaching err
    """
    if not sigma0 > 0:
        raise ValueError(f"sigma0 must be positive, got {sigma0}")
    points = as_points(points)
    f = np.asarray(f, dtype=float).reshape(-1)

    levels: List[PyramidLevel] = []
    total = np.zeros_like(f)
    residual = f.copy()
    residual_norm = float(np.linalg.norm(residual))

    for level in range(max_levels):
        sigma = sigma0 / 2.0**level
        smoothed = row_normalized_kernel(points, points, sigma) @ residual
        levels.append(
            PyramidLevel(level=level, sigma=sigma, residual=residual, approximation=smoothed)
        )
        total = total + smoothed
        residual = f - total
        new_norm = float(np.linalg.norm(residual))
        logger.debug(f"Pyramid level {level}: sigma={sigma:.4g} residual={new_norm:.3e}")

        if new_norm > residual_norm * (1.0 + MONOTONE_RTOL):
            raise NoConvergenceError(new_norm, level + 1)
        residual_norm = new_norm
        if residual_norm < err:
            logger.info(
                f"Pyramid converged with {len(levels)} levels, residual={residual_norm:.3e}"
            )
            return levels

    raise NoConvergenceError(residual_norm, max_levels)


def laplacian_pyramid_extend(
    levels: Sequence[PyramidLevel],
    points,
    f,
    y,
) -> Union[float, np.ndarray]:
    """
    Extend a fitted pyramid to the query y.

    Returns the sum over levels of the normalized kernel at width sigma_l
    from y to the training points, applied to f at level 0 and to the
    stored residual d_l at the finer levels.
    """
    points = as_points(points)
    y = np.asarray(y, dtype=float)
    queries = np.atleast_2d(y)
    values = np.zeros(queries.shape[0])
    for lvl in levels:
        source = np.asarray(f, dtype=float).reshape(-1) if lvl.level == 0 else lvl.residual
        values += row_normalized_kernel(queries, points, lvl.sigma) @ source
    return float(values[0]) if y.ndim == 1 else values


class PyramidExtender(FunctionExtender):
    """Laplacian pyramid; sigma0 defaults to the largest squared pairwise distance."""

    name = "laplacian-pyramid"

    def __init__(
        self,
        err: float = 1e-2,
        sigma0: Optional[float] = None,
        max_levels: int = DEFAULT_MAX_LEVELS,
    ):
        super().__init__()
        self.err = err
        self.sigma0 = sigma0
        self.max_levels = max_levels
        self.levels: List[PyramidLevel] = []

    def _fit(self) -> None:
        sigma0 = self.sigma0 or max_squared_distance(self.points)
        self.levels = laplacian_pyramid_fit(
            self.points, self.values, sigma0, self.err, max_levels=self.max_levels
        )

    def extend(self, queries) -> np.ndarray:
        queries = self._queries(queries)
        return laplacian_pyramid_extend(self.levels, self.points, self.values, queries)
