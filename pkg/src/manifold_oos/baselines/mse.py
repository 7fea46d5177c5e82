"""
Multiscale extension (MSE) with randomized interpolative decompositions.

At scale s the residual of the previous scales is projected on a subset of
the columns of the Gaussian kernel of width T / 2^s, selected by a
randomized interpolative decomposition. Scales accumulate until the
training residual falls to the requested error.
"""

import logging
from dataclasses import dataclass
from typing import List, Optional, Tuple, Union

import numpy as np
import scipy.linalg as la

from manifold_oos.baselines.base import FunctionExtender
from manifold_oos.baselines.interpolative import basis_coefficients, randomized_id
from manifold_oos.baselines.kernels import (
    GaussianKernelConfig,
    build_gaussian_kernel,
    gaussian_kernel,
    max_squared_distance,
)
from manifold_oos.exceptions import NoConvergenceError
from manifold_oos.neighbors.index import as_points

logger = logging.getLogger(__name__)

DEFAULT_MAX_SCALES = 20
RANK_RTOL = 1e-3
# Column sample size of the rank-estimation sketch
RANK_SKETCH_COLUMNS = 1000


@dataclass(frozen=True, eq=False)
class MseScale:
    """
    One fitted scale of the multiscale extension.

    Attributes:
        scale: Scale number s
        epsilon_s: Kernel width T / 2^s
        rank: Number of kernel columns l_s kept
        sampled_indices: Training indices of the kept columns
        basis: (p, l_s) kept kernel columns
        coefficients: Least-squares coefficients of the residual on the basis
    """

    scale: int
    epsilon_s: float
    rank: int
    sampled_indices: np.ndarray
    basis: np.ndarray
    coefficients: np.ndarray

    def evaluate(self, points: np.ndarray, queries: np.ndarray) -> np.ndarray:
        """Value of this scale's correction at each query."""
        kernel_rows = gaussian_kernel(queries, points[self.sampled_indices], self.epsilon_s)
        return kernel_rows @ self.coefficients


def estimate_rank(kernel: np.ndarray, rng: np.random.Generator) -> int:
    """
    Numerical rank of a kernel matrix from a column-sampled sketch.

    Counts singular values above RANK_RTOL times the largest one among a
    random subset of columns. A saturated sample (every sampled column
    independent) is read as full rank. The result is capped at p - 1.
    """
    p = kernel.shape[0]
    m = min(p, RANK_SKETCH_COLUMNS)
    columns = np.sort(rng.permutation(p)[:m])
    singular_values = la.svdvals(kernel[:, columns])
    rank = int(np.sum(singular_values > RANK_RTOL * singular_values[0]))
    if rank == m:
        rank = p
    return max(1, min(rank, p - 1))


def fit_mse(
    points,
    f,
    t: float,
    err: float,
    rng: Optional[np.random.Generator] = None,
    max_scales: int = DEFAULT_MAX_SCALES,
) -> Tuple[List[MseScale], np.ndarray]:
    """
    Fit the multiscale representation of f on the training points.

    Returns:
        Tuple of (fitted scales, accumulated approximation at training points)

    Raises:
        NoConvergenceError: If max_scales are used with residual above err
    """
    if not t > 0:
        raise ValueError(f"t must be positive, got {t}")
    points = as_points(points)
    f = np.asarray(f, dtype=float).reshape(-1)
    rng = rng if rng is not None else np.random.default_rng(0)
    p = points.shape[0]

    approximation = np.zeros(p)
    scales: List[MseScale] = []
    residual = float(np.linalg.norm(f))
    s = 0

    while residual > err:
        if s >= max_scales:
            raise NoConvergenceError(residual, s)

        epsilon_s = t / 2.0**s
        kernel = build_gaussian_kernel(points, GaussianKernelConfig(epsilon_s))
        if p > 1:
            rank = estimate_rank(kernel, rng)
            decomposition = randomized_id(kernel, rank, rng=rng)
            sampled = decomposition.sampled_indices
            basis = decomposition.basis
        else:
            rank, sampled, basis = 1, np.zeros(1, dtype=np.intp), kernel

        coefficients = basis_coefficients(basis, f - approximation)
        approximation = approximation + basis @ coefficients
        scales.append(
            MseScale(
                scale=s,
                epsilon_s=epsilon_s,
                rank=rank,
                sampled_indices=sampled,
                basis=basis,
                coefficients=coefficients,
            )
        )
        residual = float(np.linalg.norm(f - approximation))
        logger.debug(f"MSE scale {s}: eps={epsilon_s:.4g} rank={rank} residual={residual:.3e}")
        s += 1

    logger.info(f"MSE converged after {len(scales)} scales, residual={residual:.3e}")
    return scales, approximation


def mse_extend(
    points,
    f,
    x,
    t: float,
    err: float,
    rng: Optional[np.random.Generator] = None,
    max_scales: int = DEFAULT_MAX_SCALES,
) -> Tuple[np.ndarray, Union[float, np.ndarray]]:
    """
    Multiscale extension of f to the query x.

    Args:
        points: (p, n) training points
        f: Function values at the training points
        x: Query of length n, or (q, n) queries
        t: Coarsest kernel width T
        err: Target training residual norm
        rng: Random generator for the interpolative decompositions
        max_scales: Cap on the number of scales

    Returns:
        Tuple of (approximation at training points, value(s) at x)

    Raises:
        NoConvergenceError: If max_scales are used with residual above err
    """
    points = as_points(points)
    scales, approximation = fit_mse(points, f, t, err, rng=rng, max_scales=max_scales)
    x = np.asarray(x, dtype=float)
    queries = np.atleast_2d(x)
    values = np.zeros(queries.shape[0])
    for scale in scales:
        values += scale.evaluate(points, queries)
    return approximation, (float(values[0]) if x.ndim == 1 else values)


class MseExtender(FunctionExtender):
    """Multiscale extension; the coarsest width defaults to the largest squared distance."""

    name = "mse"

    def __init__(
        self,
        err: float = 1e-3,
        t: Optional[float] = None,
        seed: int = 0,
        max_scales: int = DEFAULT_MAX_SCALES,
    ):
        super().__init__()
        self.err = err
        self.t = t
        self.seed = seed
        self.max_scales = max_scales
        self.scales: List[MseScale] = []

    def _fit(self) -> None:
        t = self.t or max_squared_distance(self.points)
        self.scales, _ = fit_mse(
            self.points,
            self.values,
            t,
            self.err,
            rng=np.random.default_rng(self.seed),
            max_scales=self.max_scales,
        )

    def extend(self, queries) -> np.ndarray:
        queries = self._queries(queries)
        values = np.zeros(queries.shape[0])
        for scale in self.scales:
            values += scale.evaluate(self.points, queries)
        return values
