"""
Randomized interpolative decomposition and single-scale kernel extension.
"""

import logging
from typing import Callable, NamedTuple, Optional, Tuple, Union

import numpy as np
import scipy.linalg as la

from manifold_oos.exceptions import IllConditionedBasisError, RankDeficientSketchError

logger = logging.getLogger(__name__)

MAX_SKETCH_RETRIES = 3

# Smallest-to-largest singular value ratio tolerated in an extension basis
BASIS_RTOL = 1e-12


class InterpolativeDecomposition(NamedTuple):
    """Column subset B = A[:, sampled_indices] with A ~ B @ interpolation."""

    basis: np.ndarray
    sampled_indices: np.ndarray
    interpolation: np.ndarray

    def reconstruct(self) -> np.ndarray:
        return self.basis @ self.interpolation


def _sketch_id(a: np.ndarray, l: int, rng: np.random.Generator) -> InterpolativeDecomposition:
    m, n = a.shape
    sketch = rng.standard_normal((l, m)) @ a
    _, r, perm = la.qr(sketch, mode="economic", pivoting=True)

    diag = np.abs(np.diag(r))
    tol = max(m, n) * np.finfo(float).eps * (diag[0] if diag.size else 0.0)
    rank = int(np.sum(diag > tol))
    if rank < l:
        raise RankDeficientSketchError(rank, l)

    r11 = r[:l, :l]
    coupling = la.solve_triangular(r11, r[:l, l:], lower=False)

    interpolation = np.zeros((l, n))
    interpolation[:, perm[:l]] = np.eye(l)
    interpolation[:, perm[l:]] = coupling

    sampled = np.asarray(perm[:l], dtype=np.intp)
    return InterpolativeDecomposition(a[:, sampled], sampled, interpolation)


def randomized_id(
    a,
    l: int,
    rng: Optional[np.random.Generator] = None,
    max_retries: int = MAX_SKETCH_RETRIES,
) -> InterpolativeDecomposition:
    """
    Randomized interpolative decomposition of a matrix.

    Forms the l x n sketch G @ a with a standard normal G, runs a
    column-pivoted QR on it and keeps the first l pivot columns of a.

    Args:
        a: (m, n) matrix
        l: Number of columns to sample, l < min(m, n)
        rng: Random generator; a fresh default generator when omitted
        max_retries: Fresh sketches tried after a rank-deficient one

    Returns:
        InterpolativeDecomposition (basis, sampled_indices, interpolation)

    Raises:
        RankDeficientSketchError: If every sketch is rank deficient
    """
    a = np.asarray(a, dtype=float)
    m, n = a.shape
    if not 1 <= l < min(m, n):
        raise ValueError(f"Need 1 <= l < min(m, n) = {min(m, n)}, got l={l}")
    rng = rng if rng is not None else np.random.default_rng()

    attempt = 0
    while True:
        try:
            return _sketch_id(a, l, rng)
        except RankDeficientSketchError as e:
            if attempt >= max_retries:
                raise
            attempt += 1
            logger.warning(f"{e}; retrying with a fresh sketch ({attempt}/{max_retries})")


def basis_coefficients(basis, f) -> np.ndarray:
    """
    Least-squares coefficients of f on a kernel column basis.

    Raises:
        IllConditionedBasisError: If the basis is numerically rank deficient
    """
    basis = np.asarray(basis, dtype=float)
    singular_values = la.svdvals(basis)
    if singular_values.size == 0 or singular_values[-1] < BASIS_RTOL * singular_values[0]:
        condition = (
            np.inf if singular_values.size == 0 or singular_values[-1] == 0
            else singular_values[0] / singular_values[-1]
        )
        raise IllConditionedBasisError(condition)
    return la.pinv(basis) @ np.asarray(f, dtype=float)


def single_scale_extend(
    basis,
    sampled_points,
    x,
    f,
    kernel_fn: Callable[[np.ndarray, np.ndarray], np.ndarray],
) -> Tuple[np.ndarray, Union[float, np.ndarray]]:
    """
    Project f on a kernel column basis and extend the projection to x.

    Args:
        basis: (p, l) basis of kernel columns
        sampled_points: (l, n) training points whose columns form the basis
        x: Query of length n, or (q, n) queries
        f: Function values at the p training points
        kernel_fn: kernel_fn(queries, sampled_points) -> (q, l) kernel rows

    Returns:
        Tuple of (projection of f on the basis, extended value(s) at x)

    Raises:
        IllConditionedBasisError: If the basis is numerically rank deficient
    """
    basis = np.asarray(basis, dtype=float)
    coefficients = basis_coefficients(basis, f)
    projection = basis @ coefficients

    x = np.asarray(x, dtype=float)
    values = kernel_fn(np.atleast_2d(x), sampled_points) @ coefficients
    return projection, (float(values[0]) if x.ndim == 1 else values)
