"""
Closed-form generalized least squares over block-diagonal precisions.
"""

import logging
from typing import Sequence, Union

import numpy as np
from scipy.linalg import LinAlgError, cho_factor, cho_solve

from manifold_oos.core.models import PrecisionBlock
from manifold_oos.exceptions import SingularSystemError

logger = logging.getLogger(__name__)

Blocks = Union[np.ndarray, Sequence[PrecisionBlock], Sequence[np.ndarray]]

# Relative residual of the normal equations above which a solve is reported
NORMAL_RESIDUAL_RTOL = 1e-8


def as_block_array(blocks: Blocks) -> np.ndarray:
    """Stack precision blocks into a (k, d, d) float array."""
    if isinstance(blocks, np.ndarray):
        arr = blocks.astype(float, copy=False)
    else:
        arr = np.stack(
            [b.matrix if isinstance(b, PrecisionBlock) else b for b in blocks]
        ).astype(float, copy=False)
    if arr.ndim != 3 or arr.shape[1] != arr.shape[2]:
        raise ValueError(f"Expected blocks of shape (k, d, d), got {arr.shape}")
    return arr


def gls_extend(blocks: Blocks, nb_images) -> np.ndarray:
    """
    Solve (sum_j P_j) y = sum_j P_j psi_j for y.

    Args:
        blocks: k precision blocks P_j, each d x d SPD
        nb_images: (k, d) neighbor images psi_j

    Returns:
        The GLS estimate y, length d

    Raises:
        SingularSystemError: If the summed precision is not positive definite
    """
    P = as_block_array(blocks)
    images = np.atleast_2d(np.asarray(nb_images, dtype=float))
    if P.shape[0] != images.shape[0] or P.shape[0] < 1:
        raise ValueError(
            f"Got {P.shape[0]} blocks for {images.shape[0]} images"
        )

    total = P.sum(axis=0)
    total = 0.5 * (total + total.T)
    rhs = np.einsum("kij,kj->i", P, images)

    try:
        factor = cho_factor(total, lower=True)
    except (LinAlgError, ValueError) as e:
        raise SingularSystemError(
            "Sum of precision blocks is not positive definite"
        ) from e
    y_hat = cho_solve(factor, rhs)

    residual = np.linalg.norm(total @ y_hat - rhs)
    scale = np.linalg.norm(total) * np.linalg.norm(y_hat) + np.linalg.norm(rhs)
    if scale > 0 and residual > NORMAL_RESIDUAL_RTOL * scale:
        logger.warning(
            f"GLS normal equations residual {residual / scale:.3e} exceeds tolerance"
        )
    return y_hat


def squared_mahalanobis_score(y_hat, blocks: Blocks, nb_images) -> float:
    """Sum over neighbors of (y - psi_j)^T P_j (y - psi_j)."""
    P = as_block_array(blocks)
    residuals = np.asarray(y_hat, dtype=float)[None, :] - np.atleast_2d(
        np.asarray(nb_images, dtype=float)
    )
    value = float(np.einsum("ki,kij,kj->", residuals, P, residuals))
    return max(value, 0.0)


def mahalanobis_score(y_hat, blocks: Blocks, nb_images) -> float:
    """
    Mahalanobis distance of an extension from its neighbor images.

    Returns the square root of squared_mahalanobis_score.
    """
    return float(np.sqrt(squared_mahalanobis_score(y_hat, blocks, nb_images)))
