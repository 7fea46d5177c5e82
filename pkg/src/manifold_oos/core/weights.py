"""
Weight schemes for the GLS out-of-sample extension.

This module builds one precision block per neighbor. Three schemes are
available: inverse-distance scalar weights, and tangent-space weights
from a local PCA covariance that is either shared by the whole
neighborhood or estimated separately around each neighbor.
"""

import logging
from dataclasses import dataclass
from enum import Enum

import numpy as np
from scipy.linalg import LinAlgError, cho_factor, cho_solve

from manifold_oos.core.models import Neighborhood, PrecisionBlock, TrainingModel
from manifold_oos.exceptions import (
    ConfigurationError,
    SingularBlockError,
    ZeroDistanceError,
)

logger = logging.getLogger(__name__)


class SchemeKind(Enum):
    """Available precision-block constructions."""

    DISTANCE = "distance"
    SHARED_TANGENT = "tangent"
    PER_POINT_TANGENT = "tangent-per-point"

    @classmethod
    def from_string(cls, value: str) -> "SchemeKind":
        """
        Parse a scheme from its CLI spelling or enum name.

        Raises:
            ConfigurationError: If the value names no scheme
        """
        normalized = value.lower().strip()
        for kind in cls:
            if normalized in (kind.value, kind.name.lower()):
                return kind
        raise ConfigurationError(
            f"Unknown scheme '{value}', expected one of "
            f"{', '.join(k.value for k in cls)}"
        )


@dataclass(frozen=True)
class WeightScheme:
    """
    Selected weight construction with its curvature bound.

    Attributes:
        kind: Which precision builder to use
        curvature_c: Curvature bound c of the tangent weights
    """

    kind: SchemeKind = SchemeKind.SHARED_TANGENT
    curvature_c: float = 1.0

    def __post_init__(self):
        if not self.curvature_c > 0:
            raise ConfigurationError(
                f"curvature_c must be positive, got {self.curvature_c}"
            )

    @classmethod
    def from_string(cls, value: str, curvature_c: float = 1.0) -> "WeightScheme":
        return cls(kind=SchemeKind.from_string(value), curvature_c=curvature_c)


def distance_precisions(nb: Neighborhood, embed_dim: int) -> np.ndarray:
    """
    Scalar inverse-square-distance precision blocks.

    Block j is lambda_j^2 * I with lambda_j = 1 / distance_j.

    Args:
        nb: Neighborhood of the query
        embed_dim: Dimension d of the images

    Returns:
        (k, d, d) array of precision blocks

    Raises:
        ZeroDistanceError: If the query coincides with a neighbor
    """
    distances = np.asarray(nb.distances, dtype=float)
    zero = np.flatnonzero(distances == 0.0)
    if zero.size:
        raise ZeroDistanceError(int(nb.indices[zero[0]]))

    lam_sq = 1.0 / distances**2
    return lam_sq[:, None, None] * np.eye(embed_dim)[None, :, :]


def local_covariance(nb_images, epsilon1: float, center=None) -> np.ndarray:
    """
    Local second-moment matrix of a set of neighbor images.

    Returns (1 / epsilon1^2) (1 / k) Xc^T Xc where Xc holds the images
    minus `center`, a d x d symmetric positive semi-definite matrix.
    Without a center the images are centered at their mean.
    """
    images = np.atleast_2d(np.asarray(nb_images, dtype=float))
    if images.shape[0] < 1:
        raise ValueError("local_covariance needs at least one image")
    origin = images.mean(axis=0) if center is None else np.asarray(center, dtype=float)
    centered = images - origin
    cov = centered.T @ centered / (images.shape[0] * epsilon1**2)
    return 0.5 * (cov + cov.T)


def tangent_basis(cov: np.ndarray, dim: int) -> np.ndarray:
    """
    Leading eigenvectors of a local covariance.

    Args:
        cov: d x d covariance
        dim: Number of tangent directions to keep

    Returns:
        (d, dim) array with orthonormal columns, by descending eigenvalue
    """
    eigenvalues, eigenvectors = np.linalg.eigh(cov)
    order = np.argsort(eigenvalues)[::-1]
    return eigenvectors[:, order[:dim]]


def point_covariance(model: TrainingModel, index: int) -> np.ndarray:
    """
    Local covariance around one training point, memoized on the model.

    Uses the images of the training points within model.epsilon of
    points[index], the point itself included, taken about images[index].
    A ball cut off by the edge of the sample keeps the spread it would
    have in the interior.
    """

    def compute(j: int) -> np.ndarray:
        members, _ = model.index.radius_query(model.points[j], model.epsilon)
        return local_covariance(
            model.images[members], model.epsilon, center=model.images[j]
        )

    return model.covariance_cache.get_or_compute(int(index), compute)


def _regularized_inverse(cov: np.ndarray, lam: float, c: float, j: int) -> np.ndarray:
    d = cov.shape[0]
    system = cov / lam**2 + np.eye(d) / (c * lam) ** 4
    try:
        factor = cho_factor(system, lower=True)
        block = cho_solve(factor, np.eye(d))
    except (LinAlgError, ValueError) as e:
        raise SingularBlockError(j) from e
    block = 0.5 * (block + block.T)
    if not PrecisionBlock(block).is_positive_definite():
        raise SingularBlockError(j)
    return block


def tangent_precisions(
    nb: Neighborhood, model: TrainingModel, scheme: WeightScheme
) -> np.ndarray:
    """
    Tangent-space precision blocks.

    Block j is (lambda_j^-2 cov_j + (c lambda_j)^-4 I)^-1. With the shared
    scheme cov_j is one covariance of the neighborhood's images; with the
    per-point scheme it is the local covariance around training point j.

    Args:
        nb: Neighborhood of the query, all distances > 0
        model: Training model
        scheme: SharedTangent or PerPointTangent scheme

    Returns:
        (k, d, d) array of precision blocks

    Raises:
        ZeroDistanceError: If the query coincides with a neighbor
        SingularBlockError: If a block fails the positive-definite check
    """
    distances = np.asarray(nb.distances, dtype=float)
    zero = np.flatnonzero(distances == 0.0)
    if zero.size:
        raise ZeroDistanceError(int(nb.indices[zero[0]]))

    lam = 1.0 / distances
    c = scheme.curvature_c
    d = model.embed_dim

    if scheme.kind is SchemeKind.SHARED_TANGENT:
        shared = local_covariance(model.images[nb.indices], model.epsilon)
        covariances = [shared] * nb.size
    elif scheme.kind is SchemeKind.PER_POINT_TANGENT:
        covariances = [point_covariance(model, j) for j in nb.indices]
    else:
        raise ConfigurationError(f"{scheme.kind} is not a tangent scheme")

    blocks = np.empty((nb.size, d, d))
    for j, (cov, lam_j) in enumerate(zip(covariances, lam)):
        blocks[j] = _regularized_inverse(cov, lam_j, c, int(nb.indices[j]))
    return blocks


def build_precisions(
    nb: Neighborhood, model: TrainingModel, scheme: WeightScheme
) -> np.ndarray:
    """Dispatch to the precision builder of the scheme."""
    if scheme.kind is SchemeKind.DISTANCE:
        return distance_precisions(nb, model.embed_dim)
    return tangent_precisions(nb, model, scheme)
