"""
Data models for PCA-based out-of-sample extension.

This module provides the core data structures: the training model pairing
ambient points with their embedded images, epsilon-ball neighborhoods,
precision blocks, and extension results.
"""

from dataclasses import dataclass, field, replace
from typing import Any, Dict, Optional

import numpy as np
from scipy.linalg import LinAlgError, cholesky

from manifold_oos.cache.store import CovarianceCache
from manifold_oos.exceptions import ValidationFailure
from manifold_oos.neighbors.index import SpatialIndex, as_points

# Relative tolerance for the symmetry check of a precision block
SYMMETRY_RTOL = 1e-10


def _frozen(arr: np.ndarray) -> np.ndarray:
    arr = np.array(arr, dtype=float)
    arr.setflags(write=False)
    return arr


@dataclass(frozen=True, eq=False)
class TrainingModel:
    """
    A training set and its precomputed low-dimensional images.

    Attributes:
        points: (p, n) array of ambient training points
        images: (p, d) array of embedded images of the points
        epsilon: Radius of the neighborhood rule
        curvature_c: Curvature bound used by the tangent weights
    """

    points: np.ndarray
    images: np.ndarray
    epsilon: float
    curvature_c: float = 1.0

    # Derived, built once in __post_init__
    index: SpatialIndex = field(init=False, repr=False)
    covariance_cache: CovarianceCache = field(init=False, repr=False)

    def __post_init__(self):
        try:
            points = _frozen(as_points(self.points))
            images = _frozen(as_points(self.images))
        except Exception as e:
            raise ValidationFailure(f"Malformed point or image array: {e}") from e

        if points.shape[0] < 1:
            raise ValidationFailure("A training model needs at least one point")
        if points.shape[0] != images.shape[0]:
            raise ValidationFailure(
                f"points has {points.shape[0]} rows but images has {images.shape[0]}"
            )
        if not (np.all(np.isfinite(points)) and np.all(np.isfinite(images))):
            raise ValidationFailure("Training points and images must be finite")
        if not (np.isfinite(self.epsilon) and self.epsilon > 0):
            raise ValidationFailure(f"epsilon must be positive, got {self.epsilon}")
        if not (np.isfinite(self.curvature_c) and self.curvature_c > 0):
            raise ValidationFailure(
                f"curvature_c must be positive, got {self.curvature_c}"
            )

        object.__setattr__(self, "points", points)
        object.__setattr__(self, "images", images)
        object.__setattr__(self, "epsilon", float(self.epsilon))
        object.__setattr__(self, "curvature_c", float(self.curvature_c))
        object.__setattr__(self, "index", SpatialIndex(points))
        object.__setattr__(self, "covariance_cache", CovarianceCache())

    @property
    def size(self) -> int:
        """Number of training points p."""
        return self.points.shape[0]

    @property
    def ambient_dim(self) -> int:
        return self.points.shape[1]

    @property
    def embed_dim(self) -> int:
        return self.images.shape[1]

    def with_overrides(
        self,
        epsilon: Optional[float] = None,
        curvature_c: Optional[float] = None,
    ) -> "TrainingModel":
        """Return a copy with epsilon and/or curvature_c replaced."""
        return replace(
            self,
            epsilon=self.epsilon if epsilon is None else epsilon,
            curvature_c=self.curvature_c if curvature_c is None else curvature_c,
        )

    def subset(self, indices) -> "TrainingModel":
        """Return a model restricted to the given training indices."""
        indices = np.asarray(indices, dtype=np.intp)
        return TrainingModel(
            points=self.points[indices],
            images=self.images[indices],
            epsilon=self.epsilon,
            curvature_c=self.curvature_c,
        )

    def same_as(self, other: "TrainingModel") -> bool:
        """Bit-exact comparison of all persisted fields."""
        return (
            self.epsilon == other.epsilon
            and self.curvature_c == other.curvature_c
            and np.array_equal(self.points, other.points)
            and np.array_equal(self.images, other.images)
        )


@dataclass(frozen=True, eq=False)
class Neighborhood:
    """
    Epsilon-ball neighbors of a query point.

    Attributes:
        indices: Training indices, ascending by distance then index
        distances: Euclidean distances to the query
        query: The query point
        epsilon: Radius the neighborhood was built with
    """

    indices: np.ndarray
    distances: np.ndarray
    query: np.ndarray
    epsilon: float

    @property
    def size(self) -> int:
        """Neighbor count k."""
        return int(self.indices.shape[0])


@dataclass(frozen=True, eq=False)
class PrecisionBlock:
    """
    One d x d symmetric positive-definite precision matrix.

    Blocks multiply residuals directly: a larger block means a stronger
    pull of that neighbor's image on the extension.
    """

    matrix: np.ndarray

    def is_symmetric(self, rtol: float = SYMMETRY_RTOL) -> bool:
        m = np.asarray(self.matrix, dtype=float)
        scale = max(float(np.max(np.abs(m))), np.finfo(float).tiny)
        return bool(np.max(np.abs(m - m.T)) <= rtol * scale)

    def is_positive_definite(self) -> bool:
        """True when a Cholesky factorization succeeds."""
        try:
            cholesky(np.asarray(self.matrix, dtype=float), lower=True)
        except LinAlgError:
            return False
        return True

    def is_valid(self) -> bool:
        return self.is_symmetric() and self.is_positive_definite()


@dataclass(eq=False)
class ExtensionResult:
    """
    The out-of-sample extension of one query point.

    Attributes:
        embedding: Extended coordinates, length embed_dim
        score: Mahalanobis abnormality score (nonnegative)
        neighbor_count: Number of neighbors used
        epsilon_used: Neighborhood radius after any doubling
        squared_score: Squared Mahalanobis score, kept as a diagnostic
        exact: True when the query coincided with a training point
    """

    embedding: np.ndarray
    score: float
    neighbor_count: int
    epsilon_used: float
    squared_score: float = 0.0
    exact: bool = False

    def to_dict(self) -> Dict[str, Any]:
        """Convert to dictionary representation."""
        return {
            "embedding": [float(v) for v in self.embedding],
            "score": self.score,
            "squared_score": self.squared_score,
            "neighbor_count": self.neighbor_count,
            "epsilon_used": self.epsilon_used,
            "exact": self.exact,
        }
