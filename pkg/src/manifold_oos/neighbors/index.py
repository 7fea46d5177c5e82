"""
Exact spatial index over training points.

Wraps a scipy k-d tree for epsilon-ball and nearest-neighbor queries, and
computes the empirical covering radius used as the delta of a delta-net.
"""

import logging
from typing import Tuple

import numpy as np
from scipy.spatial import cKDTree

from manifold_oos.exceptions import OutOfRangeError

logger = logging.getLogger(__name__)

# Relative slack on the tree's radius so borderline points are re-checked
# against the exact Euclidean distance below.
_RADIUS_SLACK = 1e-9


def as_points(points) -> np.ndarray:
    """Return points as a 2-D float array, promoting 1-D input to one column."""
    arr = np.asarray(points, dtype=float)
    if arr.ndim == 1:
        arr = arr.reshape(-1, 1)
    if arr.ndim != 2:
        raise OutOfRangeError(f"Expected a 2-D point array, got shape {arr.shape}")
    return arr


class SpatialIndex:
    """
    Exact radius and nearest-neighbor queries over a fixed point set.

    Radius query results are sorted by ascending distance with ties broken
    by ascending index, and match a brute-force linear scan as sets.
    """

    def __init__(self, points):
        self.points = as_points(points)
        if self.points.shape[0] < 1:
            raise OutOfRangeError("Cannot index an empty point set")
        self._tree = cKDTree(self.points)
        logger.debug(
            f"SpatialIndex built over {self.points.shape[0]} points "
            f"in dimension {self.points.shape[1]}"
        )

    def __len__(self) -> int:
        return self.points.shape[0]

    @property
    def dim(self) -> int:
        return self.points.shape[1]

    def radius_query(self, x, radius: float) -> Tuple[np.ndarray, np.ndarray]:
        """
        Find all points within a Euclidean radius of x.

        Args:
            x: Query vector of length dim
            radius: Ball radius (inclusive)

        Returns:
            Tuple of (indices, distances), ascending by distance then index
        """
        x = np.asarray(x, dtype=float).reshape(-1)
        candidates = self._tree.query_ball_point(
            x, radius * (1.0 + _RADIUS_SLACK) + _RADIUS_SLACK
        )
        indices = np.asarray(candidates, dtype=np.intp)
        if indices.size == 0:
            return indices, np.empty(0, dtype=float)

        distances = np.linalg.norm(self.points[indices] - x, axis=1)
        keep = distances <= radius
        indices, distances = indices[keep], distances[keep]

        order = np.lexsort((indices, distances))
        return indices[order], distances[order]

    def nearest(self, x, k: int = 1) -> Tuple[np.ndarray, np.ndarray]:
        """
        Find the k nearest points to x.

        Returns:
            Tuple of (indices, distances), ascending by distance
        """
        x = np.asarray(x, dtype=float).reshape(-1)
        k = min(k, len(self))
        distances, indices = self._tree.query(x, k=k)
        return np.atleast_1d(indices).astype(np.intp), np.atleast_1d(distances)

    def nearest_distances(self, targets) -> np.ndarray:
        """Distance from each target point to its nearest indexed point."""
        distances, _ = self._tree.query(as_points(targets), k=1)
        return np.asarray(distances, dtype=float)


def build_index(points) -> SpatialIndex:
    """
    Build an exact spatial index over a point set.

    Args:
        points: Array of shape (p, n) with p >= 1

    Returns:
        SpatialIndex answering radius and nearest-neighbor queries
    """
    return SpatialIndex(points)


def covering_radius(points, targets) -> float:
    """
    Empirical covering radius of a training set over a set of target points.

    Returns the largest distance from any target point to its nearest
    training point, i.e. the smallest delta for which the training set is
    a delta-net of the targets.

    Raises:
        OutOfRangeError: If fewer than two training points are given
    """
    points = as_points(points)
    if points.shape[0] < 2:
        raise OutOfRangeError("covering_radius needs at least two training points")
    delta = float(np.max(SpatialIndex(points).nearest_distances(targets)))
    logger.debug(f"Covering radius over {len(as_points(targets))} targets: {delta:.6g}")
    return delta


def nearest_neighbor_distances(points) -> np.ndarray:
    """Distance from each point to its nearest other point in the set."""
    points = as_points(points)
    if points.shape[0] < 2:
        return np.zeros(points.shape[0])
    distances, _ = cKDTree(points).query(points, k=2)
    return np.asarray(distances[:, 1], dtype=float)
