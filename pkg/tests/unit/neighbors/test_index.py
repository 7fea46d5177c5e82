"""
Unit tests for the exact spatial index.

Every query is checked against a brute-force linear scan.
"""

import numpy as np
import pytest

from manifold_oos.bench.sphere import fine_grid, parameter_grid
from manifold_oos.exceptions import OutOfRangeError
from manifold_oos.neighbors.index import (
    SpatialIndex,
    as_points,
    build_index,
    covering_radius,
    nearest_neighbor_distances,
)


def _linear_scan(points: np.ndarray, x: np.ndarray, radius: float) -> set:
    return {i for i in range(points.shape[0]) if np.linalg.norm(points[i] - x) <= radius}


@pytest.mark.unit
def test_radius_queries_match_linear_scan(rng):
    """
    Given: 1000 random points in R^3
    When: 50 random radius queries are answered
    Then: Each result equals the linear-scan set
    """
    # Arrange
    points = rng.uniform(-1.0, 1.0, size=(1000, 3))
    index = build_index(points)

    # Act / Assert
    for _ in range(50):
        x = rng.uniform(-1.0, 1.0, size=3)
        radius = float(rng.uniform(0.05, 0.5))
        indices, distances = index.radius_query(x, radius)

        assert set(indices.tolist()) == _linear_scan(points, x, radius)
        np.testing.assert_allclose(distances, np.linalg.norm(points[indices] - x, axis=1))


@pytest.mark.unit
def test_sphere_grid_neighbors_match_linear_scan(sphere_dataset):
    """
    Given: The 900-point sphere grid and a random query
    When: Its epsilon-ball is found
    Then: It has at least 3 members and matches a scan over all 900 points
    """
    points = sphere_dataset.training_params
    x = sphere_dataset.queries[0]
    epsilon = sphere_dataset.to_model().epsilon

    indices, _ = SpatialIndex(points).radius_query(x, epsilon)

    assert len(indices) >= 3
    assert set(indices.tolist()) == _linear_scan(points, x, epsilon)


@pytest.mark.unit
def test_radius_is_inclusive_and_ties_order_by_index():
    """
    Given: Four points at distance exactly 1 from the origin
    When: The unit ball is queried
    Then: All four come back, ordered by index
    """
    points = np.array([[0.0, 1.0], [1.0, 0.0], [0.0, -1.0], [-1.0, 0.0], [3.0, 3.0]])

    indices, distances = SpatialIndex(points).radius_query([0.0, 0.0], 1.0)

    assert indices.tolist() == [0, 1, 2, 3]
    np.testing.assert_array_equal(distances, 1.0)


@pytest.mark.unit
def test_empty_ball():
    indices, distances = SpatialIndex(np.array([[5.0, 5.0]])).radius_query([0.0, 0.0], 1.0)

    assert indices.size == 0
    assert distances.size == 0


@pytest.mark.unit
def test_nearest_is_sorted(rng):
    points = rng.standard_normal((50, 2))
    x = np.zeros(2)

    indices, distances = SpatialIndex(points).nearest(x, k=5)

    brute = np.argsort(np.linalg.norm(points - x, axis=1))[:5]
    assert indices.tolist() == brute.tolist()
    assert np.all(np.diff(distances) >= 0)


@pytest.mark.unit
def test_covering_radius_matches_double_loop():
    """
    Given: The 900-point sphere grid and its 4x-per-axis fine grid
    When: The covering radius is computed
    Then: It equals a brute-force maximum of nearest distances
    """
    # Arrange
    points = parameter_grid(30)
    targets = fine_grid(30)

    # Act
    delta = covering_radius(points, targets)

    # Assert
    brute = max(np.min(np.linalg.norm(points - target, axis=1)) for target in targets)
    assert delta == pytest.approx(brute, rel=1e-12)
    spacing = np.pi / 29
    assert delta == pytest.approx(spacing / np.sqrt(2.0), rel=1e-9)


@pytest.mark.unit
def test_covering_radius_needs_two_points():
    with pytest.raises(OutOfRangeError):
        covering_radius(np.zeros((1, 2)), np.ones((3, 2)))


@pytest.mark.unit
def test_nearest_neighbor_distances():
    points = np.array([[0.0], [1.0], [3.0]])

    np.testing.assert_allclose(nearest_neighbor_distances(points), [1.0, 1.0, 2.0])
    np.testing.assert_array_equal(nearest_neighbor_distances(points[:1]), [0.0])


@pytest.mark.unit
def test_as_points_promotes_vectors():
    assert as_points([1.0, 2.0, 3.0]).shape == (3, 1)
    with pytest.raises(OutOfRangeError):
        as_points(np.zeros((2, 2, 2)))


@pytest.mark.unit
def test_empty_index_is_rejected():
    with pytest.raises(OutOfRangeError):
        SpatialIndex(np.empty((0, 2)))
