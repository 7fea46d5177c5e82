"""
Unit tests for the Gaussian kernel helpers.
"""

import numpy as np
import pytest

from manifold_oos.baselines.kernels import (
    GaussianKernelConfig,
    build_gaussian_kernel,
    max_squared_distance,
    median_squared_distance,
    row_normalized_kernel,
)
from manifold_oos.exceptions import ConfigurationError


@pytest.mark.unit
def test_identical_points_give_all_ones():
    kernel = build_gaussian_kernel(np.zeros((2, 3)), GaussianKernelConfig(1.0))
    np.testing.assert_array_equal(kernel, np.ones((2, 2)))


@pytest.mark.unit
def test_unit_distance_off_diagonal():
    """
    Given: Points 0 and 1 on a line and epsilon 1
    When: The kernel is built
    Then: The off-diagonal entries are exp(-1)
    """
    kernel = build_gaussian_kernel(np.array([[0.0], [1.0]]), GaussianKernelConfig(1.0))

    assert kernel[0, 1] == pytest.approx(np.exp(-1.0), rel=1e-15)
    assert kernel[1, 0] == kernel[0, 1]
    np.testing.assert_array_equal(np.diag(kernel), [1.0, 1.0])


@pytest.mark.unit
def test_kernel_matches_elementwise_evaluation(rng):
    """
    Given: 10 random points in R^4
    When: The kernel is built with epsilon 0.7
    Then: Each entry matches exp(-|x_i - x_j|^2 / epsilon) and the matrix is PSD
    """
    # Arrange
    points = rng.standard_normal((10, 4))
    epsilon = 0.7

    # Act
    kernel = build_gaussian_kernel(points, GaussianKernelConfig(epsilon))

    # Assert
    for i in range(10):
        for j in range(10):
            expected = np.exp(-np.sum((points[i] - points[j]) ** 2) / epsilon)
            assert abs(kernel[i, j] - expected) <= 1e-15 + 1e-14 * expected
    np.testing.assert_array_equal(kernel, kernel.T)
    eigenvalues = np.linalg.eigvalsh(kernel)
    assert eigenvalues.min() >= -1e-10 * eigenvalues.max()


@pytest.mark.unit
def test_row_normalized_rows_sum_to_one(rng):
    points = rng.standard_normal((30, 2))
    queries = rng.standard_normal((7, 2))

    kernel = row_normalized_kernel(queries, points, 0.5)

    np.testing.assert_allclose(kernel.sum(axis=1), 1.0, atol=1e-12)


@pytest.mark.unit
def test_default_widths():
    """
    Given: Points 0, 1 and 3 on a line
    When: The default kernel widths are computed
    Then: They are the median and maximum squared distances
    """
    points = np.array([[0.0], [1.0], [3.0]])

    assert median_squared_distance(points) == pytest.approx(4.0)
    assert max_squared_distance(points) == pytest.approx(9.0)
    assert median_squared_distance(points[:1]) == 1.0


@pytest.mark.unit
def test_kernel_config_rejects_nonpositive_width():
    with pytest.raises(ConfigurationError):
        GaussianKernelConfig(0.0)
