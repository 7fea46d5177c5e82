"""
Unit tests for the covariance cache.

These tests verify memoization, thread safety and basic CRUD operations.
"""

import threading
from concurrent.futures import ThreadPoolExecutor

import numpy as np
import pytest

from manifold_oos.cache.store import CovarianceCache


@pytest.mark.unit
def test_cache_get_returns_cached():
    """
    Given: A covariance is stored in cache
    When: get() is called
    Then: Returns the cached matrix
    """
    # Arrange
    cache = CovarianceCache()
    cache.set(3, np.eye(2))

    # Act
    result = cache.get(3)

    # Assert
    np.testing.assert_array_equal(result, np.eye(2))


@pytest.mark.unit
def test_cache_get_returns_none_for_missing():
    cache = CovarianceCache()

    assert cache.get(0) is None


@pytest.mark.unit
def test_cache_stores_read_only_copy():
    """
    Given: A covariance array stored in cache
    When: The caller mutates its own array afterwards
    Then: The cached copy is unchanged and cannot be written
    """
    # Arrange
    cache = CovarianceCache()
    cov = np.eye(2)
    cache.set(1, cov)

    # Act
    cov[0, 0] = 9.0

    # Assert
    assert cache.get(1)[0, 0] == 1.0
    with pytest.raises(ValueError):
        cache.get(1)[0, 0] = 5.0


@pytest.mark.unit
def test_cache_get_or_compute_computes_once():
    """
    Given: An empty cache
    When: get_or_compute() is called twice for the same index
    Then: The compute function runs once and both calls share the result
    """
    # Arrange
    cache = CovarianceCache()
    calls = []

    def compute(index):
        calls.append(index)
        return np.full((2, 2), float(index))

    # Act
    first = cache.get_or_compute(5, compute)
    second = cache.get_or_compute(5, compute)

    # Assert
    assert calls == [5]
    assert first is second


@pytest.mark.unit
def test_cache_thread_safety():
    """
    Given: Many threads requesting overlapping indices concurrently
    When: get_or_compute() runs in parallel
    Then: Every caller of an index receives the one stored matrix
    """
    # Arrange
    cache = CovarianceCache()
    counts = {}
    lock = threading.Lock()

    def compute(index):
        with lock:
            counts[index] = counts.get(index, 0) + 1
        return np.eye(3) * index

    # Act
    with ThreadPoolExecutor(max_workers=8) as pool:
        pairs = list(
            pool.map(lambda i: (i % 10, cache.get_or_compute(i % 10, compute)), range(200))
        )

    # Assert
    assert cache.size() == 10
    assert all(counts[index] >= 1 for index in range(10))
    for index, covariance in pairs:
        assert covariance is cache.get(index)


@pytest.mark.unit
def test_compute_runs_without_the_lock_held():
    """
    Given: A compute callable that waits on another thread using the cache
    When: get_or_compute() misses and runs the callable
    Then: The other thread can read and write the cache meanwhile
    """
    # Arrange
    cache = CovarianceCache()
    finished = threading.Event()

    def other_thread():
        cache.set(1, np.eye(2))
        cache.size()
        finished.set()

    def compute(index):
        worker = threading.Thread(target=other_thread)
        worker.start()
        worker.join(timeout=5)
        return np.eye(2) * index

    # Act
    result = cache.get_or_compute(3, compute)

    # Assert
    assert finished.is_set()
    assert cache.keys() == [1, 3]
    np.testing.assert_array_equal(result, 3 * np.eye(2))


@pytest.mark.unit
def test_first_stored_value_wins():
    """
    Given: An entry stored by another caller while compute was running
    When: get_or_compute() finishes its own computation
    Then: The earlier entry is kept and returned
    """
    # Arrange
    cache = CovarianceCache()
    earlier = np.full((2, 2), 7.0)

    def compute(index):
        cache.set(index, earlier)
        return np.zeros((2, 2))

    # Act
    result = cache.get_or_compute(4, compute)

    # Assert
    np.testing.assert_array_equal(result, earlier)
    assert result is cache.get(4)
    assert not result.flags.writeable


@pytest.mark.unit
def test_cache_clear():
    cache = CovarianceCache()
    cache.set(0, np.eye(2))
    cache.set(1, np.eye(2))

    cache.clear()

    assert cache.size() == 0


@pytest.mark.unit
def test_cache_keys_sorted():
    cache = CovarianceCache()
    for index in (7, 2, 5):
        cache.set(index, np.eye(1))

    assert cache.keys() == [2, 5, 7]


@pytest.mark.unit
def test_cache_delete():
    """
    Given: A cached entry
    When: delete() is called twice
    Then: Returns True then False
    """
    cache = CovarianceCache()
    cache.set(4, np.eye(2))

    assert cache.delete(4) is True
    assert cache.delete(4) is False
    assert cache.get(4) is None
