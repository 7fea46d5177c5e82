"""
Covariance Cache for per-point tangent estimation.

This module provides a thread-safe cache for local covariance matrices
keyed by training index, so concurrent queries against one model share
one stored matrix per training point.
"""

import logging
import threading
from typing import Callable, Dict, List, Optional

import numpy as np

logger = logging.getLogger(__name__)


class CovarianceCache:
    """
    Thread-safe cache for local covariance matrices.

    Entries never expire: a training model is immutable, so a covariance
    computed for one of its points stays valid for the model's lifetime.
    """

    def __init__(self):
        """Initialize an empty covariance cache."""
        self._cache: Dict[int, np.ndarray] = {}
        self._lock = threading.RLock()

        logger.debug("CovarianceCache initialized")

    def get(self, index: int) -> Optional[np.ndarray]:
        """
        Get the cached covariance of a training point.

        Args:
            index: Training point index

        Returns:
            Cached covariance matrix or None if not cached
        """
        with self._lock:
            return self._cache.get(index)

    def set(self, index: int, covariance: np.ndarray) -> None:
        """
        Store a covariance matrix in the cache.

        Args:
            index: Training point index
            covariance: d x d covariance matrix (stored read-only)
        """
        covariance = np.array(covariance, dtype=float)
        covariance.setflags(write=False)
        with self._lock:
            self._cache[index] = covariance
            logger.debug(f"Cached covariance for training point {index}")

    def get_or_compute(
        self, index: int, compute: Callable[[int], np.ndarray]
    ) -> np.ndarray:
        """
        Return the cached covariance, computing and storing it on a miss.

        The compute callable runs without the lock held. Two threads
        missing on the same index may both compute; the first stored
        value wins and both receive it.

        Args:
            index: Training point index
            compute: Callable producing the covariance for an index

        Returns:
            The covariance matrix for the index
        """
        with self._lock:
            cached = self._cache.get(index)
        if cached is not None:
            return cached

        covariance = np.array(compute(index), dtype=float)
        covariance.setflags(write=False)
        with self._lock:
            stored = self._cache.setdefault(index, covariance)
        if stored is covariance:
            logger.debug(f"Cached covariance for training point {index}")
        return stored

    def clear(self) -> None:
        """Clear all cached entries."""
        with self._lock:
            self._cache.clear()
            logger.debug("Cache cleared")

    def size(self) -> int:
        """
        Get the number of cached entries.

        Returns:
            Number of entries in the cache
        """
        with self._lock:
            return len(self._cache)

    def keys(self) -> List[int]:
        """
        Get all cached training indices.

        Returns:
            Sorted list of cached indices
        """
        with self._lock:
            return sorted(self._cache.keys())

    def delete(self, index: int) -> bool:
        """
        Delete an entry from the cache.

        Args:
            index: Training point index

        Returns:
            True if the entry was deleted, False if it didn't exist
        """
        with self._lock:
            if index in self._cache:
                del self._cache[index]
                logger.debug(f"Deleted cache entry for {index}")
                return True
            return False
