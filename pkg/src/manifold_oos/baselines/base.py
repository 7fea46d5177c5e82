"""
Common interface of the function extension methods.
"""

from abc import ABC, abstractmethod
from typing import Optional

import numpy as np

from manifold_oos.exceptions import InputError
from manifold_oos.neighbors.index import as_points


class FunctionExtender(ABC):
    """Abstract base class for extending a function from training points to queries."""

    name: str = ""

    def __init__(self):
        self.points: Optional[np.ndarray] = None
        self.values: Optional[np.ndarray] = None

    def fit(self, points, values) -> "FunctionExtender":
        """
        Fit the method to function values at training points.

        Args:
            points: (p, n) training points
            values: Function values, length p

        Returns:
            self
        """
        points = as_points(points)
        values = np.asarray(values, dtype=float).reshape(-1)
        if points.shape[0] != values.shape[0]:
            raise InputError(
                f"{values.shape[0]} function values for {points.shape[0]} points"
            )
        self.points = points
        self.values = values
        self._fit()
        return self

    @abstractmethod
    def _fit(self) -> None:
        """Build the method's artifacts from self.points and self.values."""
        pass

    @abstractmethod
    def extend(self, queries) -> np.ndarray:
        """Extended function values at each query, shape (q,)."""
        pass

    def _queries(self, queries) -> np.ndarray:
        if self.points is None:
            raise InputError(f"{type(self).__name__} used before fit()")
        return np.atleast_2d(np.asarray(queries, dtype=float))
