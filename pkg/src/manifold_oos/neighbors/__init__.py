"""
Neighbor search module for manifold-oos.
"""

from manifold_oos.neighbors.index import (
    SpatialIndex,
    as_points,
    build_index,
    covering_radius,
    nearest_neighbor_distances,
)

__all__ = [
    "SpatialIndex",
    "as_points",
    "build_index",
    "covering_radius",
    "nearest_neighbor_distances",
]
