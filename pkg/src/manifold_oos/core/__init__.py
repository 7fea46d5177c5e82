"""
PCA-based out-of-sample extension core.
"""

from manifold_oos.core.extension import extend, extend_batch, find_neighbors
from manifold_oos.core.gls import (
    gls_extend,
    mahalanobis_score,
    squared_mahalanobis_score,
)
from manifold_oos.core.models import (
    ExtensionResult,
    Neighborhood,
    PrecisionBlock,
    TrainingModel,
)
from manifold_oos.core.weights import (
    SchemeKind,
    WeightScheme,
    build_precisions,
    distance_precisions,
    local_covariance,
    point_covariance,
    tangent_basis,
    tangent_precisions,
)

__all__ = [
    "ExtensionResult",
    "Neighborhood",
    "PrecisionBlock",
    "SchemeKind",
    "TrainingModel",
    "WeightScheme",
    "build_precisions",
    "distance_precisions",
    "extend",
    "extend_batch",
    "find_neighbors",
    "gls_extend",
    "local_covariance",
    "mahalanobis_score",
    "point_covariance",
    "squared_mahalanobis_score",
    "tangent_basis",
    "tangent_precisions",
]
