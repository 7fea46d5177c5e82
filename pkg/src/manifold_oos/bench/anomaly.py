"""
Synthetic anomaly-detection scenario on the sphere model.

The parameter grid of the sphere benchmark is lifted into R^3 twice: one
copy as the sheet z = 0 with the unit-sphere images, and one as the sheet
z = 2 * displacement with the same images shifted by SHEET_OFFSET along
the first axis. Inlier queries are sampled on the lower sheet. Outlier
queries are sampled the same way and raised by `displacement`, halfway
between the sheets, so their neighborhoods mix points of both sheets whose
images lie far apart and the Mahalanobis residual of the fit is large.

The neighborhood radius is max(2.5 grid spacings, 1.2 * displacement):
outliers always reach both sheets, and once 2 * displacement exceeds the
radius no inlier neighborhood reaches the upper sheet. The radius is never
widened (no doubling); a query with no training point within it scores
+inf.
"""

import logging
from dataclasses import dataclass
from typing import List, Optional, Tuple

import numpy as np

from manifold_oos.bench.sphere import (
    default_epsilon,
    parameter_grid,
    sample_queries,
    sphere_map,
)
from manifold_oos.core.extension import extend_batch
from manifold_oos.core.models import ExtensionResult, TrainingModel
from manifold_oos.core.weights import SchemeKind, WeightScheme
from manifold_oos.exceptions import EmptyNeighborhoodError, OutOfRangeError

logger = logging.getLogger(__name__)

DEFAULT_GRID = 30
SCENARIO_MAX_DOUBLINGS = 0
SHEET_OFFSET = 100.0
OUTLIER_REACH = 1.2


def lift(params: np.ndarray, height: float = 0.0) -> np.ndarray:
    """Place (phi, theta) pairs in R^3 at the given height above the sheet."""
    params = np.asarray(params, dtype=float)
    return np.column_stack([params, np.full(params.shape[0], height)])


def scenario_epsilon(grid_per_axis: int, displacement: float) -> float:
    """Neighborhood radius of the scenario model."""
    return max(default_epsilon(grid_per_axis), OUTLIER_REACH * displacement)


def anomaly_score(result) -> float:
    """
    Score of one batch slot.

    An empty neighborhood means the query is farther than epsilon from
    every training point and scores +inf. Other failures score NaN.
    """
    if isinstance(result, ExtensionResult):
        return result.score
    if isinstance(result, EmptyNeighborhoodError):
        return float("inf")
    return float("nan")


@dataclass(eq=False)
class AnomalyDataset:
    """
    Training model and labelled queries of the anomaly scenario.

    Attributes:
        model: Two-sheet sphere model, ambient_dim 3, embed_dim 3; the
            first half of the points is the lower sheet
        queries: (num_inliers + num_outliers, 3) queries, inliers first
        labels: True where the query is an injected outlier
    """

    model: TrainingModel
    queries: np.ndarray
    labels: np.ndarray

    @property
    def num_outliers(self) -> int:
        return int(self.labels.sum())


def make_anomaly_dataset(
    num_inliers: int,
    num_outliers: int,
    displacement: float,
    seed: int,
    grid_per_axis: int = DEFAULT_GRID,
    curvature_c: float = 1.0,
) -> AnomalyDataset:
    """
    Build the two-sheet sphere model with inlier and displaced outlier queries.

    Raises:
        OutOfRangeError: If a count is negative or displacement < 0
    """
    if num_inliers < 0 or num_outliers < 0:
        raise OutOfRangeError("query counts must be nonnegative")
    if displacement < 0:
        raise OutOfRangeError(f"displacement must be >= 0, got {displacement}")

    params = parameter_grid(grid_per_axis)
    images = sphere_map(params[:, 0], params[:, 1])
    shifted = images + np.array([SHEET_OFFSET, 0.0, 0.0])
    model = TrainingModel(
        points=np.vstack([lift(params), lift(params, height=2.0 * displacement)]),
        images=np.vstack([images, shifted]),
        epsilon=scenario_epsilon(grid_per_axis, displacement),
        curvature_c=curvature_c,
    )

    rng = np.random.default_rng(seed)
    inliers = lift(sample_queries(num_inliers, rng))
    outliers = lift(sample_queries(num_outliers, rng), height=displacement)
    labels = np.concatenate(
        [np.zeros(num_inliers, dtype=bool), np.ones(num_outliers, dtype=bool)]
    )
    return AnomalyDataset(model=model, queries=np.vstack([inliers, outliers]), labels=labels)


def run_anomaly_scenario(
    num_inliers: int,
    num_outliers: int,
    displacement: float,
    seed: int,
    scheme: Optional[WeightScheme] = None,
    grid_per_axis: int = DEFAULT_GRID,
    workers: int = 1,
) -> List[Tuple[float, bool]]:
    """
    Score inliers and injected outliers of the two-sheet sphere model.

    Args:
        num_inliers: Queries sampled on the lower sheet
        num_outliers: Queries displaced halfway between the sheets
        displacement: Distance of the outliers from either sheet
        seed: Query seed
        scheme: Weight scheme, PerPointTangent by default. A shared
            covariance spans both sheets and absorbs their offset.
        grid_per_axis: Training grid size per axis
        workers: Thread pool size

    Returns:
        List of (score, is_outlier), inliers first
    """
    scheme = scheme or WeightScheme(SchemeKind.PER_POINT_TANGENT)
    data = make_anomaly_dataset(
        num_inliers,
        num_outliers,
        displacement,
        seed,
        grid_per_axis=grid_per_axis,
        curvature_c=scheme.curvature_c,
    )
    results = extend_batch(
        data.queries,
        data.model,
        scheme,
        workers=workers,
        max_doublings=SCENARIO_MAX_DOUBLINGS,
    )
    scores = [anomaly_score(r) for r in results]

    inlier_scores = np.asarray([s for s, out in zip(scores, data.labels) if not out])
    if inlier_scores.size:
        logger.info(
            f"Anomaly scenario displacement={displacement}: "
            f"median inlier score={np.median(inlier_scores):.4g}"
        )
    return [(float(s), bool(out)) for s, out in zip(scores, data.labels)]
