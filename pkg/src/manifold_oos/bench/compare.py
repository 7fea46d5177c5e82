"""
Comparison of the PCA-based extension with the baseline methods.

All four methods extend the same scalar function from nested training
subsets to a common query set. Subsets are prefixes of one seeded
permutation, so larger subsets contain the smaller ones.
"""

import logging
from dataclasses import dataclass, field
from typing import Dict, List, Optional, Sequence

import numpy as np
from manifold_oos.baselines.base import FunctionExtender
from manifold_oos.baselines.mse import MseExtender
from manifold_oos.baselines.nystrom import NystromExtender
from manifold_oos.baselines.pyramid import PyramidExtender
from manifold_oos.bench.sphere import make_sphere_dataset
from manifold_oos.core.extension import extend_batch
from manifold_oos.core.models import ExtensionResult, TrainingModel
from manifold_oos.core.weights import SchemeKind, WeightScheme
from manifold_oos.exceptions import InputError, NumericalError
from manifold_oos.neighbors.index import as_points, nearest_neighbor_distances

logger = logging.getLogger(__name__)

DEFAULT_SIZES = (100, 400, 900)
PBE_EPSILON_FACTOR = 2.5
PYRAMID_MIN_ERR = 1e-2


class PbeExtender(FunctionExtender):
    """
    PCA-based extension of a scalar function.

    The function values become one-dimensional images of a training model.
    Epsilon defaults to 2.5 times the median nearest-neighbor distance.
    """

    name = "pbe"

    def __init__(
        self,
        scheme: Optional[WeightScheme] = None,
        epsilon: Optional[float] = None,
        workers: int = 1,
    ):
        super().__init__()
        self.scheme = scheme or WeightScheme(SchemeKind.SHARED_TANGENT)
        self.epsilon = epsilon
        self.workers = workers
        self.model: Optional[TrainingModel] = None

    def _fit(self) -> None:
        epsilon = self.epsilon or PBE_EPSILON_FACTOR * median_nearest_distance(self.points)
        self.model = TrainingModel(
            points=self.points,
            images=self.values.reshape(-1, 1),
            epsilon=epsilon,
            curvature_c=self.scheme.curvature_c,
        )

    def extend(self, queries) -> np.ndarray:
        queries = self._queries(queries)
        results = extend_batch(queries, self.model, self.scheme, workers=self.workers)
        return np.array(
            [r.embedding[0] if isinstance(r, ExtensionResult) else np.nan for r in results]
        )


def median_nearest_distance(points) -> float:
    """Median distance from each point to its nearest distinct neighbor."""
    nearest = nearest_neighbor_distances(points)
    positive = nearest[nearest > 0]
    return float(np.median(positive)) if positive.size else 1.0


def default_methods(err: float, seed: int, workers: int = 1) -> List[FunctionExtender]:
    """The four compared methods, PBE first."""
    return [
        PbeExtender(workers=workers),
        NystromExtender(),
        MseExtender(err=err, seed=seed),
        PyramidExtender(err=max(err, PYRAMID_MIN_ERR)),
    ]


@dataclass(frozen=True)
class ComparisonRow:
    method: str
    training_size: int
    mean_error: float


@dataclass(eq=False)
class ComparisonReport:
    """
    Per-method errors over the training-size sweep.

    Attributes:
        rows: One row per (method, training size); NaN error when the
            method failed or no ground truth was given
        values: Extended values at the queries per method, from the
            largest training subset
        seed: Seed of the subset permutation and of randomized methods
    """

    rows: List[ComparisonRow] = field(default_factory=list)
    values: Dict[str, np.ndarray] = field(default_factory=dict)
    seed: int = 0

    @property
    def methods(self) -> List[str]:
        return list(dict.fromkeys(row.method for row in self.rows))

    def errors_for(self, method: str) -> List[float]:
        """Mean errors of one method in increasing training size."""
        rows = sorted(
            (r for r in self.rows if r.method == method), key=lambda r: r.training_size
        )
        return [r.mean_error for r in rows]


def _sweep_sizes(p: int, sizes: Optional[Sequence[int]]) -> List[int]:
    requested = sizes if sizes is not None else DEFAULT_SIZES
    kept = sorted({int(s) for s in requested if 1 <= s <= p})
    if not kept:
        kept = [p]
    return kept


def run_comparison(
    points,
    f,
    queries,
    truth=None,
    sizes: Optional[Sequence[int]] = None,
    err: float = 1e-3,
    seed: int = 0,
    methods: Optional[Sequence[FunctionExtender]] = None,
    workers: int = 1,
) -> ComparisonReport:
    """
    Extend f with every method over nested training subsets.

    Args:
        points: (p, n) training points
        f: Function values at the training points
        queries: (q, n) query points
        truth: Optional true function values at the queries
        sizes: Training subset sizes; sizes above p are dropped
        err: Stopping parameter of the multiscale baselines
        seed: Seed of the subset permutation and randomized methods
        methods: Extenders to compare; the four default methods otherwise
        workers: Thread pool size for the PBE batch

    Returns:
        ComparisonReport with one row per method and size

    Raises:
        InputError: If f or truth do not match points or queries
    """
    points = as_points(points)
    f = np.asarray(f, dtype=float).reshape(-1)
    queries = as_points(queries)
    if f.shape[0] != points.shape[0]:
        raise InputError(f"{f.shape[0]} function values for {points.shape[0]} points")
    if truth is not None:
        truth = np.asarray(truth, dtype=float).reshape(-1)
        if truth.shape[0] != queries.shape[0]:
            raise InputError(
                f"{truth.shape[0]} truth values for {queries.shape[0]} queries"
            )

    methods = list(methods) if methods is not None else default_methods(err, seed, workers)
    order = np.random.default_rng(seed).permutation(points.shape[0])
    sweep = _sweep_sizes(points.shape[0], sizes)
    report = ComparisonReport(seed=seed)

    for size in sweep:
        subset = np.sort(order[:size])
        for method in methods:
            try:
                values = method.fit(points[subset], f[subset]).extend(queries)
            except NumericalError as e:
                logger.warning(f"{method.name} failed at training size {size}: {e}")
                values = np.full(queries.shape[0], np.nan)

            error = float("nan")
            if truth is not None:
                error = float(np.mean(np.abs(values - truth)))
            report.rows.append(ComparisonRow(method.name, size, error))
            if size == sweep[-1]:
                report.values[method.name] = values
            logger.debug(f"{method.name} size={size} mean_error={error:.4g}")

    logger.info(f"Compared {len(methods)} methods over training sizes {sweep}")
    return report


def run_sphere_comparison(
    grid_per_axis: int = 30,
    num_queries: int = 100,
    coordinate: int = 2,
    sizes: Optional[Sequence[int]] = None,
    err: float = 1e-3,
    seed: int = 0,
    workers: int = 1,
) -> ComparisonReport:
    """Comparison on one coordinate of the sphere map, with ground truth."""
    data = make_sphere_dataset(grid_per_axis, num_queries, seed)
    return run_comparison(
        data.training_params,
        data.images[:, coordinate],
        data.queries,
        truth=data.query_images[:, coordinate],
        sizes=sizes,
        err=err,
        seed=seed,
        workers=workers,
    )
