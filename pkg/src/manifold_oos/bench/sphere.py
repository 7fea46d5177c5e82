"""
Sphere benchmark: extension of the spherical-coordinate map.

Training points are an equally spaced grid on the parameter square
[0, pi] x [0, pi]; their images lie on the unit sphere. Random queries are
extended with each weight scheme and compared against the analytic map,
together with the empirical delta-net radius and Lipschitz constant that
bound the extension error by 3 K delta.
"""

import logging
from dataclasses import dataclass
from typing import Any, Dict, List, Optional

import numpy as np
from scipy.spatial.distance import pdist

from manifold_oos.core.extension import extend_batch
from manifold_oos.core.models import ExtensionResult, TrainingModel
from manifold_oos.core.weights import SchemeKind, WeightScheme
from manifold_oos.exceptions import OutOfRangeError
from manifold_oos.neighbors.index import SpatialIndex, covering_radius

logger = logging.getLogger(__name__)

# Queries stay away from the poles, where theta is not identifiable
QUERY_PHI_RANGE = (0.05 * np.pi, 0.95 * np.pi)
EPSILON_GRID_FACTOR = 2.5
FINE_GRID_FACTOR = 4
BOUND_FACTOR = 3.0


def sphere_map(phi, theta) -> np.ndarray:
    """
    Map spherical coordinates to the unit sphere.

    Accepts scalars or equally shaped arrays; returns shape (..., 3).

    Raises:
        OutOfRangeError: If an angle lies outside [0, pi]
    """
    phi = np.asarray(phi, dtype=float)
    theta = np.asarray(theta, dtype=float)
    for name, values in (("phi", phi), ("theta", theta)):
        if np.any(values < 0.0) or np.any(values > np.pi):
            raise OutOfRangeError(f"{name} must lie in [0, pi]")
    return np.stack(
        [np.sin(phi) * np.cos(theta), np.sin(phi) * np.sin(theta), np.cos(phi)],
        axis=-1,
    )


def parameter_grid(per_axis: int) -> np.ndarray:
    """Equally spaced (phi, theta) grid on [0, pi]^2, shape (per_axis^2, 2)."""
    axis = np.linspace(0.0, np.pi, per_axis)
    phi, theta = np.meshgrid(axis, axis, indexing="ij")
    return np.column_stack([phi.ravel(), theta.ravel()])


def grid_spacing(grid_per_axis: int) -> float:
    return np.pi / (grid_per_axis - 1)


def default_epsilon(grid_per_axis: int) -> float:
    """Neighborhood radius large enough for 3 neighbors off the poles."""
    return EPSILON_GRID_FACTOR * grid_spacing(grid_per_axis)


@dataclass(eq=False)
class SphereDataset:
    """
    Training grid and random queries of the sphere benchmark.

    Attributes:
        grid_per_axis: Grid points per parameter axis
        training_params: (p, 2) grid of (phi, theta) pairs
        images: (p, 3) unit-sphere images of the grid
        queries: (q, 2) random (phi, theta) queries
        query_images: (q, 3) analytic images of the queries
        seed: Seed of the query generator
    """

    grid_per_axis: int
    training_params: np.ndarray
    images: np.ndarray
    queries: np.ndarray
    query_images: np.ndarray
    seed: int

    @property
    def training_points(self) -> np.ndarray:
        """Ambient training points: the parameters themselves."""
        return self.training_params

    @property
    def training_size(self) -> int:
        return self.training_params.shape[0]

    def to_model(
        self, epsilon: Optional[float] = None, curvature_c: float = 1.0
    ) -> TrainingModel:
        return TrainingModel(
            points=self.training_params,
            images=self.images,
            epsilon=epsilon or default_epsilon(self.grid_per_axis),
            curvature_c=curvature_c,
        )


def sample_queries(num_queries: int, rng: np.random.Generator) -> np.ndarray:
    """Uniform (phi, theta) queries with phi kept off the poles."""
    phi = rng.uniform(QUERY_PHI_RANGE[0], QUERY_PHI_RANGE[1], size=num_queries)
    theta = rng.uniform(0.0, np.pi, size=num_queries)
    return np.column_stack([phi, theta])


def make_sphere_dataset(grid_per_axis: int, num_queries: int, seed: int) -> SphereDataset:
    """
    Build the training grid and seeded random queries.

    Raises:
        OutOfRangeError: If grid_per_axis < 2 or num_queries < 1
    """
    if grid_per_axis < 2:
        raise OutOfRangeError(f"grid_per_axis must be >= 2, got {grid_per_axis}")
    if num_queries < 1:
        raise OutOfRangeError(f"num_queries must be >= 1, got {num_queries}")

    params = parameter_grid(grid_per_axis)
    queries = sample_queries(num_queries, np.random.default_rng(seed))
    return SphereDataset(
        grid_per_axis=grid_per_axis,
        training_params=params,
        images=sphere_map(params[:, 0], params[:, 1]),
        queries=queries,
        query_images=sphere_map(queries[:, 0], queries[:, 1]),
        seed=seed,
    )


def fine_grid(grid_per_axis: int, factor: int = FINE_GRID_FACTOR) -> np.ndarray:
    """Parameter grid `factor` times finer per axis than the training grid."""
    return parameter_grid(factor * (grid_per_axis - 1) + 1)


def empirical_lipschitz(
    params: np.ndarray,
    images: np.ndarray,
    queries: Optional[np.ndarray] = None,
    query_images: Optional[np.ndarray] = None,
) -> float:
    """
    Largest ratio |psi(a) - psi(b)| / |a - b| over sampled pairs.

    Pairs are all training pairs plus each query with its nearest training
    point; coincident pairs are skipped.
    """
    ambient = pdist(params)
    embedded = pdist(images)
    keep = ambient > 0
    ratios = [embedded[keep] / ambient[keep]]

    if queries is not None and query_images is not None and len(queries):
        nearest, distances = [], []
        index = SpatialIndex(params)
        for q in queries:
            idx, dist = index.nearest(q, k=1)
            nearest.append(idx[0])
            distances.append(dist[0])
        distances = np.asarray(distances)
        gaps = np.linalg.norm(query_images - images[np.asarray(nearest)], axis=1)
        keep = distances > 0
        ratios.append(gaps[keep] / distances[keep])

    values = np.concatenate(ratios)
    return float(values.max()) if values.size else 0.0


@dataclass(eq=False)
class BenchReport:
    """
    Outcome of one sphere benchmark run.

    Attributes:
        scheme: Weight scheme kind
        training_size: Number of training points
        mean_error: Mean extension error over successful queries
        max_error: Largest extension error
        per_query_errors: Error per query, NaN for failed queries
        delta: Empirical covering radius of the training grid
        lipschitz_K: Empirical Lipschitz constant of the map
        bound_violations: Queries whose error exceeds 3 K delta
        failures: Queries whose extension raised
        epsilon: Neighborhood radius of the model
        seed: Query seed
    """

    scheme: SchemeKind
    training_size: int
    mean_error: float
    max_error: float
    per_query_errors: List[float]
    delta: float
    lipschitz_K: float
    bound_violations: int
    failures: int = 0
    epsilon: float = 0.0
    seed: int = 0

    @property
    def bound(self) -> float:
        return BOUND_FACTOR * self.lipschitz_K * self.delta

    def to_dict(self) -> Dict[str, Any]:
        """Flat record of the summary fields."""
        return {
            "scheme": self.scheme.value,
            "training_size": self.training_size,
            "mean_error": self.mean_error,
            "max_error": self.max_error,
            "delta": self.delta,
            "lipschitz_K": self.lipschitz_K,
            "bound_violations": self.bound_violations,
            "failures": self.failures,
            "epsilon": self.epsilon,
            "seed": self.seed,
        }


def run_sphere_bench(
    grid_per_axis: int,
    num_queries: int,
    scheme: WeightScheme,
    seed: int,
    epsilon: Optional[float] = None,
    workers: int = 1,
    dataset: Optional[SphereDataset] = None,
) -> BenchReport:
    """
    Extend random queries of the sphere map and measure the error.

    Extension failures are counted in the report, not raised.
    """
    data = dataset or make_sphere_dataset(grid_per_axis, num_queries, seed)
    model = data.to_model(epsilon=epsilon, curvature_c=scheme.curvature_c)

    results = extend_batch(data.queries, model, scheme, workers=workers)
    errors = np.full(len(results), np.nan)
    for i, result in enumerate(results):
        if isinstance(result, ExtensionResult):
            errors[i] = float(np.linalg.norm(result.embedding - data.query_images[i]))

    delta = covering_radius(data.training_params, fine_grid(data.grid_per_axis))
    lipschitz = empirical_lipschitz(
        data.training_params, data.images, data.queries, data.query_images
    )
    ok = ~np.isnan(errors)
    bound = BOUND_FACTOR * lipschitz * delta

    report = BenchReport(
        scheme=scheme.kind,
        training_size=data.training_size,
        mean_error=float(np.mean(errors[ok])) if ok.any() else float("nan"),
        max_error=float(np.max(errors[ok])) if ok.any() else float("nan"),
        per_query_errors=errors.tolist(),
        delta=delta,
        lipschitz_K=lipschitz,
        bound_violations=int(np.sum(errors[ok] > bound)),
        failures=int(np.sum(~ok)),
        epsilon=model.epsilon,
        seed=data.seed,
    )
    logger.info(
        f"Sphere bench grid={data.grid_per_axis} scheme={scheme.kind.value}: "
        f"mean_error={report.mean_error:.3e} violations={report.bound_violations}"
    )
    return report
