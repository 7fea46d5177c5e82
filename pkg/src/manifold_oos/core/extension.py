"""
PCA-based out-of-sample extension of a single query and of batches.

The extension of a query x is the GLS estimate over the images of its
epsilon-ball neighbors, weighted by the precision blocks of the selected
scheme. Its Mahalanobis residual is the abnormality score of x.
"""

import logging
from concurrent.futures import ThreadPoolExecutor
from typing import List, Union

import numpy as np

from manifold_oos.core.gls import (
    gls_extend,
    squared_mahalanobis_score,
)
from manifold_oos.core.models import ExtensionResult, Neighborhood, TrainingModel
from manifold_oos.core.weights import WeightScheme, build_precisions
from manifold_oos.exceptions import (
    EmptyNeighborhoodError,
    ExtensionError,
    OutOfRangeError,
)

logger = logging.getLogger(__name__)

DEFAULT_MAX_DOUBLINGS = 4


def _as_query(x, model: TrainingModel) -> np.ndarray:
    x = np.asarray(x, dtype=float).reshape(-1)
    if x.shape[0] != model.ambient_dim:
        raise OutOfRangeError(
            f"Query has length {x.shape[0]}, model ambient_dim is {model.ambient_dim}"
        )
    if not np.all(np.isfinite(x)):
        raise OutOfRangeError("Query contains non-finite values")
    return x


def find_neighbors(x, model: TrainingModel, epsilon: float) -> Neighborhood:
    """
    Training points within epsilon of x.

    Args:
        x: Query of length ambient_dim
        model: Training model
        epsilon: Ball radius (inclusive)

    Returns:
        Neighborhood ordered by ascending distance, ties by ascending index

    Raises:
        EmptyNeighborhoodError: If no training point lies within epsilon
    """
    if not epsilon > 0:
        raise OutOfRangeError(f"epsilon must be positive, got {epsilon}")
    x = _as_query(x, model)

    indices, distances = model.index.radius_query(x, epsilon)
    if indices.size == 0:
        raise EmptyNeighborhoodError(epsilon)
    return Neighborhood(indices=indices, distances=distances, query=x, epsilon=epsilon)


def extend(
    x,
    model: TrainingModel,
    scheme: WeightScheme,
    max_doublings: int = DEFAULT_MAX_DOUBLINGS,
) -> ExtensionResult:
    """
    Extend the embedding to a query point.

    A query that coincides with a training point returns that point's image
    with score 0. Otherwise the neighborhood radius starts at model.epsilon
    and doubles (at most max_doublings times) while fewer than embed_dim
    neighbors are found; whatever nonempty neighborhood remains is used.

    Args:
        x: Query of length ambient_dim
        model: Training model
        scheme: Weight scheme
        max_doublings: Cap on radius doublings

    Returns:
        ExtensionResult with embedding, score and diagnostics

    Raises:
        EmptyNeighborhoodError: If no neighbor exists after all doublings
        SingularBlockError: If a tangent block is not positive definite
        SingularSystemError: If the GLS system cannot be solved
    """
    x = _as_query(x, model)

    nearest_idx, nearest_dist = model.index.nearest(x, k=1)
    if nearest_dist[0] == 0.0:
        j = int(nearest_idx[0])
        logger.debug(f"Query coincides with training point {j}")
        return ExtensionResult(
            embedding=np.array(model.images[j]),
            score=0.0,
            neighbor_count=1,
            epsilon_used=model.epsilon,
            squared_score=0.0,
            exact=True,
        )

    epsilon = model.epsilon
    nb = None
    for attempt in range(max_doublings + 1):
        try:
            nb = find_neighbors(x, model, epsilon)
        except EmptyNeighborhoodError:
            nb = None
        if nb is not None and nb.size >= model.embed_dim:
            break
        if attempt < max_doublings:
            found = 0 if nb is None else nb.size
            logger.debug(
                f"Only {found} neighbors within epsilon={epsilon:.6g}, doubling radius"
            )
            epsilon *= 2.0

    if nb is None:
        raise EmptyNeighborhoodError(epsilon)
    if nb.size < model.embed_dim:
        logger.warning(
            f"Proceeding with {nb.size} < {model.embed_dim} neighbors "
            f"at epsilon={epsilon:.6g}"
        )

    images = model.images[nb.indices]
    blocks = build_precisions(nb, model, scheme)
    y_hat = gls_extend(blocks, images)
    squared = squared_mahalanobis_score(y_hat, blocks, images)

    return ExtensionResult(
        embedding=y_hat,
        score=float(np.sqrt(squared)),
        neighbor_count=nb.size,
        epsilon_used=epsilon,
        squared_score=squared,
    )


def extend_batch(
    queries,
    model: TrainingModel,
    scheme: WeightScheme,
    workers: int = 1,
    max_doublings: int = DEFAULT_MAX_DOUBLINGS,
) -> List[Union[ExtensionResult, ExtensionError]]:
    """
    Extend many queries, isolating per-query failures.

    Results come back in input order regardless of completion order. A
    query whose extension raises an ExtensionError yields that exception
    in its slot instead of aborting the batch.

    Args:
        queries: (q, n) array of query points
        model: Training model
        scheme: Weight scheme
        workers: Thread pool size; 1 runs inline
        max_doublings: Cap on radius doublings per query

    Returns:
        List of ExtensionResult or ExtensionError, one per query
    """
    queries = np.asarray(queries, dtype=float)
    if queries.ndim == 1:
        queries = queries.reshape(-1, model.ambient_dim)

    def run(x: np.ndarray) -> Union[ExtensionResult, ExtensionError]:
        try:
            return extend(x, model, scheme, max_doublings=max_doublings)
        except ExtensionError as e:
            logger.warning(f"Extension failed: {e}")
            return e

    if workers <= 1 or len(queries) <= 1:
        results = [run(x) for x in queries]
    else:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(run, queries))

    failures = sum(isinstance(r, ExtensionError) for r in results)
    logger.info(
        f"Extended {len(results) - failures}/{len(results)} queries "
        f"with scheme={scheme.kind.value}"
    )
    return results
