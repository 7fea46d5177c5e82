"""
Synthetic benchmarks: the sphere experiment, the anomaly scenario and the
method comparison.
"""

from manifold_oos.bench.anomaly import (
    AnomalyDataset,
    anomaly_score,
    make_anomaly_dataset,
    run_anomaly_scenario,
)
from manifold_oos.bench.compare import (
    ComparisonReport,
    ComparisonRow,
    PbeExtender,
    run_comparison,
    run_sphere_comparison,
)
from manifold_oos.bench.sphere import (
    BenchReport,
    SphereDataset,
    empirical_lipschitz,
    make_sphere_dataset,
    run_sphere_bench,
    sphere_map,
)

__all__ = [
    "AnomalyDataset",
    "BenchReport",
    "ComparisonReport",
    "ComparisonRow",
    "PbeExtender",
    "SphereDataset",
    "anomaly_score",
    "empirical_lipschitz",
    "make_anomaly_dataset",
    "make_sphere_dataset",
    "run_anomaly_scenario",
    "run_comparison",
    "run_sphere_bench",
    "run_sphere_comparison",
    "sphere_map",
]
