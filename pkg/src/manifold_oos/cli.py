"""
Command-line interface for manifold-oos.

Usage:
    manifold-oos fit --points P.csv --images I.csv --out model.yaml
    manifold-oos extend --model model.yaml --queries Q.csv --out results.csv
    manifold-oos score --model model.yaml --queries Q.csv --threshold 5 --out scores.csv
    manifold-oos bench-sphere --grid 30 --num-queries 100 --seed 0 --out table.csv
    manifold-oos compare --model model.yaml --function f.csv --queries Q.csv --out cmp.csv

Exit status is 0 on success, 2 on an input error and 3 on a numerical
failure.

Environment Variables:
    MANIFOLD_OOS_EPSILON, MANIFOLD_OOS_CURVATURE_C, MANIFOLD_OOS_SCHEME,
    MANIFOLD_OOS_SEED, MANIFOLD_OOS_GRID, MANIFOLD_OOS_NUM_QUERIES,
    MANIFOLD_OOS_ERR, MANIFOLD_OOS_THRESHOLD, MANIFOLD_OOS_WORKERS,
    MANIFOLD_OOS_MAX_DOUBLINGS, MANIFOLD_OOS_LOG_LEVEL
"""

import argparse
import logging
import sys
from pathlib import Path
from typing import Any, Callable, Dict, List, Optional, Sequence

import numpy as np

from manifold_oos import __version__
from manifold_oos.bench.compare import median_nearest_distance, run_comparison
from manifold_oos.bench.sphere import make_sphere_dataset, run_sphere_bench
from manifold_oos.config.loader import ConfigLoader
from manifold_oos.core.extension import extend_batch
from manifold_oos.core.models import ExtensionResult, TrainingModel
from manifold_oos.core.weights import SchemeKind, WeightScheme
from manifold_oos.exceptions import (
    EmptyNeighborhoodError,
    ExtensionError,
    InputError,
    NumericalError,
)
from manifold_oos.io.persist import (
    load_model,
    read_points_table,
    save_model,
    write_points_table,
    write_results,
    write_table,
)
from manifold_oos.neighbors.index import nearest_neighbor_distances

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_INPUT = 2
EXIT_NUMERICAL = 3

LOG_FORMAT = "%(asctime)s - %(name)s - %(levelname)s - %(message)s"
FIT_EPSILON_FACTOR = 2.5
DEFAULT_CURVATURE_C = 1.0
BENCH_HEADER = (
    "scheme",
    "training_size",
    "mean_error",
    "max_error",
    "delta",
    "lipschitz_K",
    "bound_violations",
    "failures",
    "epsilon",
    "seed",
)


def _configure_logging(level: str) -> None:
    logging.basicConfig(
        level=getattr(logging, str(level).upper(), logging.INFO),
        format=LOG_FORMAT,
        stream=sys.stderr,
        force=True,
    )


def _load_config(args: argparse.Namespace) -> Dict[str, Any]:
    cli_values = {key: getattr(args, key, None) for key in ConfigLoader.KEY_TYPES}
    return ConfigLoader(config_path=args.config).load(cli_values)


def _curvature(config: Dict[str, Any]) -> float:
    return config.get("curvature_c") or DEFAULT_CURVATURE_C


def _model_with_overrides(args: argparse.Namespace, config: Dict[str, Any]) -> TrainingModel:
    model = load_model(args.model)
    return model.with_overrides(
        epsilon=config.get("epsilon"), curvature_c=config.get("curvature_c")
    )


def _error_column(results: Sequence[Any]) -> List[Optional[str]]:
    return [str(r) if isinstance(r, ExtensionError) else None for r in results]


def cmd_fit(args: argparse.Namespace, config: Dict[str, Any]) -> int:
    """Package a points table and an images table as a model file."""
    points = read_points_table(args.points)
    images = read_points_table(args.images)
    epsilon = config.get("epsilon") or FIT_EPSILON_FACTOR * median_nearest_distance(points)
    model = TrainingModel(
        points=points,
        images=images,
        epsilon=epsilon,
        curvature_c=_curvature(config),
    )
    save_model(model, args.out)

    spacing = nearest_neighbor_distances(model.points)
    delta = float(spacing.max()) if spacing.size else 0.0
    print(f"p={model.size} n={model.ambient_dim} d={model.embed_dim}")
    print(f"epsilon={model.epsilon:.6g} covering_radius={delta:.6g}")
    return EXIT_OK


def _extend_queries(args: argparse.Namespace, config: Dict[str, Any]):
    model = _model_with_overrides(args, config)
    queries = read_points_table(args.queries, expected_dim=model.ambient_dim)
    results = extend_batch(
        queries,
        model,
        WeightScheme(SchemeKind.from_string(config["scheme"]), model.curvature_c),
        workers=config["workers"],
        max_doublings=config["max_doublings"],
    )
    return model, results


def _exit_for(results: Sequence[Any]) -> int:
    if results and not any(isinstance(r, ExtensionResult) for r in results):
        logger.error("Every query failed to extend")
        return EXIT_NUMERICAL
    return EXIT_OK


def cmd_extend(args: argparse.Namespace, config: Dict[str, Any]) -> int:
    """Extend every query of a table, one result row per query."""
    model, results = _extend_queries(args, config)
    write_results(
        results,
        args.out,
        embed_dim=model.embed_dim,
        extra_columns={"error": _error_column(results)},
    )
    return _exit_for(results)


def cmd_score(args: argparse.Namespace, config: Dict[str, Any]) -> int:
    """Extend every query and flag those scoring above the threshold."""
    model, results = _extend_queries(args, config)
    threshold = config["threshold"]

    anomalous: List[Optional[bool]] = []
    for r in results:
        if isinstance(r, ExtensionResult):
            anomalous.append(r.score > threshold)
        elif isinstance(r, EmptyNeighborhoodError):
            anomalous.append(True)
        else:
            anomalous.append(None)

    write_results(
        results,
        args.out,
        embed_dim=model.embed_dim,
        extra_columns={"anomalous": anomalous, "error": _error_column(results)},
    )
    flagged = sum(1 for a in anomalous if a)
    print(f"flagged {flagged} of {len(results)} queries above threshold {threshold:.6g}")
    return _exit_for(results)


def _emit_sphere_data(directory: Path, dataset, reports) -> None:
    directory.mkdir(parents=True, exist_ok=True)
    write_points_table(dataset.training_params, directory / "points.csv", header=["phi", "theta"])
    write_points_table(dataset.images, directory / "images.csv", header=["x", "y", "z"])
    write_points_table(dataset.queries, directory / "queries.csv", header=["phi", "theta"])
    write_points_table(dataset.query_images, directory / "truth.csv", header=["x", "y", "z"])
    header = ["query_id", *[r.scheme.value for r in reports]]
    rows = [
        [i, *[r.per_query_errors[i] for r in reports]]
        for i in range(len(dataset.queries))
    ]
    write_table(header, rows, directory / "errors.csv")
    logger.info(f"Wrote sphere data tables to {directory}")


def cmd_bench_sphere(args: argparse.Namespace, config: Dict[str, Any]) -> int:
    """Run the sphere benchmark with every weight scheme."""
    dataset = make_sphere_dataset(config["grid"], config["num_queries"], config["seed"])
    reports = [
        run_sphere_bench(
            config["grid"],
            config["num_queries"],
            WeightScheme(kind, _curvature(config)),
            config["seed"],
            epsilon=config.get("epsilon"),
            workers=config["workers"],
            dataset=dataset,
        )
        for kind in SchemeKind
    ]
    write_table(
        BENCH_HEADER,
        ([r.to_dict()[key] for key in BENCH_HEADER] for r in reports),
        args.out,
    )
    if args.emit_data:
        _emit_sphere_data(Path(args.emit_data), dataset, reports)
    return EXIT_OK


def cmd_compare(args: argparse.Namespace, config: Dict[str, Any]) -> int:
    """Extend a function with the four methods over a training-size sweep."""
    model = load_model(args.model)
    f = read_points_table(args.function, expected_dim=1)
    queries = read_points_table(args.queries, expected_dim=model.ambient_dim)
    truth = read_points_table(args.truth, expected_dim=1) if args.truth else None
    if f.shape[0] != model.size:
        raise InputError(f"{f.shape[0]} function values for {model.size} training points")

    report = run_comparison(
        model.points,
        f,
        queries,
        truth=truth,
        sizes=args.sizes,
        err=config["err"],
        seed=config["seed"],
        workers=config["workers"],
    )
    rows = [
        [row.method, row.training_size, None if np.isnan(row.mean_error) else row.mean_error]
        for row in report.rows
    ]
    write_table(("method", "training_size", "mean_error"), rows, args.out)
    return EXIT_OK


def _add_common(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--config", default=None, help="Path to a YAML configuration file")
    parser.add_argument(
        "--log-level",
        dest="log_level",
        default=None,
        choices=["DEBUG", "INFO", "WARNING", "ERROR"],
        help="Logging level (default: INFO)",
    )


def _add_model_overrides(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--epsilon", type=float, default=None, help="Neighborhood radius override")
    parser.add_argument(
        "--curvature-c",
        dest="curvature_c",
        type=float,
        default=None,
        help="Curvature bound of the tangent weights",
    )


def _add_scheme(parser: argparse.ArgumentParser) -> None:
    parser.add_argument(
        "--scheme",
        default=None,
        choices=[kind.value for kind in SchemeKind],
        help="Weight scheme (default: tangent)",
    )
    parser.add_argument("--workers", type=int, default=None, help="Worker threads (default: 4)")
    parser.add_argument(
        "--max-doublings",
        dest="max_doublings",
        type=int,
        default=None,
        help="Radius doublings when a neighborhood is too small (default: 4)",
    )


def build_parser() -> argparse.ArgumentParser:
    """Argument parser with one subparser per workflow."""
    parser = argparse.ArgumentParser(
        prog="manifold-oos",
        description="PCA-based out-of-sample extension of dimensionality-reduction maps",
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    fit = sub.add_parser("fit", help="Build a model file from points and images tables")
    fit.add_argument("--points", required=True, help="Ambient training points table")
    fit.add_argument("--images", required=True, help="Embedded images table")
    fit.add_argument("--out", required=True, help="Model file to write")
    _add_model_overrides(fit)
    _add_common(fit)
    fit.set_defaults(handler=cmd_fit)

    for name, handler, help_text in (
        ("extend", cmd_extend, "Extend the embedding to query points"),
        ("score", cmd_score, "Score query points and flag anomalies"),
    ):
        cmd = sub.add_parser(name, help=help_text)
        cmd.add_argument("--model", required=True, help="Model file")
        cmd.add_argument("--queries", required=True, help="Query points table")
        cmd.add_argument("--out", required=True, help="Results table to write ('-' for stdout)")
        _add_scheme(cmd)
        _add_model_overrides(cmd)
        _add_common(cmd)
        cmd.set_defaults(handler=handler)
        if name == "score":
            cmd.add_argument("--threshold", type=float, default=None, help="Anomaly threshold")

    bench = sub.add_parser("bench-sphere", help="Run the sphere benchmark for every scheme")
    bench.add_argument("--grid", type=int, default=None, help="Grid points per axis (default: 30)")
    bench.add_argument(
        "--num-queries", dest="num_queries", type=int, default=None, help="Random queries (default: 100)"
    )
    bench.add_argument("--seed", type=int, default=None, help="Query seed (default: 0)")
    bench.add_argument("--out", default="-", help="Report table ('-' for stdout)")
    bench.add_argument(
        "--emit-data", dest="emit_data", default=None, help="Directory for the dataset and error tables"
    )
    bench.add_argument("--workers", type=int, default=None, help="Worker threads (default: 4)")
    _add_model_overrides(bench)
    _add_common(bench)
    bench.set_defaults(handler=cmd_bench_sphere)

    compare = sub.add_parser("compare", help="Compare extension methods on a function")
    compare.add_argument("--model", required=True, help="Model file with the training points")
    compare.add_argument("--function", required=True, help="Function values at training points")
    compare.add_argument("--queries", required=True, help="Query points table")
    compare.add_argument("--truth", default=None, help="True function values at the queries")
    compare.add_argument("--out", default="-", help="Comparison table ('-' for stdout)")
    compare.add_argument("--err", type=float, default=None, help="Baseline stopping error (default: 1e-3)")
    compare.add_argument("--seed", type=int, default=None, help="Subset and sketch seed (default: 0)")
    compare.add_argument(
        "--sizes", type=int, nargs="+", default=None, help="Training subset sizes (default: 100 400 900)"
    )
    compare.add_argument("--workers", type=int, default=None, help="Worker threads (default: 4)")
    _add_common(compare)
    compare.set_defaults(handler=cmd_compare)

    return parser


def main(argv: Optional[Sequence[str]] = None) -> int:
    """Main entry point."""
    parser = build_parser()
    args = parser.parse_args(argv)
    handler: Callable[[argparse.Namespace, Dict[str, Any]], int] = args.handler

    try:
        config = _load_config(args)
        _configure_logging(config["log_level"])
        return handler(args, config)
    except InputError as e:
        logger.error(str(e))
        print(f"error: {e}", file=sys.stderr)
        return EXIT_INPUT
    except NumericalError as e:
        logger.error(str(e))
        print(f"error: {e}", file=sys.stderr)
        return EXIT_NUMERICAL


if __name__ == "__main__":
    sys.exit(main())
