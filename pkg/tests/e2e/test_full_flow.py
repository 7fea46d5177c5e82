"""
End-to-End tests for the complete command-line flow.

Tests drive the installed entry point the way a user would: generate the
sphere data, package it as a model, extend and score queries, and compare
the extension methods. Nothing is mocked.

E2E Test Coverage:
- E2E-001: bench-sphere emits data, fit and extend reproduce its errors
- E2E-002: score over the emitted queries
- E2E-003: compare over a coordinate function with ground truth
"""

from pathlib import Path

import numpy as np
import pytest

from manifold_oos import cli
from manifold_oos.io.persist import read_points_table, write_points_table

GRID = 15
NUM_QUERIES = 12


def _read_rows(path: Path):
    lines = path.read_text().splitlines()
    header = lines[0].split(",")
    return [dict(zip(header, line.split(","))) for line in lines[1:]]


@pytest.fixture
def emitted(tmp_path: Path, clean_env) -> Path:
    """Sphere data and reports written by bench-sphere."""
    data_dir = tmp_path / "data"
    code = cli.main(
        ["bench-sphere", "--grid", str(GRID), "--num-queries", str(NUM_QUERIES),
         "--seed", "5", "--out", str(tmp_path / "bench.csv"), "--emit-data", str(data_dir)]
    )
    assert code == cli.EXIT_OK
    return data_dir


@pytest.mark.e2e
@pytest.mark.slow
class TestFullFlow:
    """E2E tests for the full bench, fit, extend, score and compare flow."""

    def test_bench_fit_extend_reproduces_bench_errors(self, emitted: Path, tmp_path: Path):
        """
        Given the tables emitted by bench-sphere
        When fit and extend run on them with the distance scheme
        Then the extension errors equal the benchmark's per-query errors

        E2E-001: Tests the data files are a faithful copy of the benchmark run.
        """
        # Arrange
        model_path = tmp_path / "model.yaml"
        out = tmp_path / "extended.csv"

        # Act
        assert cli.main(
            ["fit", "--points", str(emitted / "points.csv"),
             "--images", str(emitted / "images.csv"), "--out", str(model_path)]
        ) == cli.EXIT_OK
        assert cli.main(
            ["extend", "--model", str(model_path), "--queries", str(emitted / "queries.csv"),
             "--out", str(out), "--scheme", "distance"]
        ) == cli.EXIT_OK

        # Assert
        rows = _read_rows(out)
        embedding = np.array([[float(r[f"y_{i}"]) for i in (1, 2, 3)] for r in rows])
        truth = read_points_table(emitted / "truth.csv")
        errors = np.linalg.norm(embedding - truth, axis=1)
        bench_errors = [float(r["distance"]) for r in _read_rows(emitted / "errors.csv")]
        np.testing.assert_allclose(errors, bench_errors, rtol=1e-12)

    def test_score_emitted_queries(self, emitted: Path, tmp_path: Path, capsys):
        """
        Given the emitted sphere model and queries
        When score runs with a generous threshold
        Then no query is flagged

        E2E-002: Tests on-manifold queries are not anomalous.
        """
        model_path = tmp_path / "model.yaml"
        cli.main(
            ["fit", "--points", str(emitted / "points.csv"),
             "--images", str(emitted / "images.csv"), "--out", str(model_path)]
        )
        capsys.readouterr()

        code = cli.main(
            ["score", "--model", str(model_path), "--queries", str(emitted / "queries.csv"),
             "--out", str(tmp_path / "scores.csv"), "--threshold", "1e6"]
        )

        assert code == cli.EXIT_OK
        assert f"flagged 0 of {NUM_QUERIES} queries" in capsys.readouterr().out
        assert all(r["anomalous"] == "false" for r in _read_rows(tmp_path / "scores.csv"))

    def test_compare_methods_on_coordinate_function(self, emitted: Path, tmp_path: Path):
        """
        Given the z coordinate of the emitted images and truth tables
        When compare runs over two training sizes
        Then every method reports a row per size and PBE's error shrinks with size

        E2E-003: Tests the comparison table of the four extension methods.
        """
        # Arrange
        model_path = tmp_path / "model.yaml"
        cli.main(
            ["fit", "--points", str(emitted / "points.csv"),
             "--images", str(emitted / "images.csv"), "--out", str(model_path)]
        )
        images = read_points_table(emitted / "images.csv")
        truth = read_points_table(emitted / "truth.csv")
        write_points_table(images[:, 2], tmp_path / "f.csv", header=["f"])
        write_points_table(truth[:, 2], tmp_path / "truth_f.csv", header=["f"])
        out = tmp_path / "compare.csv"

        # Act
        code = cli.main(
            ["compare", "--model", str(model_path), "--function", str(tmp_path / "f.csv"),
             "--queries", str(emitted / "queries.csv"), "--truth", str(tmp_path / "truth_f.csv"),
             "--sizes", "100", str(GRID * GRID), "--err", "1e-2", "--out", str(out)]
        )

        # Assert
        assert code == cli.EXIT_OK
        rows = _read_rows(out)
        assert {r["method"] for r in rows} == {"pbe", "nystrom", "mse", "laplacian-pyramid"}
        assert len(rows) == 8
        pbe = {int(r["training_size"]): float(r["mean_error"]) for r in rows if r["method"] == "pbe"}
        assert pbe[GRID * GRID] < pbe[100]
