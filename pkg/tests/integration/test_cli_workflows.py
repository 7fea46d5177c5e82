"""
Integration tests for the command-line workflows.

Each test drives cli.main() end to end over real files: fitting a model,
extending and scoring queries, and checking exit codes and determinism.
"""

from pathlib import Path

import numpy as np
import pytest

from manifold_oos import cli
from manifold_oos.bench.anomaly import make_anomaly_dataset, run_anomaly_scenario
from manifold_oos.bench.sphere import make_sphere_dataset
from manifold_oos.io.persist import read_points_table, save_model, write_points_table


def _read_rows(path: Path):
    lines = path.read_text().splitlines()
    header = lines[0].split(",")
    return [dict(zip(header, line.split(","))) for line in lines[1:]]


@pytest.fixture
def sphere_files(tmp_path: Path):
    """Points, images, queries and truth tables of a 20 x 20 sphere grid."""
    data = make_sphere_dataset(20, 15, seed=4)
    write_points_table(data.training_params, tmp_path / "points.csv", header=["phi", "theta"])
    write_points_table(data.images, tmp_path / "images.csv", header=["x", "y", "z"])
    write_points_table(data.queries, tmp_path / "queries.csv", header=["phi", "theta"])
    return tmp_path, data


@pytest.mark.integration
class TestCliWorkflows:
    """fit, extend and score over real files."""

    def test_fit_then_extend(self, sphere_files, clean_env):
        """
        Given: Sphere points and images tables
        When: fit and then extend run
        Then: Every query is extended close to its analytic image
        """
        # Arrange
        tmp_path, data = sphere_files
        model_path = tmp_path / "model.yaml"
        out = tmp_path / "results.csv"

        # Act
        fit_code = cli.main(
            ["fit", "--points", str(tmp_path / "points.csv"),
             "--images", str(tmp_path / "images.csv"), "--out", str(model_path)]
        )
        extend_code = cli.main(
            ["extend", "--model", str(model_path), "--queries", str(tmp_path / "queries.csv"),
             "--out", str(out), "--scheme", "tangent-per-point"]
        )

        # Assert
        assert fit_code == cli.EXIT_OK
        assert extend_code == cli.EXIT_OK
        rows = _read_rows(out)
        assert len(rows) == 15
        embedding = np.array([[float(r["y_1"]), float(r["y_2"]), float(r["y_3"])] for r in rows])
        errors = np.linalg.norm(embedding - data.query_images, axis=1)
        assert errors.max() < 0.1
        assert all(r["error"] == "" for r in rows)

    def test_extend_is_byte_identical_across_runs(self, sphere_files, clean_env):
        """
        Given: One model and query table
        When: extend runs twice with a thread pool
        Then: Both outputs are byte-identical
        """
        tmp_path, data = sphere_files
        model_path = tmp_path / "model.yaml"
        save_model(data.to_model(), model_path)
        outputs = []

        for run in range(2):
            out = tmp_path / f"run{run}.csv"
            code = cli.main(
                ["extend", "--model", str(model_path), "--queries",
                 str(tmp_path / "queries.csv"), "--out", str(out), "--workers", "4"]
            )
            assert code == cli.EXIT_OK
            outputs.append(out.read_bytes())

        assert outputs[0] == outputs[1]

    def test_all_queries_failing_exits_three(self, sphere_files, clean_env):
        """
        Given: Queries far from every training point
        When: extend runs without radius doubling
        Then: The exit status is 3 and every row carries an error
        """
        tmp_path, data = sphere_files
        model_path = tmp_path / "model.yaml"
        save_model(data.to_model(), model_path)
        write_points_table(np.full((3, 2), 50.0), tmp_path / "far.csv")
        out = tmp_path / "out.csv"

        code = cli.main(
            ["extend", "--model", str(model_path), "--queries", str(tmp_path / "far.csv"),
             "--out", str(out), "--max-doublings", "0"]
        )

        assert code == cli.EXIT_NUMERICAL
        assert all(r["error"] != "" for r in _read_rows(out))

    def test_partial_failure_still_succeeds(self, sphere_files, clean_env):
        tmp_path, data = sphere_files
        model_path = tmp_path / "model.yaml"
        save_model(data.to_model(), model_path)
        write_points_table(np.array([[1.0, 1.0], [50.0, 50.0]]), tmp_path / "mixed.csv")
        out = tmp_path / "out.csv"

        code = cli.main(
            ["extend", "--model", str(model_path), "--queries", str(tmp_path / "mixed.csv"),
             "--out", str(out), "--max-doublings", "0"]
        )

        rows = _read_rows(out)
        assert code == cli.EXIT_OK
        assert rows[0]["error"] == "" and rows[1]["error"] != ""

    def test_wrong_query_width_exits_two(self, sphere_files, clean_env):
        tmp_path, data = sphere_files
        model_path = tmp_path / "model.yaml"
        save_model(data.to_model(), model_path)
        write_points_table(np.ones((2, 3)), tmp_path / "wide.csv")

        code = cli.main(
            ["extend", "--model", str(model_path), "--queries", str(tmp_path / "wide.csv"),
             "--out", "-"]
        )

        assert code == cli.EXIT_INPUT

    def test_non_utf8_inputs_exit_two(self, tmp_path: Path, clean_env):
        """
        Given: A points table and a model file each holding a 0xff byte
        When: fit and extend read them
        Then: Both exit with the input error status
        """
        # Arrange
        bad_table = tmp_path / "bad.csv"
        bad_table.write_bytes(b"0.1,0.2\n\xff,0.3\n")
        bad_model = tmp_path / "bad.yaml"
        bad_model.write_bytes(b"epsilon: \xff\n")
        write_points_table(np.zeros((1, 2)), tmp_path / "queries.csv")

        # Act
        fit_code = cli.main(
            ["fit", "--points", str(bad_table), "--images", str(bad_table),
             "--out", str(tmp_path / "model.yaml")]
        )
        extend_code = cli.main(
            ["extend", "--model", str(bad_model), "--queries", str(tmp_path / "queries.csv"),
             "--out", "-"]
        )

        # Assert
        assert fit_code == cli.EXIT_INPUT
        assert extend_code == cli.EXIT_INPUT

    def test_score_flags_exactly_the_injected_outliers(self, tmp_path: Path, capsys, clean_env):
        """
        Given: The anomaly scenario with 50 inliers and 5 outliers at displacement 0.5
        When: score runs with threshold 10x the median inlier score
        Then: Exactly the outliers are flagged
        """
        # Arrange
        data = make_anomaly_dataset(50, 5, 0.5, seed=0)
        save_model(data.model, tmp_path / "model.yaml")
        write_points_table(data.queries, tmp_path / "queries.csv")
        scores = run_anomaly_scenario(50, 5, 0.5, seed=0)
        threshold = 10 * float(np.median([s for s, out in scores if not out]))
        out = tmp_path / "scores.csv"

        # Act
        code = cli.main(
            ["score", "--model", str(tmp_path / "model.yaml"),
             "--queries", str(tmp_path / "queries.csv"), "--out", str(out),
             "--threshold", repr(threshold), "--scheme", "tangent-per-point",
             "--max-doublings", "0"]
        )

        # Assert
        assert code == cli.EXIT_OK
        flagged = [r["anomalous"] == "true" for r in _read_rows(out)]
        assert flagged == data.labels.tolist()
        assert all(r["score"] not in ("", "inf") for r in _read_rows(out))
        assert "flagged 5 of 55 queries" in capsys.readouterr().out

    def test_bench_to_stdout(self, capsys, clean_env):
        code = cli.main(["bench-sphere", "--grid", "10", "--num-queries", "5", "--seed", "2"])

        lines = capsys.readouterr().out.splitlines()
        assert code == cli.EXIT_OK
        assert lines[0].startswith("scheme,training_size,mean_error")
        assert len(lines) == 4
        assert all(line.split(",")[6] == "0" for line in lines[1:])

    def test_fit_reads_back_tables(self, sphere_files, clean_env):
        tmp_path, data = sphere_files

        np.testing.assert_array_equal(
            read_points_table(tmp_path / "points.csv"), data.training_params
        )
