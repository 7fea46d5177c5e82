"""
Integration tests for configuration loading.

Tests verify that a YAML file, the environment and CLI flags reach the
command handlers with the documented precedence.
"""

from pathlib import Path

import numpy as np
import pytest
import yaml

from manifold_oos import cli
from manifold_oos.core.weights import SchemeKind
from manifold_oos.io.persist import load_model, save_model, write_points_table


@pytest.mark.integration
class TestConfigLoading:
    """Integration tests for config loading from multiple sources."""

    def test_yaml_file_drives_the_handler(self, tmp_path: Path, mocker, plane_model, clean_env):
        """
        Given: A YAML file selecting the per-point scheme and 2 workers
        When: extend runs with --config
        Then: The batch is extended with those settings
        """
        # Arrange
        config_file = tmp_path / "manifold.yaml"
        config_file.write_text(yaml.dump({"scheme": "tangent-per-point", "workers": 2}))
        save_model(plane_model, tmp_path / "model.yaml")
        write_points_table(np.array([[0.5, 0.5]]), tmp_path / "q.csv")
        spy = mocker.spy(cli, "extend_batch")

        # Act
        code = cli.main(
            ["extend", "--config", str(config_file), "--model", str(tmp_path / "model.yaml"),
             "--queries", str(tmp_path / "q.csv"), "--out", str(tmp_path / "out.csv")]
        )

        # Assert
        assert code == cli.EXIT_OK
        assert spy.call_args.args[2].kind is SchemeKind.PER_POINT_TANGENT
        assert spy.call_args.kwargs["workers"] == 2

    def test_cli_beats_env_beats_yaml(
        self, tmp_path: Path, monkeypatch: pytest.MonkeyPatch, clean_env
    ):
        """
        Given: epsilon in YAML, curvature_c in YAML and the environment, and an epsilon flag
        When: fit runs
        Then: The flag wins for epsilon and the environment wins for curvature_c
        """
        # Arrange
        config_file = tmp_path / "manifold.yaml"
        config_file.write_text(yaml.dump({"epsilon": 0.7, "curvature_c": 5.0}))
        monkeypatch.setenv("MANIFOLD_OOS_CURVATURE_C", "0.25")
        points = np.arange(10.0).reshape(5, 2)
        write_points_table(points, tmp_path / "p.csv")
        write_points_table(points[:, :1], tmp_path / "i.csv")

        # Act
        code = cli.main(
            ["fit", "--config", str(config_file), "--points", str(tmp_path / "p.csv"),
             "--images", str(tmp_path / "i.csv"), "--out", str(tmp_path / "m.yaml"),
             "--epsilon", "1.5"]
        )

        # Assert
        assert code == cli.EXIT_OK
        model = load_model(tmp_path / "m.yaml")
        assert model.epsilon == 1.5
        assert model.curvature_c == 0.25

    def test_invalid_yaml_value_is_an_input_error(self, tmp_path: Path, capsys, clean_env):
        config_file = tmp_path / "manifold.yaml"
        config_file.write_text("grid: many\n")

        code = cli.main(["bench-sphere", "--config", str(config_file)])

        assert code == cli.EXIT_INPUT
        assert "grid" in capsys.readouterr().err
