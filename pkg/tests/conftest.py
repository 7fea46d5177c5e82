"""
Shared pytest fixtures for all test modules.
"""

import sys
from pathlib import Path
from typing import Any, Dict

import numpy as np
import pytest
import yaml

# Add src to path for imports
src_path = Path(__file__).parent.parent / "src"
if str(src_path) not in sys.path:
    sys.path.insert(0, str(src_path))

from manifold_oos.bench.sphere import SphereDataset, make_sphere_dataset
from manifold_oos.core.models import TrainingModel
from manifold_oos.core.weights import SchemeKind, WeightScheme

from tests.fixtures.models import make_plane_model, make_sphere_model


@pytest.fixture
def rng() -> np.random.Generator:
    """Seeded generator shared by randomized tests."""
    return np.random.default_rng(12345)


@pytest.fixture
def plane_model() -> TrainingModel:
    """Linear map of a 2-D grid into R^3."""
    return make_plane_model()


@pytest.fixture(scope="session")
def sphere_dataset() -> SphereDataset:
    """The 900-point sphere grid with 100 seeded queries."""
    return make_sphere_dataset(30, 100, seed=0)


@pytest.fixture(scope="session")
def small_sphere_dataset() -> SphereDataset:
    """A 15 x 15 sphere grid with 20 seeded queries."""
    return make_sphere_dataset(15, 20, seed=1)


@pytest.fixture(scope="session")
def sphere_model(sphere_dataset: SphereDataset) -> TrainingModel:
    """Training model of the 900-point sphere grid."""
    return sphere_dataset.to_model()


@pytest.fixture
def small_sphere_model() -> TrainingModel:
    return make_sphere_model(15)


@pytest.fixture(params=list(SchemeKind), ids=lambda kind: kind.value)
def scheme(request) -> WeightScheme:
    """Every weight scheme with c = 1."""
    return WeightScheme(request.param)


@pytest.fixture
def sample_config() -> Dict[str, Any]:
    """Sample configuration dictionary."""
    return {
        "scheme": "tangent-per-point",
        "curvature_c": 2.0,
        "seed": 7,
        "grid": 20,
        "err": 1e-2,
    }


@pytest.fixture
def temp_config_file(tmp_path: Path, sample_config: Dict[str, Any]) -> Path:
    """Create temporary YAML config file."""
    config_file = tmp_path / "test_config.yaml"
    config_file.write_text(yaml.dump(sample_config))
    return config_file


@pytest.fixture
def clean_env(monkeypatch: pytest.MonkeyPatch) -> None:
    """Remove every MANIFOLD_OOS_* variable for the test."""
    import os

    for key in list(os.environ):
        if key.startswith("MANIFOLD_OOS_"):
            monkeypatch.delenv(key, raising=False)
