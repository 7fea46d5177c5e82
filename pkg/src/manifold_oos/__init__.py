"""
PCA-based out-of-sample extension for dimensionality-reduction maps.

A training model pairs ambient points with their precomputed embedded
images. New points are embedded by a generalized least squares fit over
the images of their epsilon-ball neighbors, and the Mahalanobis residual
of that fit scores how well a point agrees with the training manifold.

Example usage:
    from manifold_oos import TrainingModel, WeightScheme, SchemeKind, extend
    from manifold_oos import load_model, save_model
    from manifold_oos.exceptions import ExtensionError, EmptyNeighborhoodError
"""

from manifold_oos.core.extension import extend, extend_batch
from manifold_oos.core.models import ExtensionResult, TrainingModel
from manifold_oos.core.weights import SchemeKind, WeightScheme
from manifold_oos.config.loader import ConfigLoader
from manifold_oos.io.persist import load_model, save_model
from manifold_oos.exceptions import (
    ExtensionError,
    NumericalError,
    InputError,
    ConfigurationError,
    EmptyNeighborhoodError,
    NoConvergenceError,
    ValidationFailure,
)

__version__ = "0.1.0"

__all__ = [
    # Core
    "TrainingModel",
    "ExtensionResult",
    "SchemeKind",
    "WeightScheme",
    "extend",
    "extend_batch",
    "ConfigLoader",
    "load_model",
    "save_model",
    # Exceptions
    "ExtensionError",
    "NumericalError",
    "InputError",
    "ConfigurationError",
    "EmptyNeighborhoodError",
    "NoConvergenceError",
    "ValidationFailure",
]
