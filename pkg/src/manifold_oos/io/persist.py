"""
Model files and numeric tables.

Models are YAML documents with the keys format_version, ambient_dim,
embed_dim, epsilon, curvature_c, points and images; floats are written
with 17 significant digits so every finite double reads back bit-exactly.
Points, queries and results are comma-separated tables with an optional
single header line.
"""

import csv
import logging
import math
import sys
from pathlib import Path
from typing import Any, Dict, Iterable, List, Optional, Sequence, TextIO, Union

import numpy as np
import yaml

from manifold_oos.core.models import ExtensionResult, TrainingModel
from manifold_oos.exceptions import (
    DimensionMismatch,
    ExtensionError,
    IoFailure,
    ParseFailure,
    SerializationRejected,
    ValidationFailure,
)

logger = logging.getLogger(__name__)

FORMAT_VERSION = 1
MODEL_KEYS = (
    "format_version",
    "ambient_dim",
    "embed_dim",
    "epsilon",
    "curvature_c",
    "points",
    "images",
)
RESULT_COLUMNS = ("score", "neighbor_count", "epsilon_used")

PathLike = Union[str, Path]


def format_float(value: float) -> str:
    """
    Decimal text of a float with 17 significant digits.

    The mantissa always carries a decimal point and the exponent a sign,
    so YAML resolves the text back to a float.
    """
    value = float(value)
    if math.isnan(value):
        return "nan"
    if math.isinf(value):
        return "inf" if value > 0 else "-inf"
    text = format(value, ".17g")
    mantissa, _, exponent = text.partition("e")
    if "." not in mantissa:
        mantissa += ".0"
    if exponent:
        sign = exponent[0] if exponent[0] in "+-" else "+"
        return f"{mantissa}e{sign}{exponent.lstrip('+-')}"
    return mantissa


class _ModelDumper(yaml.SafeDumper):
    pass


def _represent_float(dumper: yaml.SafeDumper, value: float):
    return dumper.represent_scalar("tag:yaml.org,2002:float", format_float(value))


_ModelDumper.add_representer(float, _represent_float)


def _rows(array: np.ndarray) -> List[List[float]]:
    return [[float(v) for v in row] for row in array]


def model_to_document(model: TrainingModel) -> Dict[str, Any]:
    """
    Plain mapping of a model's file fields.

    Raises:
        SerializationRejected: If a value is not finite
    """
    for name, values in (("points", model.points), ("images", model.images)):
        if not np.all(np.isfinite(values)):
            raise SerializationRejected(f"Model {name} contain non-finite values")
    for name in ("epsilon", "curvature_c"):
        if not math.isfinite(getattr(model, name)):
            raise SerializationRejected(f"Model {name} is not finite")

    return {
        "format_version": FORMAT_VERSION,
        "ambient_dim": model.ambient_dim,
        "embed_dim": model.embed_dim,
        "epsilon": float(model.epsilon),
        "curvature_c": float(model.curvature_c),
        "points": _rows(model.points),
        "images": _rows(model.images),
    }


def save_model(model: TrainingModel, destination: PathLike) -> None:
    """
    Write a model document.

    Raises:
        SerializationRejected: If the model holds non-finite values
        IoFailure: If the file cannot be written
    """
    document = model_to_document(model)
    text = yaml.dump(
        document,
        Dumper=_ModelDumper,
        sort_keys=False,
        default_flow_style=None,
        width=float("inf"),
        allow_unicode=True,
    )
    try:
        Path(destination).write_text(text, encoding="utf-8")
    except OSError as e:
        raise IoFailure(str(destination), e) from e
    logger.info(f"Saved model with {model.size} points to {destination}")


def _matrix(document: Dict[str, Any], key: str) -> np.ndarray:
    rows = document[key]
    if not isinstance(rows, list) or not rows:
        raise ParseFailure(f"'{key}' must be a nonempty list of rows")
    for i, row in enumerate(rows, start=1):
        if not isinstance(row, list):
            raise ParseFailure(f"'{key}' row is not a list", row=i)
        for j, value in enumerate(row, start=1):
            if isinstance(value, bool) or not isinstance(value, (int, float)):
                raise ParseFailure(f"'{key}' holds a non-numeric value {value!r}", row=i, column=j)
    widths = {len(row) for row in rows}
    if len(widths) != 1:
        raise ValidationFailure(f"'{key}' rows have differing lengths {sorted(widths)}")
    return np.asarray(rows, dtype=float)


def document_to_model(document: Any) -> TrainingModel:
    """
    Validated model from a parsed document.

    Raises:
        ParseFailure: If keys are missing or values have the wrong type
        ValidationFailure: If a model invariant does not hold
    """
    if not isinstance(document, dict):
        raise ParseFailure("Model document is not a mapping")
    missing = [key for key in MODEL_KEYS if key not in document]
    if missing:
        raise ParseFailure(f"Model document is missing keys: {', '.join(missing)}")
    if document["format_version"] != FORMAT_VERSION:
        raise ValidationFailure(f"Unsupported format_version {document['format_version']!r}")

    points = _matrix(document, "points")
    images = _matrix(document, "images")
    try:
        ambient_dim = int(document["ambient_dim"])
        embed_dim = int(document["embed_dim"])
        epsilon = float(document["epsilon"])
        curvature_c = float(document["curvature_c"])
    except (TypeError, ValueError) as e:
        raise ParseFailure(f"Malformed scalar field: {e}") from e

    if points.shape[1] != ambient_dim:
        raise ValidationFailure(
            f"points have {points.shape[1]} columns, ambient_dim is {ambient_dim}"
        )
    if images.shape[1] != embed_dim:
        raise ValidationFailure(f"images have {images.shape[1]} columns, embed_dim is {embed_dim}")

    return TrainingModel(points=points, images=images, epsilon=epsilon, curvature_c=curvature_c)


def load_model(source: PathLike) -> TrainingModel:
    """
    Read and validate a model document.

    Raises:
        IoFailure: If the file cannot be read
        ParseFailure: If the document is malformed
        ValidationFailure: If a model invariant does not hold
    """
    try:
        text = Path(source).read_text(encoding="utf-8")
    except UnicodeDecodeError as e:
        raise ParseFailure(f"Model document {source} is not UTF-8 text at byte {e.start}") from e
    except OSError as e:
        raise IoFailure(str(source), e) from e

    try:
        document = yaml.safe_load(text)
    except yaml.YAMLError as e:
        mark = getattr(e, "problem_mark", None)
        raise ParseFailure(
            f"Malformed model document {source}",
            row=mark.line + 1 if mark else None,
            column=mark.column + 1 if mark else None,
        ) from e

    model = document_to_model(document)
    logger.info(f"Loaded model from {source}: p={model.size} n={model.ambient_dim} d={model.embed_dim}")
    return model


def _is_header(fields: Sequence[str]) -> bool:
    for value in fields:
        try:
            float(value)
        except ValueError:
            return True
    return False


def read_points_table(source: PathLike, expected_dim: Optional[int] = None) -> np.ndarray:
    """
    Read a comma-separated numeric table.

    Args:
        source: Table path; the first line may be a header
        expected_dim: Required number of columns, inferred from the first
            data row when None

    Returns:
        (rows, dim) array; (0, expected_dim or 0) for a table without data

    Raises:
        IoFailure: If the file cannot be read
        ParseFailure: If a field is not a number, with its row and column
        DimensionMismatch: If a row has the wrong number of fields
    """
    try:
        with open(source, "r", newline="", encoding="utf-8") as f:
            lines = list(csv.reader(f))
    except UnicodeDecodeError as e:
        raise ParseFailure(f"Table {source} is not UTF-8 text") from e
    except OSError as e:
        raise IoFailure(str(source), e) from e

    rows: List[List[float]] = []
    dim = expected_dim
    for line_no, fields in enumerate(lines, start=1):
        fields = [value.strip() for value in fields]
        if not fields or fields == [""]:
            continue
        if line_no == 1 and _is_header(fields):
            continue
        if dim is None:
            dim = len(fields)
        if len(fields) != dim:
            raise DimensionMismatch(line_no, dim, len(fields))
        row = []
        for col, value in enumerate(fields, start=1):
            try:
                row.append(float(value))
            except ValueError:
                raise ParseFailure(f"Not a number: {value!r}", row=line_no, column=col) from None
        rows.append(row)

    if not rows:
        return np.empty((0, dim or 0))
    return np.asarray(rows, dtype=float)


def _cell(value: Any) -> str:
    if value is None:
        return ""
    if isinstance(value, (bool, np.bool_)):
        return "true" if value else "false"
    if isinstance(value, (float, np.floating)):
        return format(float(value), ".17g")
    return str(value)


def write_table(header: Sequence[str], rows: Iterable[Sequence[Any]], destination: PathLike) -> None:
    """
    Write a comma-separated table with one header line.

    Floats are written with 17 significant digits, booleans as true/false
    and None as an empty field. A destination of "-" writes to stdout.

    Raises:
        IoFailure: If the file cannot be written
    """

    def emit(f: TextIO) -> None:
        writer = csv.writer(f, lineterminator="\n")
        writer.writerow(header)
        for row in rows:
            writer.writerow([_cell(v) for v in row])

    if str(destination) == "-":
        emit(sys.stdout)
        return
    try:
        with open(destination, "w", newline="", encoding="utf-8") as f:
            emit(f)
    except OSError as e:
        raise IoFailure(str(destination), e) from e


def write_points_table(
    points: np.ndarray, destination: PathLike, header: Optional[Sequence[str]] = None
) -> None:
    """Write an array as a table, with columns x_1..x_n unless a header is given."""
    points = np.asarray(points, dtype=float)
    if points.ndim == 1:
        points = points.reshape(-1, 1)
    header = header or [f"x_{i + 1}" for i in range(points.shape[1])]
    write_table(header, points.tolist(), destination)


def results_header(embed_dim: int, extra: Sequence[str] = ()) -> List[str]:
    return ["query_id", *[f"y_{i + 1}" for i in range(embed_dim)], *RESULT_COLUMNS, *extra]


def write_results(
    results: Sequence[Union[ExtensionResult, ExtensionError]],
    destination: PathLike,
    embed_dim: Optional[int] = None,
    extra_columns: Optional[Dict[str, Sequence[Any]]] = None,
) -> None:
    """
    Write extension results, one row per query in order.

    A slot holding an ExtensionError is written with empty result fields.

    Args:
        results: Batch results in query order
        destination: Output path
        embed_dim: Embedding width; inferred from the first result if None
        extra_columns: Additional columns appended after epsilon_used,
            one value per result

    Raises:
        IoFailure: If the file cannot be written
    """
    if embed_dim is None:
        embed_dim = next(
            (len(r.embedding) for r in results if isinstance(r, ExtensionResult)), 0
        )
    extra_columns = extra_columns or {}
    for name, values in extra_columns.items():
        if len(values) != len(results):
            raise ValueError(f"Column {name} has {len(values)} values for {len(results)} results")

    def row(i: int, result) -> List[Any]:
        if isinstance(result, ExtensionResult):
            fields = [
                *result.embedding.tolist(),
                result.score,
                result.neighbor_count,
                result.epsilon_used,
            ]
        else:
            fields = [None] * (embed_dim + len(RESULT_COLUMNS))
        return [i, *fields, *(values[i] for values in extra_columns.values())]

    write_table(
        results_header(embed_dim, tuple(extra_columns)),
        (row(i, r) for i, r in enumerate(results)),
        destination,
    )
    logger.debug(f"Wrote {len(results)} results to {destination}")
