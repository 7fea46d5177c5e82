"""
Model files and numeric tables.
"""

from manifold_oos.io.persist import (
    load_model,
    read_points_table,
    save_model,
    write_points_table,
    write_results,
    write_table,
)

__all__ = [
    "load_model",
    "read_points_table",
    "save_model",
    "write_points_table",
    "write_results",
    "write_table",
]
