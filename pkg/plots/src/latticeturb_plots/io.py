"""CSV intake with schema checks that name what is missing."""

import csv
from pathlib import Path

import numpy as np

__all__ = ["SchemaError", "read_columns", "require"]


class SchemaError(ValueError):
    """Input file does not match the documented schema."""


def read_columns(path) -> dict[str, np.ndarray]:
    """Read a headed CSV into float arrays (strings stay strings).

    An empty body is valid and yields zero-length columns.
    """
    path = Path(path)
    if not path.is_file():
        raise SchemaError(f"input file {path} does not exist")
    with open(path, newline="") as handle:
        reader = csv.reader(handle)
        try:
            header = next(reader)
        except StopIteration:
            raise SchemaError(f"input file {path} has no header row") from None
        rows = list(reader)
    for row in rows:
        if len(row) != len(header):
            raise SchemaError(f"input file {path} has a ragged row")
    out: dict[str, np.ndarray] = {}
    for i, name in enumerate(header):
        cells = [row[i] for row in rows]
        try:
            out[name] = np.asarray([float(c) for c in cells])
        except ValueError:
            out[name] = np.asarray(cells, dtype=object)
    return out


def require(columns: dict, names, path) -> None:
    for name in names:
        if name not in columns:
            raise SchemaError(
                f"input file {path} has no column {name!r}; found {sorted(columns)}"
            )
