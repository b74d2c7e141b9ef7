"""Data-matrix container and CSV input/output.

CSV conventions: first row holds column names; an empty field or "NA"
marks a missing value; decimal separator is always the dot regardless of
locale. Matrix outputs carry variable names on both axes and full
precision (17 significant digits).
"""

from __future__ import annotations

import csv
import io
from dataclasses import dataclass, field

import numpy as np

from .errors import InputError


@dataclass
class DataMatrix:
    """n x d numeric matrix with NaN as the explicit missing marker."""

    values: np.ndarray
    columns: list[str] = field(default_factory=list)

    def __post_init__(self):
        self.values = np.asarray(self.values, dtype=float)
        if self.values.ndim != 2:
            raise InputError("DataMatrix requires a 2-d array")
        if not self.columns:
            self.columns = [f"V{j + 1}" for j in range(self.values.shape[1])]
        if len(self.columns) != self.values.shape[1]:
            raise InputError("column-name count does not match data width")

    @property
    def n(self) -> int:
        return self.values.shape[0]

    @property
    def d(self) -> int:
        return self.values.shape[1]

    def column(self, j: int) -> np.ndarray:
        return self.values[:, j]

    @property
    def missing_mask(self) -> np.ndarray:
        return np.isnan(self.values)


_MISSING_TOKENS = {"", "na", "nan"}


def _parse_cell(token: str, where: str) -> float:
    token = token.strip()
    if token.lower() in _MISSING_TOKENS:
        return np.nan
    try:
        return float(token)
    except ValueError:
        raise InputError(f"cannot parse numeric value {token!r} at {where}") from None


def read_data_csv(path: str) -> DataMatrix:
    """Read a headed CSV into a DataMatrix (empty field / NA = missing)."""
    try:
        fh = open(path, "r", newline="")
    except OSError as exc:
        raise InputError(f"cannot open input file {path}: {exc}") from None
    with fh:
        reader = csv.reader(fh)
        try:
            header = next(reader)
        except StopIteration:
            raise InputError(f"input file {path} is empty") from None
        header = [h.strip() for h in header]
        rows = []
        for i, row in enumerate(reader, start=2):
            if not row or all(not cell.strip() for cell in row):
                continue
            if len(row) != len(header):
                raise InputError(
                    f"row {i} of {path} has {len(row)} fields, expected {len(header)}")
            rows.append([_parse_cell(cell, f"{path}:{i}") for cell in row])
    if not rows:
        raise InputError(f"input file {path} contains no data rows")
    return DataMatrix(np.asarray(rows, dtype=float), header)


def _fmt(x: float) -> str:
    if np.isnan(x):
        return "NA"
    return format(x, ".17g")


def write_matrix_csv(path: str, matrix: np.ndarray, names: list[str],
                     comment: str | None = None):
    """Square matrix with variable names on both the header row and the
    first column."""
    with open(path, "w", newline="") as fh:
        if comment:
            fh.write(f"# {comment}\n")
        writer = csv.writer(fh)
        writer.writerow(["", *names])
        for name, row in zip(names, np.asarray(matrix)):
            writer.writerow([name, *(_fmt(v) for v in row)])


def write_table_csv(path: str, header: list[str], rows, comment: str | None = None):
    with open(path, "w", newline="") as fh:
        if comment:
            fh.write(f"# {comment}\n")
        writer = csv.writer(fh)
        writer.writerow(header)
        for row in rows:
            writer.writerow([_fmt(v) if isinstance(v, float) else v for v in row])


def format_table(header: list[str], rows) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf)
    writer.writerow(header)
    for row in rows:
        writer.writerow([_fmt(v) if isinstance(v, float) else v for v in row])
    return buf.getvalue()
