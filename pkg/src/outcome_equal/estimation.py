"""Plug-in estimation of a joint from individual records."""

from __future__ import annotations

import csv
import io
from dataclasses import dataclass, field
from pathlib import Path
from typing import NamedTuple

import numpy as np

from .dist import JointDistribution, VariableSchema
from .errors import BadAssignment, EmptyDataset, EmptyFile, MissingColumn, RaggedRow, UnknownLevel


@dataclass(frozen=True, eq=False)
class Dataset:
    """One row of level indices per individual, columns in schema order."""

    schema: VariableSchema
    records: np.ndarray = field(repr=False)

    def __post_init__(self):
        records = np.asarray(self.records, dtype=np.int64)
        if records.size == 0:
            raise EmptyDataset("dataset has no records")
        n_vars = len(self.schema.variables)
        if records.ndim != 2 or records.shape[1] != n_vars:
            raise BadAssignment(f"records must have shape (n, {n_vars})")
        sizes = np.array([len(v.levels) for v in self.schema.variables])
        if np.any(records < 0) or np.any(records >= sizes):
            raise BadAssignment("record holds a level index outside its variable's levels")
        records.setflags(write=False)
        object.__setattr__(self, "records", records)

    def __len__(self):
        return len(self.records)

    def cell_indices(self) -> np.ndarray:
        """Flat index into ``schema.shape`` for every record."""
        schema = self.schema
        roles = [v.role for v in schema.variables]
        cols = {r: self.records[:, [i for i, ro in enumerate(roles) if ro == r]] for r in set(roles)}
        s = cols["outcome"][:, 0]
        u = (
            np.ravel_multi_index(cols["unprotected"].T, schema.unprotected_dims)
            if "unprotected" in cols
            else np.zeros(len(self), dtype=np.int64)
        )
        w = np.ravel_multi_index(cols["protected"].T, schema.protected_dims)
        return np.ravel_multi_index((s, u, w), schema.shape)


@dataclass(frozen=True)
class SmoothingSpec:
    alpha: float = 0.0

    def __post_init__(self):
        if not self.alpha >= 0:
            raise ValueError(f"alpha must be nonnegative, got {self.alpha!r}")


@dataclass(frozen=True)
class EstimationDiagnostics:
    n_records: int
    alpha: float
    n_cells: int
    # flat (s, u, w) indices of cells with no observations
    empty_cells: tuple[tuple[int, int, int], ...]
    # total count in the denominator, pseudo-counts included
    effective_sample_size: float

    @property
    def empty_cell_count(self) -> int:
        return len(self.empty_cells)


class Estimate(NamedTuple):
    joint: JointDistribution
    diagnostics: EstimationDiagnostics


def estimate_joint(data: Dataset, smoothing: SmoothingSpec = SmoothingSpec()) -> Estimate:
    """Relative frequencies with ``alpha`` pseudo-counts added to every cell."""
    if len(data) == 0:
        raise EmptyDataset("dataset has no records")
    shape = data.schema.shape
    n_cells = int(np.prod(shape))
    counts = np.bincount(data.cell_indices(), minlength=n_cells).reshape(shape)
    total = len(data) + smoothing.alpha * n_cells
    mass = (counts + smoothing.alpha) / total
    empty = tuple(tuple(int(i) for i in idx) for idx in np.argwhere(counts == 0))
    diag = EstimationDiagnostics(len(data), smoothing.alpha, n_cells, empty, float(total))
    return Estimate(JointDistribution(data.schema, mass), diag)


def load_csv(path, schema: VariableSchema) -> Dataset:
    """Read records from a header-first CSV with one column per schema variable.

    Extra columns are ignored. Row numbers in errors count the header as row 1.
    """
    path = Path(path)
    with path.open(newline="", encoding="utf-8") as fh:
        reader = csv.reader(fh)
        header = next(reader, None)
        if header is None:
            raise EmptyFile(f"{path} is empty")
        header = [h.strip() for h in header]
        positions = []
        for var in schema.variables:
            if var.name not in header:
                raise MissingColumn(f"{path}: no column for variable {var.name!r}")
            positions.append(header.index(var.name))
        lookups = [{lv: i for i, lv in enumerate(v.levels)} for v in schema.variables]
        records = []
        for rownum, row in enumerate(reader, start=2):
            if not row:
                continue
            if len(row) != len(header):
                raise RaggedRow(f"{path}: row {rownum} has {len(row)} fields, header has {len(header)}")
            rec = []
            for var, pos, lookup in zip(schema.variables, positions, lookups):
                value = row[pos].strip()
                if value not in lookup:
                    raise UnknownLevel(rownum, var.name, value)
                rec.append(lookup[value])
            records.append(rec)
    if not records:
        raise EmptyFile(f"{path} has a header but no data rows")
    return Dataset(schema, np.array(records, dtype=np.int64))


def csv_text(data: Dataset) -> str:
    """Inverse of :func:`load_csv`; ``\\n`` line endings so output is byte-stable."""
    variables = data.schema.variables
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow([v.name for v in variables])
    levels = [np.array(v.levels, dtype=object) for v in variables]
    columns = [lv[data.records[:, j]] for j, lv in enumerate(levels)]
    writer.writerows(zip(*columns))
    return buf.getvalue()


def write_csv(data: Dataset, path) -> None:
    Path(path).write_text(csv_text(data), encoding="utf-8", newline="")
