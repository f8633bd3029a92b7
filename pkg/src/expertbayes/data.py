"""Categorical dataset container used for CPT learning and scoring."""

from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property
from typing import Sequence

import numpy as np

from .errors import ColumnMismatch
from .network import Variable

MISSING = -1  # integer code for a missing cell


@dataclass(frozen=True)
class Column:
    """Name plus the observed state set, in first-appearance order."""

    name: str
    states: tuple[str, ...]

    def __post_init__(self):
        object.__setattr__(self, "states", tuple(self.states))
        if not self.name:
            raise ValueError("column name must be nonempty")
        if len(set(self.states)) != len(self.states):
            raise ValueError(f"column {self.name!r} has duplicate state labels")


@dataclass(frozen=True)
class Dataset:
    """Rows of categorical observations with a designated class column.

    Cells are state labels or None for missing. Column state sets are
    fixed at construction, so subsets (CV folds, row slices) keep the
    same CPT layout as the full dataset.
    """

    columns: tuple[Column, ...]
    rows: tuple[tuple[str | None, ...], ...]
    class_column: str

    def __post_init__(self):
        columns = tuple(self.columns)
        rows = tuple(tuple(r) for r in self.rows)
        object.__setattr__(self, "columns", columns)
        object.__setattr__(self, "rows", rows)
        names = [c.name for c in columns]
        if len(set(names)) != len(names):
            raise ValueError("column names must be unique")
        if self.class_column not in names:
            raise ValueError(f"class column {self.class_column!r} not in columns")
        if len(columns[names.index(self.class_column)].states) < 2:
            raise ValueError("class column needs >= 2 states")
        state_sets = [set(c.states) for c in columns]
        for ri, row in enumerate(rows):
            if len(row) != len(columns):
                raise ValueError(f"row {ri} has {len(row)} cells, expected {len(columns)}")
            for ci, cell in enumerate(row):
                if cell is not None and cell not in state_sets[ci]:
                    raise ValueError(
                        f"row {ri}, column {columns[ci].name!r}: "
                        f"label {cell!r} not in declared states"
                    )

    @property
    def n_rows(self) -> int:
        return len(self.rows)

    @cached_property
    def column_index(self) -> dict[str, int]:
        return {c.name: i for i, c in enumerate(self.columns)}

    @property
    def class_index(self) -> int:
        return self.column_index[self.class_column]

    @cached_property
    def codes(self) -> np.ndarray:
        """Rows as int16 state indices into each column's own states; -1 missing."""
        lookup = [{s: i for i, s in enumerate(c.states)} for c in self.columns]
        out = np.full((len(self.rows), len(self.columns)), MISSING, dtype=np.int16)
        for ri, row in enumerate(self.rows):
            for ci, cell in enumerate(row):
                if cell is not None:
                    out[ri, ci] = lookup[ci][cell]
        out.setflags(write=False)
        return out

    @cached_property
    def _aligned_cache(self) -> dict:
        return {}

    def subset(self, indices: Sequence[int]) -> "Dataset":
        """New dataset with the selected rows and identical columns."""
        return Dataset(self.columns, tuple(self.rows[i] for i in indices), self.class_column)


def aligned_codes(variables: Sequence[Variable], data: Dataset) -> np.ndarray:
    """Rows encoded as state indices into each network variable's states.

    Shape (n_rows, n_variables), int16, -1 for missing cells. Raises
    ColumnMismatch when a variable has no matching column or the data
    uses a label the variable does not declare. Cached per dataset.
    """
    key = tuple((v.name, v.states) for v in variables)
    cache = data._aligned_cache
    hit = cache.get(key)
    if hit is not None:
        return hit
    codes = data.codes
    out = np.full((data.n_rows, len(variables)), MISSING, dtype=np.int16)
    for vi, var in enumerate(variables):
        ci = data.column_index.get(var.name)
        if ci is None:
            raise ColumnMismatch(f"dataset has no column for variable {var.name!r}")
        col = data.columns[ci]
        remap = np.full(len(col.states) + 1, MISSING, dtype=np.int16)
        for si, label in enumerate(col.states):
            try:
                remap[si] = var.states.index(label)
            except ValueError:
                raise ColumnMismatch(
                    f"column {var.name!r} uses label {label!r} unknown to the network"
                ) from None
        out[:, vi] = remap[codes[:, ci]]  # MISSING == -1 maps through the sentinel slot
    out.setflags(write=False)
    cache[key] = out
    return out
