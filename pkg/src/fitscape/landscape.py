"""Landscape ingest: configuration/performance tables mapped onto a space.

A Landscape stores one fitness value per known ConfigId. When every id in
[0, cardinality) is present the storage is a dense array indexed by id;
otherwise it is a sorted sparse id/value pair. Fitness is stored exactly as
read; direction handling lives in the accessors, never in the storage.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from functools import cached_property
from pathlib import Path

import numpy as np
import pandas as pd

from .errors import PreconditionError, ValidationError
from .space import ConfigSpace, load_space


@dataclass(frozen=True)
class SourceMeta:
    """Provenance of an ingested table."""

    file: str | None
    row_count: int
    duplicate_count: int


@dataclass(frozen=True, eq=False)
class Landscape:
    """Immutable fitness data over a ConfigSpace.

    ids is None when the landscape is complete (values[i] belongs to id i);
    otherwise ids is a sorted distinct int64 array aligned with values.
    """

    space: ConfigSpace
    ids: np.ndarray | None
    values: np.ndarray
    source: SourceMeta

    @property
    def complete(self) -> bool:
        return self.ids is None

    @property
    def n_known(self) -> int:
        return int(self.values.shape[0])

    def known_ids(self) -> np.ndarray:
        if self.ids is None:
            return np.arange(self.space.cardinality, dtype=np.int64)
        return self.ids

    @cached_property
    def gain(self) -> np.ndarray:
        """Fitness on the maximize scale: negated when the objective is min."""
        return self.values if self.space.maximize else -self.values

    def has(self, config_id: int) -> bool:
        if self.ids is None:
            return 0 <= int(config_id) < self.space.cardinality
        pos = int(np.searchsorted(self.ids, int(config_id)))
        return pos < self.ids.shape[0] and int(self.ids[pos]) == int(config_id)

    def fitness_of(self, config_id: int) -> float:
        return float(self.fitness_many(np.array([int(config_id)], dtype=np.int64))[0])

    def fitness_many(self, config_ids) -> np.ndarray:
        """Vectorized fitness lookup; missing ids are a precondition error."""
        config_ids = np.asarray(config_ids, dtype=np.int64)
        if config_ids.size and (config_ids.min() < 0 or config_ids.max() >= self.space.cardinality):
            raise ValidationError("ConfigId out of range for this space")
        if self.ids is None:
            return self.values[config_ids]
        pos = np.searchsorted(self.ids, config_ids)
        pos_c = np.minimum(pos, self.ids.shape[0] - 1)
        hit = self.ids[pos_c] == config_ids
        if not hit.all():
            missing = config_ids[~hit][0]
            raise PreconditionError(f"no fitness recorded for ConfigId {int(missing)}")
        return self.values[pos_c]

    def fitter(self, a: int, b: int) -> str:
        """Compare two configs under the objective: 'A', 'B', or 'Tie'."""
        fa = self.fitness_of(a)
        fb = self.fitness_of(b)
        if fa == fb:
            return "Tie"
        if self.space.maximize:
            return "A" if fa > fb else "B"
        return "A" if fa < fb else "B"

    def global_best(self) -> tuple[int, float]:
        """Best known configuration; exact ties resolve to the lowest id."""
        idx = int(np.argmax(self.gain))
        ids = self.known_ids()
        best = self.gain[idx]
        tied = np.flatnonzero(self.gain == best)
        idx = int(tied[np.argmin(ids[tied])]) if tied.shape[0] > 1 else idx
        return int(ids[idx]), float(self.values[idx])

    def require_complete(self, what: str) -> None:
        if not self.complete:
            raise PreconditionError(
                f"{what} requires a complete landscape "
                f"({self.n_known} of {self.space.cardinality} configs known)"
            )

    def dense_gain(self) -> np.ndarray:
        """Maximize-scale fitness indexed by id; complete landscapes only."""
        self.require_complete("dense fitness access")
        return self.gain

    def labels_row(self, config_id: int) -> list:
        """Raw level values of a config, one per option."""
        digits = self.space.decode(config_id)
        return [opt.levels[d] for opt, d in zip(self.space.options, digits)]

    def write_csv(self, path, fitness_column: str = "fitness") -> None:
        names = [o.name for o in self.space.options]
        if fitness_column in names:
            raise ValidationError(f"fitness column {fitness_column!r} collides with an option name")
        ids = self.known_ids()
        digits = self.space.digits_matrix(ids)
        columns = {}
        for o, opt in enumerate(self.space.options):
            levels = np.array([str(v) for v in opt.levels], dtype=object)
            columns[opt.name] = levels[digits[:, o]]
        columns[fitness_column] = [repr(float(v)) for v in self.values]
        pd.DataFrame(columns).to_csv(path, index=False)


def from_pairs(space: ConfigSpace, ids, values, file: str | None = None,
               row_count: int | None = None, duplicate_count: int = 0) -> Landscape:
    """Build a Landscape from already-aggregated (id, fitness) pairs."""
    ids = np.asarray(ids, dtype=np.int64)
    values = np.asarray(values, dtype=np.float64)
    if ids.shape != values.shape or ids.ndim != 1:
        raise ValidationError("ids and values must be aligned 1-d arrays")
    if ids.size == 0:
        raise ValidationError("landscape has no configurations")
    if np.unique(ids).shape[0] != ids.shape[0]:
        raise ValidationError("duplicate ConfigIds after aggregation")
    if ids.min() < 0 or ids.max() >= space.cardinality:
        raise ValidationError("ConfigId out of range for this space")
    if not np.isfinite(values).all():
        bad = ids[~np.isfinite(values)][0]
        raise ValidationError(f"non-finite fitness for ConfigId {int(bad)}")
    order = np.argsort(ids, kind="stable")
    ids = ids[order]
    values = values[order]
    meta = SourceMeta(
        file=file,
        row_count=row_count if row_count is not None else int(ids.shape[0]),
        duplicate_count=duplicate_count,
    )
    if ids.shape[0] == space.cardinality:
        return Landscape(space=space, ids=None, values=values, source=meta)
    return Landscape(space=space, ids=ids, values=values, source=meta)


def _aggregate_rows(space: ConfigSpace, row_ids: np.ndarray, row_values: np.ndarray,
                    file: str | None) -> Landscape:
    """Average replicate rows per ConfigId and build the Landscape."""
    distinct, inverse = np.unique(row_ids, return_inverse=True)
    sums = np.bincount(inverse, weights=row_values, minlength=distinct.shape[0])
    counts = np.bincount(inverse, minlength=distinct.shape[0])
    means = sums / counts
    return from_pairs(
        space,
        distinct,
        means,
        file=file,
        row_count=int(row_ids.shape[0]),
        duplicate_count=int(row_ids.shape[0] - distinct.shape[0]),
    )


def _encode_table(space: ConfigSpace, columns: dict, fitness_column: str,
                  n_rows: int, file: str) -> Landscape:
    if n_rows == 0:
        raise ValidationError(f"{file}: no data rows")
    row_ids = np.zeros(n_rows, dtype=np.int64)
    for opt in space.options:
        raw = columns[opt.name]
        idx = np.fromiter((opt.level_index(v) for v in raw), dtype=np.int64, count=n_rows)
        row_ids = row_ids * opt.n_levels + idx
    values = np.asarray(columns[fitness_column], dtype=np.float64)
    if not np.isfinite(values).all():
        row = int(np.flatnonzero(~np.isfinite(values))[0])
        raise ValidationError(f"{file}: non-finite fitness in data row {row + 1}")
    return _aggregate_rows(space, row_ids, values, file)


def load_csv(space_file, data_file, fitness_column: str = "fitness") -> Landscape:
    """Load a CSV of option columns plus one fitness column.

    Columns may appear in any order but the set must be exactly the declared
    options plus fitness_column. Replicate rows for the same configuration
    are averaged.
    """
    space = space_file if isinstance(space_file, ConfigSpace) else load_space(space_file)
    name = str(data_file)
    expected = {o.name for o in space.options} | {fitness_column}
    try:
        frame = pd.read_csv(data_file, dtype=str, skip_blank_lines=True)
    except pd.errors.EmptyDataError:
        raise ValidationError(f"{name}: empty file") from None
    got = set(frame.columns)
    if got != expected:
        unknown = sorted(got - expected)
        missing = sorted(expected - got)
        parts = []
        if unknown:
            parts.append(f"unknown columns {unknown}")
        if missing:
            parts.append(f"missing columns {missing}")
        raise ValidationError(f"{name}: {'; '.join(parts)}")
    try:
        fitness = frame[fitness_column].astype(np.float64).to_numpy()
    except ValueError as exc:
        raise ValidationError(f"{name}: fitness column not numeric ({exc})") from None
    columns = {o.name: frame[o.name].to_numpy() for o in space.options}
    columns[fitness_column] = fitness
    return _encode_table(space, columns, fitness_column, len(frame), name)


def load_json(space_file, data_file, fitness_column: str = "fitness") -> Landscape:
    """Load a JSON array of {option: value, ..., fitness: number} records."""
    space = space_file if isinstance(space_file, ConfigSpace) else load_space(space_file)
    name = str(data_file)
    try:
        doc = json.loads(Path(data_file).read_text())
    except json.JSONDecodeError as exc:
        raise ValidationError(f"{name}: invalid JSON ({exc})") from None
    if not isinstance(doc, list):
        raise ValidationError(f"{name}: expected a JSON array of records")
    if not doc:
        raise ValidationError(f"{name}: no data rows")
    expected = {o.name for o in space.options} | {fitness_column}
    columns = {key: [] for key in expected}
    for row, rec in enumerate(doc):
        if not isinstance(rec, dict) or set(rec) != expected:
            raise ValidationError(f"{name}: record {row + 1} keys do not match the space")
        for key in expected:
            columns[key].append(rec[key])
    raw_fitness = columns[fitness_column]
    fitness = np.empty(len(doc), dtype=np.float64)
    for row, v in enumerate(raw_fitness):
        if isinstance(v, bool) or not isinstance(v, (int, float)) or not math.isfinite(v):
            raise ValidationError(f"{name}: non-finite fitness in record {row + 1}")
        fitness[row] = float(v)
    columns[fitness_column] = fitness
    return _encode_table(space, columns, fitness_column, len(doc), name)
