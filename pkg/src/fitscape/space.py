"""Configuration spaces: option domains, encoding, neighborhoods, distances.

A configuration is a vector of per-option level indices. It is encoded as a
mixed-radix integer (the ConfigId): option 0 is the most significant digit,
the last option the least significant. Option order in the space definition
therefore fixes the encoding, which keeps ids stable across runs.

Neighbors are all configurations at distance exactly 1. Categorical options
contribute an indicator distance (0/1), so every other level of a categorical
option is a neighbor; grid options contribute the absolute difference of
level indices, so only the adjacent grid steps (index +/-1) are neighbors.

Neighbor enumeration order is canonical and shared with the scan kernels:
options in declaration order; for a categorical option the target levels in
ascending order (skipping the current one); for a grid option index-1 first,
then index+1, skipping whichever falls outside the grid.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from functools import cached_property
from pathlib import Path

import numpy as np

from .errors import ValidationError

CATEGORICAL = "categorical"
GRID = "grid"

MAX_CARDINALITY = 2**63 - 1


@dataclass(frozen=True)
class OptionSpec:
    """One configurable option: a name plus an ordered set of levels.

    Categorical levels are exact string labels; grid levels are strictly
    increasing numbers.
    """

    name: str
    kind: str
    levels: tuple

    def __post_init__(self):
        if self.kind not in (CATEGORICAL, GRID):
            raise ValidationError(f"option {self.name!r}: unknown kind {self.kind!r}")
        if len(self.levels) < 2:
            raise ValidationError(f"option {self.name!r}: needs at least 2 levels")
        if len(set(self.levels)) != len(self.levels):
            raise ValidationError(f"option {self.name!r}: duplicate levels")
        if self.kind == GRID:
            try:
                values = [float(v) for v in self.levels]
            except (TypeError, ValueError):
                raise ValidationError(
                    f"option {self.name!r}: grid levels must be numeric"
                ) from None
            if any(b <= a for a, b in zip(values, values[1:])):
                raise ValidationError(
                    f"option {self.name!r}: grid levels must be strictly increasing"
                )

    @property
    def n_levels(self) -> int:
        return len(self.levels)

    @property
    def max_distance(self) -> int:
        """Largest per-option distance: 1 for categorical, levels-1 for grid."""
        return 1 if self.kind == CATEGORICAL else self.n_levels - 1

    def level_index(self, value) -> int:
        """Map a raw level value (string or number) to its index."""
        if self.kind == CATEGORICAL:
            key = str(value)
            try:
                return self._label_map[key]
            except KeyError:
                raise ValidationError(
                    f"option {self.name!r}: undeclared level {value!r}"
                ) from None
        try:
            key = float(value)
        except (TypeError, ValueError):
            raise ValidationError(
                f"option {self.name!r}: non-numeric grid value {value!r}"
            ) from None
        try:
            return self._value_map[key]
        except KeyError:
            raise ValidationError(
                f"option {self.name!r}: undeclared level {value!r}"
            ) from None

    @cached_property
    def _label_map(self) -> dict:
        return {str(v): i for i, v in enumerate(self.levels)}

    @cached_property
    def _value_map(self) -> dict:
        return {float(v): i for i, v in enumerate(self.levels)}


@dataclass(frozen=True)
class ConfigSpace:
    """An ordered set of options plus the objective direction.

    Immutable; every operation is pure and safe to call concurrently.
    """

    options: tuple
    objective: str = "min"
    _cardinality: int = field(init=False, repr=False, compare=False, default=0)

    def __post_init__(self):
        if self.objective not in ("min", "max"):
            raise ValidationError(f"objective must be 'min' or 'max', got {self.objective!r}")
        names = [o.name for o in self.options]
        if len(set(names)) != len(names):
            raise ValidationError("option names must be unique")
        if not self.options:
            raise ValidationError("a space needs at least one option")
        card = 1
        for opt in self.options:
            card *= opt.n_levels
            if card > MAX_CARDINALITY:
                raise ValidationError(
                    f"cardinality exceeds {MAX_CARDINALITY} (ConfigId is a 64-bit integer)"
                )
        object.__setattr__(self, "_cardinality", card)

    @property
    def maximize(self) -> bool:
        return self.objective == "max"

    @property
    def n_options(self) -> int:
        return len(self.options)

    @property
    def cardinality(self) -> int:
        return self._cardinality

    @cached_property
    def diameter(self) -> int:
        """Longest distance between any two configurations."""
        return sum(o.max_distance for o in self.options)

    @property
    def radius(self) -> float:
        return self.diameter / 2

    # Arrays consumed by the scan kernels. radices[o] is the level count,
    # place[o] the mixed-radix place value, kinds[o] 0=categorical / 1=grid.
    @cached_property
    def radices(self) -> np.ndarray:
        return np.array([o.n_levels for o in self.options], dtype=np.int64)

    @cached_property
    def place(self) -> np.ndarray:
        place = np.ones(self.n_options, dtype=np.int64)
        for o in range(self.n_options - 2, -1, -1):
            place[o] = place[o + 1] * self.options[o + 1].n_levels
        return place

    @cached_property
    def kinds(self) -> np.ndarray:
        return np.array([0 if o.kind == CATEGORICAL else 1 for o in self.options], dtype=np.uint8)

    @cached_property
    def max_degree(self) -> int:
        return sum(o.n_levels - 1 if o.kind == CATEGORICAL else 2 for o in self.options)

    def encode(self, level_indices) -> int:
        """Mixed-radix encoding of a vector of per-option level indices."""
        if len(level_indices) != self.n_options:
            raise ValidationError(
                f"expected {self.n_options} level indices, got {len(level_indices)}"
            )
        config_id = 0
        for opt, idx in zip(self.options, level_indices):
            idx = int(idx)
            if not 0 <= idx < opt.n_levels:
                raise ValidationError(
                    f"option {opt.name!r}: level index {idx} out of range [0, {opt.n_levels})"
                )
            config_id = config_id * opt.n_levels + idx
        return config_id

    def decode(self, config_id: int) -> tuple:
        """Inverse of encode: ConfigId -> tuple of level indices."""
        self._check_id(config_id)
        digits = [0] * self.n_options
        rest = int(config_id)
        for o in range(self.n_options - 1, -1, -1):
            rest, digits[o] = divmod(rest, self.options[o].n_levels)
        return tuple(digits)

    def digit(self, config_id: int, option: int) -> int:
        return (int(config_id) // int(self.place[option])) % self.options[option].n_levels

    def neighbors(self, config_id: int) -> list:
        """All ConfigIds at distance exactly 1, in canonical slot order."""
        self._check_id(config_id)
        config_id = int(config_id)
        out = []
        for o, opt in enumerate(self.options):
            p = int(self.place[o])
            d = (config_id // p) % opt.n_levels
            if opt.kind == CATEGORICAL:
                for target in range(opt.n_levels):
                    if target != d:
                        out.append(config_id + (target - d) * p)
            else:
                if d > 0:
                    out.append(config_id - p)
                if d < opt.n_levels - 1:
                    out.append(config_id + p)
        return out

    def degree(self, config_id: int) -> int:
        return len(self.neighbors(config_id))

    def distance(self, a: int, b: int) -> int:
        """Sum of per-option distances (Hamming for categorical, index delta for grid)."""
        self._check_id(a)
        self._check_id(b)
        a, b = int(a), int(b)
        total = 0
        for o, opt in enumerate(self.options):
            p = int(self.place[o])
            da = (a // p) % opt.n_levels
            db = (b // p) % opt.n_levels
            if opt.kind == CATEGORICAL:
                total += int(da != db)
            else:
                total += abs(da - db)
        return total

    def pairwise_distances(self, a_ids: np.ndarray, b_ids: np.ndarray) -> np.ndarray:
        """Vectorized distance between aligned id arrays."""
        a_ids = np.asarray(a_ids, dtype=np.int64)
        b_ids = np.asarray(b_ids, dtype=np.int64)
        total = np.zeros(np.broadcast(a_ids, b_ids).shape, dtype=np.int64)
        for o in range(self.n_options):
            p = self.place[o]
            r = self.radices[o]
            da = (a_ids // p) % r
            db = (b_ids // p) % r
            if self.kinds[o] == 0:
                total += (da != db).astype(np.int64)
            else:
                total += np.abs(da - db)
        return total

    def digits_matrix(self, ids: np.ndarray) -> np.ndarray:
        """Level-index matrix (len(ids) x n_options) for an id array."""
        ids = np.asarray(ids, dtype=np.int64)
        out = np.empty((ids.shape[0], self.n_options), dtype=np.int64)
        for o in range(self.n_options):
            out[:, o] = (ids // self.place[o]) % self.radices[o]
        return out

    def _check_id(self, config_id) -> None:
        if not 0 <= int(config_id) < self.cardinality:
            raise ValidationError(
                f"ConfigId {config_id} out of range [0, {self.cardinality})"
            )

    def to_dict(self) -> dict:
        return {
            "objective": self.objective,
            "options": [
                {"name": o.name, "kind": o.kind, "levels": list(o.levels)}
                for o in self.options
            ],
        }

    def save(self, path) -> None:
        Path(path).write_text(json.dumps(self.to_dict(), indent=2) + "\n")


def space_from_dict(doc: dict) -> ConfigSpace:
    if not isinstance(doc, dict):
        raise ValidationError("space definition must be a JSON object")
    for key in ("objective", "options"):
        if key not in doc:
            raise ValidationError(f"space definition missing {key!r}")
    options = []
    for entry in doc["options"]:
        missing = {"name", "kind", "levels"} - set(entry)
        if missing:
            raise ValidationError(f"option entry missing {sorted(missing)}")
        levels = entry["levels"]
        if entry["kind"] == CATEGORICAL:
            levels = tuple(str(v) for v in levels)
        else:
            levels = tuple(levels)
        options.append(OptionSpec(name=entry["name"], kind=entry["kind"], levels=levels))
    return ConfigSpace(options=tuple(options), objective=doc["objective"])


def load_space(path) -> ConfigSpace:
    """Read a config-space JSON file."""
    try:
        doc = json.loads(Path(path).read_text())
    except json.JSONDecodeError as exc:
        raise ValidationError(f"{path}: invalid JSON ({exc})") from None
    return space_from_dict(doc)
