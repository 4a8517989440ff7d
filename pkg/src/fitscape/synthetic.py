"""Synthetic ground-truth landscapes: Kauffman NK and purely additive.

Both generators enumerate every configuration of an n-bit binary space and
are deterministic in the seed. Randomness comes from numpy's PCG64 generator
seeded through SeedSequence, with one child stream for interaction structure
and one for contribution tables, so the tables for a given seed do not depend
on the neighbor model.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import ValidationError
from .landscape import Landscape, from_pairs
from .space import CATEGORICAL, ConfigSpace, OptionSpec

MAX_EXHAUSTIVE_N = 24

ADJACENT = "adjacent"
RANDOM = "random"

# ids are enumerated in chunks so peak memory stays flat for n up to 24
_CHUNK = 1 << 20


def binary_space(n: int, objective: str = "max") -> ConfigSpace:
    """A space of n binary categorical options named x0..x{n-1}."""
    options = tuple(
        OptionSpec(name=f"x{i}", kind=CATEGORICAL, levels=("0", "1")) for i in range(n)
    )
    return ConfigSpace(options=options, objective=objective)


@dataclass(frozen=True)
class NKSpec:
    """Parameters of an NK landscape: n binary loci, each interacting with k others."""

    n: int
    k: int
    neighbor_model: str = ADJACENT
    seed: int = 0

    def __post_init__(self):
        if self.n < 1:
            raise ValidationError("n must be at least 1")
        if self.n > MAX_EXHAUSTIVE_N:
            raise ValidationError(
                f"n={self.n} too large for exhaustive materialization (max {MAX_EXHAUSTIVE_N})"
            )
        if not 0 <= self.k <= self.n - 1:
            raise ValidationError(f"k must be in [0, n-1], got k={self.k} for n={self.n}")
        if self.neighbor_model not in (ADJACENT, RANDOM):
            raise ValidationError(f"unknown neighbor model {self.neighbor_model!r}")


def _interaction_sets(spec: NKSpec, rng: np.random.Generator) -> list[np.ndarray]:
    """The k loci feeding each locus, in table bit order."""
    n, k = spec.n, spec.k
    if spec.neighbor_model == ADJACENT:
        return [np.array([(i + j) % n for j in range(1, k + 1)], dtype=np.int64) for i in range(n)]
    sets = []
    for i in range(n):
        others = np.array([j for j in range(n) if j != i], dtype=np.int64)
        sets.append(rng.choice(others, size=k, replace=False))
    return sets


def generate_nk(spec: NKSpec) -> Landscape:
    """Exhaustive NK landscape: f(c) = mean over loci of table lookups.

    Locus i reads its own bit plus the bits of its k interaction loci; the
    table index places the own bit highest, then the interaction loci in
    order. Tables hold 2^(k+1) i.i.d. uniform [0,1) draws.
    """
    n, k = spec.n, spec.k
    structure_seq, tables_seq = np.random.SeedSequence(spec.seed).spawn(2)
    sets = _interaction_sets(spec, np.random.default_rng(structure_seq))
    tables_rng = np.random.default_rng(tables_seq)
    cardinality = 1 << n
    total = np.zeros(cardinality, dtype=np.float64)
    for i in range(n):
        table = tables_rng.random(1 << (k + 1))
        for lo in range(0, cardinality, _CHUNK):
            ids = np.arange(lo, min(lo + _CHUNK, cardinality), dtype=np.int64)
            idx = ((ids >> (n - 1 - i)) & 1) << k
            for j, nbr in enumerate(sets[i]):
                idx |= ((ids >> (n - 1 - int(nbr))) & 1) << (k - 1 - j)
            total[lo:lo + ids.shape[0]] += table[idx]
    total /= n
    return from_pairs(binary_space(n), np.arange(cardinality, dtype=np.int64), total)


def generate_additive(n: int, weights=None, seed: int = 0) -> Landscape:
    """Additive landscape f(c) = sum of w_i over set bits; single optimum.

    Weights must be distinct and nonzero (ties or zeros would introduce
    neutrality); random weights are uniform [0,1) draws.
    """
    if n < 1:
        raise ValidationError("n must be at least 1")
    if n > MAX_EXHAUSTIVE_N:
        raise ValidationError(
            f"n={n} too large for exhaustive materialization (max {MAX_EXHAUSTIVE_N})"
        )
    if weights is None:
        rng = np.random.default_rng(np.random.SeedSequence(seed))
        w = rng.random(n)
        while np.unique(w).shape[0] != n or (w == 0.0).any():
            w = rng.random(n)
    else:
        w = np.asarray(weights, dtype=np.float64)
        if w.shape != (n,):
            raise ValidationError(f"expected {n} weights, got shape {w.shape}")
        if (w == 0.0).any():
            raise ValidationError("zero weight would create neutral neighbors")
        if np.unique(w).shape[0] != n:
            raise ValidationError("duplicate weights would create neutral neighbors")
        if not np.isfinite(w).all():
            raise ValidationError("weights must be finite")
    cardinality = 1 << n
    total = np.zeros(cardinality, dtype=np.float64)
    for lo in range(0, cardinality, _CHUNK):
        ids = np.arange(lo, min(lo + _CHUNK, cardinality), dtype=np.int64)
        acc = np.zeros(ids.shape[0], dtype=np.float64)
        for i in range(n):
            acc += ((ids >> (n - 1 - i)) & 1) * w[i]
        total[lo:lo + ids.shape[0]] = acc
    return from_pairs(binary_space(n), np.arange(cardinality, dtype=np.int64), total)
