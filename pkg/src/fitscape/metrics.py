"""Distribution statistics, prominent regions, and distance-to-global.

Statistics describe fitness values exactly as stored; objective direction
only enters where "best" must be picked (member selection, global optimum).
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import ValidationError
from .landscape import Landscape
from .space import ConfigSpace
from .stats import PERCENTILE_LEVELS, fisher_skewness, ks_two_sample, percentiles

DEFAULT_PAIR_SAMPLE_CAP = 1 << 22
DEFAULT_PROMINENT_Q = 0.01


@dataclass(frozen=True)
class DistributionStats:
    """Summary of a sample: moments plus fixed percentile levels.

    stdev is the population form; fisher_skewness is None when stdev is 0.
    """

    count: int
    mean: float
    stdev: float
    min: float
    max: float
    fisher_skewness: float | None
    percentiles: dict[int, float]

    def to_dict(self) -> dict:
        return {
            "count": self.count,
            "mean": self.mean,
            "stdev": self.stdev,
            "min": self.min,
            "max": self.max,
            "fisherSkewness": self.fisher_skewness,
            "percentiles": {str(k): v for k, v in self.percentiles.items()},
        }


@dataclass(frozen=True)
class ProminentRegionReport:
    q: float
    member_ids: np.ndarray
    distance_stats: DistributionStats
    pair_count: int
    exact_pairs: bool
    component_count: int
    ks_statistic: float
    ks_p: float
    seed: int

    @property
    def member_count(self) -> int:
        return int(self.member_ids.shape[0])


@dataclass(frozen=True)
class DistanceToGlobalReport:
    global_id: int
    stats: DistributionStats
    sampled: bool


def describe(values, skew_corrected: bool = False) -> DistributionStats:
    """DistributionStats over a 1-d sample."""
    arr = np.asarray(values, dtype=np.float64)
    if arr.ndim != 1 or arr.shape[0] == 0:
        raise ValidationError("need a non-empty 1-d sample")
    mean = float(arr.mean())
    var = float(np.mean((arr - mean) ** 2))
    stdev = math.sqrt(var)
    skew = None
    if stdev > 0.0 and arr.shape[0] >= 3:
        skew = fisher_skewness(arr, corrected=skew_corrected)
    return DistributionStats(
        count=int(arr.shape[0]),
        mean=mean,
        stdev=stdev,
        min=float(arr.min()),
        max=float(arr.max()),
        fisher_skewness=skew,
        percentiles=percentiles(arr, PERCENTILE_LEVELS),
    )


def minmax_unit(values: np.ndarray) -> np.ndarray:
    """Min-max scale to [0, 1]; a constant sample maps to all zeros."""
    arr = np.asarray(values, dtype=np.float64)
    span = float(arr.max() - arr.min()) if arr.size else 0.0
    if span == 0.0:
        return np.zeros_like(arr)
    return (arr - arr.min()) / span


def normalized_gain(l: Landscape) -> np.ndarray:
    """Direction-adjusted fitness scaled to [0, 1]: 1 is best, 0 is worst."""
    return minmax_unit(l.gain)


def fitness_distribution(l: Landscape, normalize: bool = False) -> DistributionStats:
    if l.n_known < 2:
        raise ValidationError("fitness distribution needs at least 2 configurations")
    values = minmax_unit(l.values) if normalize else l.values
    return describe(values)


def _neighbors_flat(space: ConfigSpace, ids: np.ndarray) -> np.ndarray:
    """All valid neighbors of an id array, concatenated."""
    parts = []
    for o in range(space.n_options):
        p = space.place[o]
        r = space.radices[o]
        d = (ids // p) % r
        if space.kinds[o] == 0:
            for delta in range(1, int(r)):
                parts.append(ids + (((d + delta) % r) - d) * p)
        else:
            parts.append(ids[d > 0] - p)
            parts.append(ids[d < r - 1] + p)
    return np.concatenate(parts)


def _component_count(space: ConfigSpace, member_ids: np.ndarray) -> int:
    """Connected components of the neighbor graph induced on member_ids."""
    m = member_ids.shape[0]
    visited = np.zeros(m, dtype=bool)
    count = 0
    cursor = 0
    while cursor < m:
        if visited[cursor]:
            cursor += 1
            continue
        count += 1
        visited[cursor] = True
        frontier = member_ids[cursor:cursor + 1]
        while frontier.shape[0]:
            nbrs = np.unique(_neighbors_flat(space, frontier))
            pos = np.searchsorted(member_ids, nbrs)
            pos_c = np.minimum(pos, m - 1)
            hit = member_ids[pos_c] == nbrs
            idx = pos_c[hit]
            new = idx[~visited[idx]]
            visited[new] = True
            frontier = member_ids[new]
    return count


def _distinct_pairs(rng: np.random.Generator, n: int, count: int):
    """count index pairs (a, b) with a != b, uniform with replacement."""
    a = rng.integers(0, n, size=count)
    b = rng.integers(0, n, size=count)
    bad = a == b
    while bad.any():
        k = int(bad.sum())
        a[bad] = rng.integers(0, n, size=k)
        b[bad] = rng.integers(0, n, size=k)
        bad = a == b
    return a, b


def prominent_region(l: Landscape, q: float = DEFAULT_PROMINENT_Q,
                     pair_sample_cap: int = DEFAULT_PAIR_SAMPLE_CAP,
                     seed: int = 0) -> ProminentRegionReport:
    """The best ceil(q*N) configs: how close together and how connected.

    Pairwise member distances are exhaustive when member_count^2 is within
    pair_sample_cap, otherwise pair_sample_cap sampled pairs. The KS test
    compares them against an equal-size sample of random known-config pair
    distances (member pairs are drawn first, then the baseline pairs, from
    one PCG64 stream).
    """
    if not 0.0 < q < 1.0:
        raise ValidationError("q must be strictly between 0 and 1")
    if pair_sample_cap < 1:
        raise ValidationError("pair sample cap must be positive")
    n = l.n_known
    m = math.ceil(q * n)
    if m < 2:
        raise ValidationError(f"top quantile holds {m} config(s); need at least 2")
    ids = l.known_ids()
    order = np.lexsort((ids, -l.gain))
    member_ids = np.sort(ids[order[:m]])
    rng = np.random.default_rng(np.random.SeedSequence(seed & 0xFFFFFFFFFFFFFFFF))
    exact = m * m <= pair_sample_cap
    if exact:
        ii, jj = np.triu_indices(m, 1)
        member_d = l.space.pairwise_distances(member_ids[ii], member_ids[jj])
    else:
        a, b = _distinct_pairs(rng, m, pair_sample_cap)
        member_d = l.space.pairwise_distances(member_ids[a], member_ids[b])
    a, b = _distinct_pairs(rng, n, member_d.shape[0])
    baseline_d = l.space.pairwise_distances(ids[a], ids[b])
    d_stat, p = ks_two_sample(member_d.astype(np.float64), baseline_d.astype(np.float64))
    return ProminentRegionReport(
        q=q,
        member_ids=member_ids,
        distance_stats=describe(member_d),
        pair_count=int(member_d.shape[0]),
        exact_pairs=exact,
        component_count=_component_count(l.space, member_ids),
        ks_statistic=d_stat,
        ks_p=p,
        seed=seed,
    )


def distance_to_global(l: Landscape, optima_ids, sample_cap: int = 1 << 20,
                       seed: int = 0) -> DistanceToGlobalReport:
    """Distance from every local optimum to the global optimum.

    The global optimum is the best known fitness, ties to the lowest id.
    Beyond sample_cap optima a seeded subsample is measured instead.
    """
    optima = np.asarray(optima_ids, dtype=np.int64)
    if optima.shape[0] == 0:
        raise ValidationError("no local optima to measure")
    global_id, _ = l.global_best()
    measured = optima
    sampled = optima.shape[0] > sample_cap
    if sampled:
        rng = np.random.default_rng(np.random.SeedSequence(seed & 0xFFFFFFFFFFFFFFFF))
        measured = optima[rng.choice(optima.shape[0], size=sample_cap, replace=False)]
    distances = l.space.pairwise_distances(
        measured, np.full(measured.shape[0], global_id, dtype=np.int64)
    )
    return DistanceToGlobalReport(
        global_id=int(global_id), stats=describe(distances), sampled=sampled
    )
