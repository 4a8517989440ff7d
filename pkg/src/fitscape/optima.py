"""Local optima, basins of attraction, and the local optima network.

A config is a local optimum iff it is strictly fitter than every neighbor.
Configs with no improving neighbor but at least one equal-fitness neighbor
are plateau-stuck: they are never optima and never basin members, they land
in a separate plateau bucket.

Basin assignment follows the deterministic successor of each config to its
terminal via pointer doubling, so the cost is a handful of vectorized passes
even on million-config landscapes.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import _kernels
from ._kernels import CLS_OPTIMUM, CLS_PLATEAU
from .errors import ValidationError
from .landscape import Landscape

BEST = "best"
FIRST = "first"
DEFAULT_PERTURBATION_STRENGTH = 2
DEFAULT_LON_ATTEMPTS = 100

# walks per kernel call when sampling LON escape edges; fixed so the RNG
# stream (and therefore every edge weight) is independent of memory pressure
_LON_BLOCK = 1 << 17


@dataclass(frozen=True)
class BasinInfo:
    """One basin: its optimum, member count, and mean local-search steps."""

    optimum_id: int
    size: int
    radius: float


@dataclass(frozen=True)
class LocalOptimaReport:
    optima: np.ndarray
    proportion: float
    neutral_plateau_count: int
    basins: tuple[BasinInfo, ...] | None = None
    plateau_bucket_size: int | None = None
    strategy: str | None = None
    seed: int | None = None

    @property
    def count(self) -> int:
        return int(self.optima.shape[0])


@dataclass(frozen=True)
class LONVertex:
    id: int
    fitness: float
    basin_size: int


@dataclass(frozen=True)
class LocalOptimaNetwork:
    """Escape-edge network over the local optima.

    Edge (a, b, w): w of the perturbation+local-search attempts started at
    optimum a ended at optimum b. Attempts whose search got plateau-stuck
    carry no edge, so out-weights may sum to less than attempts.
    """

    vertices: tuple[LONVertex, ...]
    edges: tuple[tuple[int, int, int], ...]
    perturbation_strength: int
    attempts: int
    strategy: str
    seed: int


def _check_strategy(strategy: str) -> None:
    if strategy not in (BEST, FIRST):
        raise ValidationError(f"strategy must be 'best' or 'first', got {strategy!r}")


def _scan(l: Landscape, strategy: str, seed: int):
    """Successor and classification arrays for a complete landscape."""
    g = l.dense_gain()
    s = l.space
    if strategy == BEST:
        return _kernels.scan_best(g, s.radices, s.place, s.kinds)
    return _kernels.scan_first(g, s.radices, s.place, s.kinds, seed & 0xFFFFFFFFFFFFFFFF)


def _terminals(succ: np.ndarray):
    """Resolve every config to its search terminal; also count path steps."""
    n = succ.shape[0]
    ptr = succ.copy()
    steps = (ptr != np.arange(n, dtype=np.int64)).astype(np.int64)
    while True:
        nxt = ptr[ptr]
        if np.array_equal(nxt, ptr):
            return ptr, steps
        steps = steps + steps[ptr]
        ptr = nxt


def find_local_optima(l: Landscape) -> LocalOptimaReport:
    """Exhaustive strict local-optimum scan; plateau-stuck configs counted apart."""
    l.require_complete("local optima enumeration")
    _, cls = _scan(l, BEST, 0)
    optima = np.flatnonzero(cls == CLS_OPTIMUM).astype(np.int64)
    return LocalOptimaReport(
        optima=optima,
        proportion=optima.shape[0] / l.space.cardinality,
        neutral_plateau_count=int((cls == CLS_PLATEAU).sum()),
    )


def assign_basins(l: Landscape, strategy: str = BEST, seed: int = 0) -> LocalOptimaReport:
    """Partition all configs into basins of attraction plus a plateau bucket.

    best: move to the strictly fittest neighbor, ties to the lowest id.
    first: scan neighbors in ascending id from a seeded per-config rotation
    and take the first strict improvement.

    Basin radius is the mean number of steps its members take to reach the
    optimum (the optimum itself contributes 0).
    """
    _check_strategy(strategy)
    l.require_complete("basin assignment")
    succ, cls = _scan(l, strategy, seed)
    term, steps = _terminals(succ)
    optima = np.flatnonzero(cls == CLS_OPTIMUM).astype(np.int64)
    stuck = cls[term] == CLS_PLATEAU
    card = l.space.cardinality
    routed = term[~stuck]
    sizes = np.bincount(routed, minlength=card)
    step_sums = np.bincount(routed, weights=steps[~stuck].astype(np.float64), minlength=card)
    basins = tuple(
        BasinInfo(optimum_id=int(o), size=int(sizes[o]), radius=float(step_sums[o] / sizes[o]))
        for o in optima
    )
    return LocalOptimaReport(
        optima=optima,
        proportion=optima.shape[0] / card,
        neutral_plateau_count=int((cls == CLS_PLATEAU).sum()),
        basins=basins,
        plateau_bucket_size=int(stuck.sum()),
        strategy=strategy,
        seed=seed,
    )


def build_lon(l: Landscape, perturbation_strength: int = DEFAULT_PERTURBATION_STRENGTH,
              attempts: int = DEFAULT_LON_ATTEMPTS,
              strategy: str = BEST, seed: int = 0) -> LocalOptimaNetwork:
    """Sample the escape-edge local optima network.

    Each attempt from an optimum takes perturbation_strength uniform random
    neighbor steps, then runs the chosen local search; the landing optimum
    receives one unit of edge weight (self-loops included). The walk RNG is
    PCG64 seeded from the master seed, so results are seed-deterministic.
    """
    _check_strategy(strategy)
    if attempts < 1:
        raise ValidationError("attempts must be at least 1")
    if perturbation_strength < 2:
        raise ValidationError("perturbation strength must be at least 2")
    l.require_complete("local optima network")
    s = l.space
    succ, cls = _scan(l, strategy, seed)
    term, _ = _terminals(succ)
    optima = np.flatnonzero(cls == CLS_OPTIMUM).astype(np.int64)
    if optima.shape[0] == 0:
        raise ValidationError("landscape has no strict local optima")
    sizes = np.bincount(term[cls[term] == CLS_OPTIMUM], minlength=s.cardinality)
    vertices = tuple(
        LONVertex(id=int(o), fitness=l.fitness_of(int(o)), basin_size=int(sizes[o]))
        for o in optima
    )
    rng = np.random.default_rng(np.random.SeedSequence(seed & 0xFFFFFFFFFFFFFFFF))
    starts = np.repeat(optima, attempts)
    src_parts = []
    dst_parts = []
    for lo in range(0, starts.shape[0], _LON_BLOCK):
        block = starts[lo:lo + _LON_BLOCK]
        draws = rng.integers(0, 2**64, size=(block.shape[0], perturbation_strength),
                             dtype=np.uint64)
        paths = _kernels.walk_paths(s.radices, s.place, s.kinds, block, draws)
        landed = term[paths[:, -1]]
        ok = cls[landed] == CLS_OPTIMUM
        src_parts.append(block[ok])
        dst_parts.append(landed[ok])
    src = np.concatenate(src_parts)
    dst = np.concatenate(dst_parts)
    order = np.lexsort((dst, src))
    src, dst = src[order], dst[order]
    if src.shape[0]:
        change = (src[1:] != src[:-1]) | (dst[1:] != dst[:-1])
        first = np.concatenate(([0], np.flatnonzero(change) + 1))
        counts = np.diff(np.concatenate((first, [src.shape[0]])))
        edges = tuple(
            (int(a), int(b), int(w)) for a, b, w in zip(src[first], dst[first], counts)
        )
    else:
        edges = ()
    return LocalOptimaNetwork(
        vertices=vertices,
        edges=tuple(edges),
        perturbation_strength=perturbation_strength,
        attempts=attempts,
        strategy=strategy,
        seed=seed,
    )
