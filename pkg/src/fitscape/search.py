"""Hill climbing and simulated annealing over config landscapes.

Hill climbing reuses the exact move rules of basin assignment (best
improvement: fittest neighbor, ties to lowest id; first improvement:
neighbors in id order starting from a seeded rotation), so trajectories
terminate at the same config that basin assignment maps the start to.

Simulated annealing proposes a uniform random unit-distance neighbor each
iteration, accepts improvements outright, accepts worse moves with
probability exp(-|delta|/T), and cools T by alpha per iteration. Deltas
are measured on the min-max normalized fitness scale by default so the
stock T0=1000 schedule behaves the same across landscapes; the flag is
recorded in trajectory metadata. The fitness source is pluggable: the
true landscape or any prediction table/model, with true fitness logged
alongside when the true landscape is supplied.

RNG: one numpy PCG64 stream per run, drawn in a fixed order (initial
config if random, then per iteration the proposal index, then the
acceptance uniform only when the proposal is worse). Two oracles that
assign identical values therefore produce identical trajectories.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from ._kernels import splitmix64
from .errors import PreconditionError, ValidationError
from .landscape import Landscape
from .optima import BEST, FIRST, _check_strategy
from .space import ConfigSpace

DEFAULT_T0 = 1000.0
DEFAULT_ALPHA = 0.99
DEFAULT_ITERATIONS = 10_000
RANDOM = "random"
GIVEN = "givenConfig"


@dataclass(frozen=True)
class SAParams:
    t0: float = DEFAULT_T0
    alpha: float = DEFAULT_ALPHA
    iterations: int = DEFAULT_ITERATIONS
    seed: int = 0
    initial: str = RANDOM
    initial_config: int | None = None

    def __post_init__(self):
        if not 0.0 < self.alpha < 1.0:
            raise ValidationError("cooling rate must be in (0, 1)")
        if not self.t0 > 0.0:
            raise ValidationError("initial temperature must be positive")
        if self.iterations < 0:
            raise ValidationError("iteration budget must be non-negative")
        if self.initial not in (RANDOM, GIVEN):
            raise ValidationError(f"initial must be '{RANDOM}' or '{GIVEN}'")
        if self.initial == GIVEN and self.initial_config is None:
            raise ValidationError("initial='givenConfig' needs initial_config")


@dataclass(frozen=True)
class Trajectory:
    iterations: np.ndarray
    config_ids: np.ndarray
    oracle_fitness: np.ndarray
    true_fitness: np.ndarray | None
    best_so_far: np.ndarray
    termination_reason: str
    metadata: dict = field(default_factory=dict)

    def __len__(self) -> int:
        return int(self.iterations.shape[0])

    @property
    def final_id(self) -> int:
        return int(self.config_ids[-1])

    def best_visited(self, maximize: bool):
        """(ConfigId, fitness) of the best logged visit by true fitness
        when available, oracle fitness otherwise."""
        values = self.true_fitness if self.true_fitness is not None else self.oracle_fitness
        idx = int(np.argmax(values)) if maximize else int(np.argmin(values))
        return int(self.config_ids[idx]), float(values[idx])


# ---------------------------------------------------------------- oracles


class LandscapeOracle:
    """Fitness source backed by stored landscape values."""

    def __init__(self, l: Landscape):
        self.landscape = l

    def values_for(self, ids: np.ndarray) -> np.ndarray:
        return self.landscape.fitness_many(ids)

    def bounds(self) -> tuple[float, float]:
        return float(self.landscape.values.min()), float(self.landscape.values.max())


class TableOracle:
    """Fitness source backed by a prediction table or any predict model."""

    def __init__(self, model, space: ConfigSpace, bounds: tuple[float, float] | None = None):
        self.model = model
        self.space = space
        if bounds is None:
            values = getattr(model, "values", None)
            if values is None:
                raise ValidationError(
                    "model oracle needs explicit fitness bounds for delta normalization"
                )
            bounds = (float(np.min(values)), float(np.max(values)))
        self._bounds = bounds

    def values_for(self, ids: np.ndarray) -> np.ndarray:
        return np.asarray(self.model.predict(self.space, ids), dtype=np.float64)

    def bounds(self) -> tuple[float, float]:
        return self._bounds


def as_oracle(source, space: ConfigSpace):
    if isinstance(source, Landscape):
        return LandscapeOracle(source)
    if hasattr(source, "values_for") and hasattr(source, "bounds"):
        return source
    if hasattr(source, "predict"):
        return TableOracle(source, space)
    raise ValidationError("fitness source must be a Landscape or a predict model")


# ---------------------------------------------------------------- hill climb


def _first_improvement_pick(nbr_ids: np.ndarray, gains: np.ndarray, g0: float,
                            current: int, seed64: int) -> int | None:
    order = np.argsort(nbr_ids, kind="stable")
    deg = nbr_ids.shape[0]
    rot = int(splitmix64(np.array([current], dtype=np.uint64)
                         ^ np.uint64(seed64))[0] % np.uint64(deg))
    for t in range(deg):
        pos = order[(rot + t) % deg]
        if gains[pos] > g0:
            return int(nbr_ids[pos])
    return None


def hill_climb(l: Landscape, start: int, strategy: str = BEST, seed: int = 0) -> Trajectory:
    """Climb until no neighbor strictly improves; mirrors basin assignment."""
    _check_strategy(strategy)
    space = l.space
    if not 0 <= int(start) < space.cardinality:
        raise ValidationError(f"start id {start} outside [0, {space.cardinality})")
    seed64 = seed & 0xFFFFFFFFFFFFFFFF
    maximize = space.maximize
    ids = [int(start)]
    current = int(start)
    g0 = float(l.fitness_many(np.array([current]))[0])
    gains = [g0]
    reason = None
    while True:
        nbr_ids = np.array(space.neighbors(current), dtype=np.int64)
        nbr_f = l.fitness_many(nbr_ids)
        ng = nbr_f if maximize else -nbr_f
        cur_gain = gains[-1] if maximize else -gains[-1]
        if strategy == BEST:
            best = float(ng.max())
            if best > cur_gain:
                tied = nbr_ids[ng == best]
                nxt = int(tied.min())
            else:
                nxt = None
                reason = "local_optimum" if best < cur_gain else "plateau"
        else:
            nxt = _first_improvement_pick(nbr_ids, ng, cur_gain, current, seed64)
            if nxt is None:
                reason = "local_optimum" if float(ng.max()) < cur_gain else "plateau"
        if nxt is None:
            break
        current = nxt
        ids.append(current)
        gains.append(float(l.fitness_many(np.array([current]))[0]))
        if len(ids) > space.cardinality:
            raise PreconditionError("hill climb exceeded the space cardinality")
    values = np.array(gains, dtype=np.float64)
    best_so_far = np.maximum.accumulate(values) if maximize else np.minimum.accumulate(values)
    return Trajectory(
        iterations=np.arange(len(ids), dtype=np.int64),
        config_ids=np.array(ids, dtype=np.int64),
        oracle_fitness=values,
        true_fitness=values.copy(),
        best_so_far=best_so_far,
        termination_reason=reason,
        metadata={
            "algorithm": "hill_climb",
            "strategy": strategy,
            "seed": seed,
        },
    )


# ---------------------------------------------------------------- annealing


def simulated_annealing(oracle, space: ConfigSpace, params: SAParams,
                        true_landscape: Landscape | None = None,
                        normalize_delta: bool = True,
                        log_every: int = 1) -> Trajectory:
    """Uniform-neighbor SA under a geometric cooling schedule."""
    oracle = as_oracle(oracle, space)
    if log_every < 1:
        raise ValidationError("log_every must be at least 1")
    if true_landscape is not None and true_landscape.space.to_dict() != space.to_dict():
        raise ValidationError("true landscape uses a different config space")
    rng = np.random.default_rng(np.random.SeedSequence(params.seed & 0xFFFFFFFFFFFFFFFF))
    if params.initial == RANDOM:
        current = int(rng.integers(0, space.cardinality))
    else:
        current = int(params.initial_config)
        if not 0 <= current < space.cardinality:
            raise ValidationError(f"initial config {current} outside the space")
    maximize = space.maximize
    lo, hi = oracle.bounds()
    glo, ghi = (lo, hi) if maximize else (-hi, -lo)
    span = ghi - glo

    def gain_of(raw: float) -> float:
        g = raw if maximize else -raw
        if not normalize_delta:
            return g
        return (g - glo) / span if span > 0.0 else 0.0

    def true_of(cid: int) -> float:
        if true_landscape is None:
            return math.nan
        if not true_landscape.has(cid):
            return math.nan
        return true_landscape.fitness_of(cid)

    cur_raw = float(oracle.values_for(np.array([current], dtype=np.int64))[0])
    cur_gain = gain_of(cur_raw)

    rows_it = [0]
    rows_id = [current]
    rows_oracle = [cur_raw]
    rows_true = [true_of(current)]
    temperature = params.t0
    for it in range(1, params.iterations + 1):
        nbrs = space.neighbors(current)
        j = int(rng.integers(0, len(nbrs)))
        cand = int(nbrs[j])
        cand_raw = float(oracle.values_for(np.array([cand], dtype=np.int64))[0])
        cand_gain = gain_of(cand_raw)
        if cand_gain > cur_gain:
            accept = True
        else:
            delta = cur_gain - cand_gain
            if delta == 0.0:
                prob = 1.0
            elif temperature == 0.0:  # cooling can underflow to exactly 0
                prob = 0.0
            else:
                prob = math.exp(-delta / temperature)
            accept = float(rng.random()) < prob
        if accept:
            current, cur_raw, cur_gain = cand, cand_raw, cand_gain
        temperature *= params.alpha
        if it % log_every == 0 or it == params.iterations:
            rows_it.append(it)
            rows_id.append(current)
            rows_oracle.append(cur_raw)
            rows_true.append(true_of(current))
    oracle_fitness = np.array(rows_oracle, dtype=np.float64)
    true_fitness = np.array(rows_true, dtype=np.float64) if true_landscape is not None else None
    tracked = true_fitness if true_fitness is not None else oracle_fitness
    if maximize:
        best_so_far = np.fmax.accumulate(tracked)
    else:
        best_so_far = np.fmin.accumulate(tracked)
    return Trajectory(
        iterations=np.array(rows_it, dtype=np.int64),
        config_ids=np.array(rows_id, dtype=np.int64),
        oracle_fitness=oracle_fitness,
        true_fitness=true_fitness,
        best_so_far=best_so_far,
        termination_reason="budget",
        metadata={
            "algorithm": "sa",
            "t0": params.t0,
            "alpha": params.alpha,
            "iterations": params.iterations,
            "seed": params.seed,
            "initial": params.initial,
            "normalize_delta": normalize_delta,
            "proposal": "uniform-neighbor",
            "surrogate_oracle": not isinstance(oracle, LandscapeOracle),
            "decimated": log_every > 1,
            "log_every": log_every,
        },
    )


def final_fitness_summary(trajectories: list[Trajectory], maximize: bool) -> dict:
    """Mean, stdev, and coefficient of variation of best-visited fitness."""
    finals = np.array([t.best_visited(maximize)[1] for t in trajectories], dtype=np.float64)
    mean = float(finals.mean())
    stdev = float(finals.std())
    return {
        "runs": len(trajectories),
        "mean": mean,
        "stdev": stdev,
        "cv": abs(stdev / mean) if mean != 0.0 else math.inf,
    }


# ---------------------------------------------------------------- warm start


@dataclass(frozen=True)
class WarmStart:
    config_id: int
    source_q: float
    target_percentile: float


def warm_start_pick(source: Landscape, target: Landscape, q: float,
                    seed: int = 0) -> WarmStart:
    """Seeded uniform pick from source's top-q, placed in target's ranking.

    The percentile is the fraction of target's known configs strictly
    fitter than the pick, so 0 means the pick is target's best.
    """
    if source.space.to_dict() != target.space.to_dict():
        raise ValidationError("landscapes use different config spaces")
    if not 0.0 < q <= 1.0:
        raise ValidationError("q must be in (0, 1]")
    n = source.n_known
    if q * n < 1.0:
        raise ValidationError(f"top fraction {q} of {n} configs selects none")
    m = math.ceil(q * n)
    ids = source.known_ids()
    top = np.sort(ids[np.lexsort((ids, -source.gain))[:m]])
    rng = np.random.default_rng(np.random.SeedSequence(seed & 0xFFFFFFFFFFFFFFFF))
    pick = int(top[int(rng.integers(0, top.shape[0]))])
    tf = float(target.fitness_many(np.array([pick], dtype=np.int64))[0])
    pick_gain = tf if target.space.maximize else -tf
    fitter = int((target.gain > pick_gain).sum())
    return WarmStart(
        config_id=pick,
        source_q=q,
        target_percentile=fitter / target.n_known,
    )
