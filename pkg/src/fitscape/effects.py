"""Single-option mutation effects, option importance, pairwise epistasis.

All deltas live on the direction-adjusted min-max normalized fitness scale
(1 = best known config, 0 = worst), so positive always means fitter and
magnitudes are comparable across landscapes.

A mutation is a unit-distance move: one adjacent-index step for a grid
option, any unordered level pair for a categorical option. Its effect is
measured against every complete assignment of the remaining options (the
background), subsampled deterministically above background_cap.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy import stats as _sp_stats

from .errors import PreconditionError, ValidationError
from .landscape import Landscape
from .metrics import normalized_gain
from .space import ConfigSpace

DEFAULT_BACKGROUND_CAP = 1 << 20
DEFAULT_ALPHA = 0.05
MIN_COVERAGE = 0.95

HIST_BINS = 40
HIST_RANGE = (-1.0, 1.0)

SIGNIFICANCE_TEST = "two-sided one-sample t-test vs 0, Bonferroni-corrected"


@dataclass(frozen=True)
class MutationEffect:
    """Effect distribution of one transition of one option over backgrounds."""

    option: int
    from_level: int
    to_level: int
    from_label: str
    to_label: str
    background_count: int
    frac_beneficial: float
    frac_detrimental: float
    frac_neutral: float
    mean_delta: float
    stdev_delta: float
    histogram_counts: tuple[int, ...]


@dataclass(frozen=True)
class ImportanceVector:
    option_names: tuple[str, ...]
    values: tuple[float, ...]
    p_values: tuple[float | None, ...]
    significant: tuple[bool, ...]
    alpha: float
    test: str = SIGNIFICANCE_TEST


@dataclass(frozen=True)
class InteractionEntry:
    i: int
    j: int
    mean: float
    stdev: float
    frac_positive: float
    frac_negative: float
    frac_zero: float
    sample_count: int
    p_value: float | None
    significant: bool


@dataclass(frozen=True)
class InteractionMatrix:
    option_names: tuple[str, ...]
    entries: tuple[InteractionEntry, ...]
    alpha: float
    test: str = SIGNIFICANCE_TEST

    def mean_matrix(self) -> np.ndarray:
        n = len(self.option_names)
        out = np.zeros((n, n), dtype=np.float64)
        for e in self.entries:
            out[e.i, e.j] = e.mean
            out[e.j, e.i] = e.mean
        return out


def _resolve_option(space: ConfigSpace, option) -> int:
    if isinstance(option, str):
        for idx, opt in enumerate(space.options):
            if opt.name == option:
                return idx
        raise ValidationError(f"unknown option {option!r}")
    idx = int(option)
    if not 0 <= idx < space.n_options:
        raise ValidationError(f"unknown option index {idx}")
    return idx


def _transitions(space: ConfigSpace, o: int) -> list[tuple[int, int]]:
    """Unit-distance level transitions of an option, ascending."""
    opt = space.options[o]
    if opt.kind == "grid":
        return [(d, d + 1) for d in range(opt.n_levels - 1)]
    return [(u, v) for u in range(opt.n_levels) for v in range(u + 1, opt.n_levels)]


def _sample_sorted(rng: np.random.Generator, n: int, k: int) -> np.ndarray:
    """k distinct sorted indices from range(n), seeded and deterministic."""
    if n <= (1 << 22):
        return np.sort(rng.permutation(n)[:k])
    got = np.unique(rng.integers(0, n, size=k + k // 8 + 16))
    while got.shape[0] < k:
        got = np.union1d(got, rng.integers(0, n, size=k))
    return np.sort(got[rng.permutation(got.shape[0])[:k]])


def _t_test_p(n: int, mean: float, sample_var: float) -> float | None:
    """Two-sided p for H0: mean 0, from precomputed moments."""
    if n < 2:
        return None
    if sample_var <= 0.0:
        return 1.0 if mean == 0.0 else 0.0
    t = mean / math.sqrt(sample_var / n)
    return float(2.0 * _sp_stats.t.sf(abs(t), n - 1))


def _complete_backgrounds(space: ConfigSpace, o: int, cap: int, rng) -> np.ndarray:
    """Level-0 representative ids of every background of option o."""
    p = int(space.place[o])
    r = int(space.radices[o])
    n_bg = space.cardinality // r
    if n_bg > cap:
        b = _sample_sorted(rng, n_bg, cap)
    else:
        b = np.arange(n_bg, dtype=np.int64)
    return (b // p) * (r * p) + (b % p)


def _sparse_transition_backgrounds(l: Landscape, o: int, u: int, v: int):
    """Backgrounds where both endpoint configs of the transition are known."""
    space = l.space
    p = int(space.place[o])
    r = int(space.radices[o])
    ids = l.ids
    d = (ids // p) % r
    key_u = ids[d == u] - u * p
    key_v = ids[d == v] - v * p
    return np.intersect1d(key_u, key_v, assume_unique=True)


def _gain_at(l: Landscape, ng: np.ndarray, ids: np.ndarray) -> np.ndarray:
    if l.complete:
        return ng[ids]
    return ng[np.searchsorted(l.ids, ids)]


def mutation_effects(l: Landscape, option, background_cap: int = DEFAULT_BACKGROUND_CAP,
                     seed: int = 0) -> list[MutationEffect]:
    """Effect distributions for every transition of one option.

    Complete landscapes enumerate (or subsample) all backgrounds once per
    option; an incomplete landscape is accepted only if every transition has
    known endpoint pairs covering at least 95% of its backgrounds. Sampling
    draws from a PCG64 child stream keyed (seed, option) or, when sparse,
    (seed, option, from, to).
    """
    if background_cap < 1:
        raise ValidationError("background cap must be positive")
    space = l.space
    o = _resolve_option(space, option)
    out = []
    for (u, v), delta in _effects_with_deltas(l, o, background_cap, seed):
        n = delta.shape[0]
        mean = float(delta.mean())
        stdev = float(np.sqrt(np.mean((delta - mean) ** 2)))
        counts, _ = np.histogram(delta, bins=HIST_BINS, range=HIST_RANGE)
        opt = space.options[o]
        out.append(MutationEffect(
            option=o,
            from_level=u,
            to_level=v,
            from_label=str(opt.levels[u]),
            to_label=str(opt.levels[v]),
            background_count=n,
            frac_beneficial=float((delta > 0).sum() / n),
            frac_detrimental=float((delta < 0).sum() / n),
            frac_neutral=float((delta == 0).sum() / n),
            mean_delta=mean,
            stdev_delta=stdev,
            histogram_counts=tuple(int(c) for c in counts),
        ))
    return out


def importance(l: Landscape, background_cap: int = DEFAULT_BACKGROUND_CAP,
               seed: int = 0, alpha: float = DEFAULT_ALPHA) -> ImportanceVector:
    """Mean |delta| per option, pooled over its transitions and backgrounds.

    Significance is a t-test of the pooled deltas against 0 at
    alpha / n_options.
    """
    space = l.space
    values = []
    p_values = []
    significant = []
    corrected = alpha / space.n_options
    for o in range(space.n_options):
        pooled_abs_sum = 0.0
        pooled_sum = 0.0
        pooled_sq = 0.0
        n = 0
        for eff, delta in _effects_with_deltas(l, o, background_cap, seed):
            pooled_abs_sum += float(np.abs(delta).sum())
            pooled_sum += float(delta.sum())
            pooled_sq += float((delta * delta).sum())
            n += delta.shape[0]
        mean = pooled_sum / n
        sample_var = max(0.0, (pooled_sq - n * mean * mean) / (n - 1)) if n > 1 else 0.0
        p = _t_test_p(n, mean, sample_var)
        values.append(pooled_abs_sum / n)
        p_values.append(p)
        significant.append(p is not None and p < corrected)
    return ImportanceVector(
        option_names=tuple(opt.name for opt in space.options),
        values=tuple(values),
        p_values=tuple(p_values),
        significant=tuple(significant),
        alpha=alpha,
    )


def _effects_with_deltas(l: Landscape, o: int, background_cap: int, seed: int):
    """Yield (transition, delta array) pairs; shares logic with mutation_effects."""
    space = l.space
    ng = normalized_gain(l)
    p = int(space.place[o])
    r = int(space.radices[o])
    n_bg_total = space.cardinality // r
    seed64 = seed & 0xFFFFFFFFFFFFFFFF
    if l.complete:
        rng = np.random.default_rng(np.random.SeedSequence((seed64, o)))
        base = _complete_backgrounds(space, o, background_cap, rng)
    for u, v in _transitions(space, o):
        if l.complete:
            ids_u = base + u * p
            ids_v = base + v * p
        else:
            keys = _sparse_transition_backgrounds(l, o, u, v)
            coverage = keys.shape[0] / n_bg_total
            if coverage < MIN_COVERAGE:
                raise PreconditionError(
                    f"option {space.options[o].name!r} transition {u}->{v}: only "
                    f"{coverage:.1%} of backgrounds observed (need {MIN_COVERAGE:.0%})"
                )
            if keys.shape[0] > background_cap:
                rng = np.random.default_rng(np.random.SeedSequence((seed64, o, u, v)))
                keys = keys[_sample_sorted(rng, keys.shape[0], background_cap)]
            ids_u = keys + u * p
            ids_v = keys + v * p
        yield (u, v), _gain_at(l, ng, ids_v) - _gain_at(l, ng, ids_u)


def pairwise_interactions(l: Landscape, background_cap: int = DEFAULT_BACKGROUND_CAP,
                          seed: int = 0, alpha: float = DEFAULT_ALPHA) -> InteractionMatrix:
    """Four-point epistasis for every unordered option pair.

    For transitions u->v on option i and s->t on option j over background b:
    eps = f(v,t,b) - f(v,s,b) - f(u,t,b) + f(u,s,b) on the normalized scale.
    Entries pool all transition pairs; backgrounds above the cap are a seeded
    subsample keyed (seed, i, j). Significance as in importance, corrected by
    the number of pairs.
    """
    l.require_complete("pairwise interactions")
    if background_cap < 1:
        raise ValidationError("background cap must be positive")
    space = l.space
    ng = normalized_gain(l)
    n_opts = space.n_options
    if n_opts < 2:
        raise ValidationError("interactions need at least 2 options")
    seed64 = seed & 0xFFFFFFFFFFFFFFFF
    n_pairs = n_opts * (n_opts - 1) // 2
    corrected = alpha / n_pairs
    entries = []
    for i in range(n_opts):
        p_i = int(space.place[i])
        r_i = int(space.radices[i])
        for j in range(i + 1, n_opts):
            p_j = int(space.place[j])
            r_j = int(space.radices[j])
            n_bg = space.cardinality // (r_i * r_j)
            rng = np.random.default_rng(np.random.SeedSequence((seed64, i, j)))
            if n_bg > background_cap:
                b = _sample_sorted(rng, n_bg, background_cap)
            else:
                b = np.arange(n_bg, dtype=np.int64)
            mid = p_i // (r_j * p_j)
            base = (b // (mid * p_j)) * (r_i * p_i) \
                + ((b // p_j) % mid) * (r_j * p_j) + (b % p_j)
            n = 0
            s1 = 0.0
            s2 = 0.0
            pos = 0
            neg = 0
            zero = 0
            for u, v in _transitions(space, i):
                for s, t in _transitions(space, j):
                    eps = (
                        ng[base + v * p_i + t * p_j]
                        - ng[base + v * p_i + s * p_j]
                        - ng[base + u * p_i + t * p_j]
                        + ng[base + u * p_i + s * p_j]
                    )
                    n += eps.shape[0]
                    s1 += float(eps.sum())
                    s2 += float((eps * eps).sum())
                    pos += int((eps > 0).sum())
                    neg += int((eps < 0).sum())
                    zero += int((eps == 0).sum())
            mean = s1 / n
            pop_var = max(0.0, s2 / n - mean * mean)
            sample_var = max(0.0, (s2 - n * mean * mean) / (n - 1)) if n > 1 else 0.0
            p = _t_test_p(n, mean, sample_var)
            entries.append(InteractionEntry(
                i=i,
                j=j,
                mean=mean,
                stdev=math.sqrt(pop_var),
                frac_positive=pos / n,
                frac_negative=neg / n,
                frac_zero=zero / n,
                sample_count=n,
                p_value=p,
                significant=p is not None and p < corrected,
            ))
    return InteractionMatrix(
        option_names=tuple(opt.name for opt in space.options),
        entries=tuple(entries),
        alpha=alpha,
    )
