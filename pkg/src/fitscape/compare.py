"""Similarity metrics between two landscapes over the same config space.

Rank policy: ranks are 0-based, best first, with average ranks over ties
when feeding correlations or shake-up, and lowest-ConfigId tie-breaks when
picking set members (top-q regions, global optima). Percentiles are the
fraction of configs strictly fitter, so the global optimum sits at 0.
All metrics except Pearson are invariant under positive affine transforms
of either landscape's fitness.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .effects import DEFAULT_BACKGROUND_CAP, importance, pairwise_interactions
from .errors import PreconditionError, ValidationError
from .landscape import Landscape
from .optima import find_local_optima
from .stats import average_ranks, pearson, spearman
from .transport import DEFAULT_EMD_CAP, emd

DEFAULT_TOP_Q = 0.1

RANK_POLICY = "0-based best-first average ranks; set membership ties to lowest ConfigId"


@dataclass(frozen=True)
class CorrelationResult:
    pearson: float
    spearman: float
    n_common: int


@dataclass(frozen=True)
class TopRegionOverlap:
    q: float
    member_count: int
    jaccard: float
    shake_up_ab: float
    shake_up_ba: float
    percentile_shift_ab: float
    percentile_shift_ba: float


@dataclass(frozen=True)
class OptimaSimilarity:
    jaccard: float
    emd: float
    approximate: bool
    count_a: int
    count_b: int


@dataclass(frozen=True)
class OptimumShift:
    distance: int
    rank_shift_ab: float
    rank_shift_ba: float


@dataclass(frozen=True)
class ConsistencyResult:
    importance_spearman: float
    interaction_spearman: float


@dataclass(frozen=True)
class ComparisonReport:
    n_common: int
    pearson: float
    spearman: float
    q: float
    jaccard_top_q: float
    shake_up_ab: float
    shake_up_ba: float
    percentile_shift_ab: float
    percentile_shift_ba: float
    jaccard_local_optima: float
    emd_local_optima: float
    emd_approximate: bool
    global_opt_distance: int
    global_opt_rank_shift_ab: float
    global_opt_rank_shift_ba: float
    importance_spearman: float
    interaction_spearman: float
    rank_policy: str = RANK_POLICY


def _require_same_space(a: Landscape, b: Landscape) -> None:
    if a.space.to_dict() != b.space.to_dict():
        raise ValidationError("landscapes use different config spaces")


def _common_support(a: Landscape, b: Landscape):
    """Aligned (ids, fitness_a, fitness_b) over the shared support."""
    if a.complete and b.complete:
        ids = a.known_ids()
        return ids, a.values, b.values
    ids = np.intersect1d(a.known_ids(), b.known_ids())
    if ids.shape[0] < 2:
        raise PreconditionError(
            f"common support has {ids.shape[0]} configs (need at least 2)"
        )
    return ids, a.fitness_many(ids), b.fitness_many(ids)


def fitness_correlation(a: Landscape, b: Landscape) -> CorrelationResult:
    """Pearson and Spearman of fitness aligned by ConfigId."""
    _require_same_space(a, b)
    ids, fa, fb = _common_support(a, b)
    return CorrelationResult(
        pearson=pearson(fa, fb),
        spearman=spearman(fa, fb),
        n_common=int(ids.shape[0]),
    )


def _best_first_ranks(gain: np.ndarray) -> np.ndarray:
    return average_ranks(-gain)


def _strictly_fitter_fraction(gain: np.ndarray, at: np.ndarray) -> np.ndarray:
    """Fraction of entries strictly fitter than each `at` value."""
    order = np.sort(gain)
    n = gain.shape[0]
    return (n - np.searchsorted(order, at, side="right")) / n


def _top_members(ids: np.ndarray, gain: np.ndarray, m: int) -> np.ndarray:
    pick = np.lexsort((ids, -gain))[:m]
    return np.sort(ids[pick])


def top_region_overlap(a: Landscape, b: Landscape, q: float = DEFAULT_TOP_Q) -> TopRegionOverlap:
    """Jaccard plus rank shake-up and percentile shift of the top-q regions."""
    _require_same_space(a, b)
    if not 0.0 < q <= 1.0:
        raise ValidationError("q must be in (0, 1]")
    ids, fa, fb = _common_support(a, b)
    n = ids.shape[0]
    if q * n < 1.0:
        raise ValidationError(f"top fraction {q} of {n} configs selects none")
    m = math.ceil(q * n)
    gain_a = fa if a.space.maximize else -fa
    gain_b = fb if b.space.maximize else -fb
    top_a = _top_members(ids, gain_a, m)
    top_b = _top_members(ids, gain_b, m)
    union = np.union1d(top_a, top_b).shape[0]
    inter = np.intersect1d(top_a, top_b).shape[0]
    ranks_a = _best_first_ranks(gain_a)
    ranks_b = _best_first_ranks(gain_b)
    in_a = np.searchsorted(ids, top_a)
    in_b = np.searchsorted(ids, top_b)
    shake_ab = float(np.abs(ranks_a[in_a] - ranks_b[in_a]).mean()) / n
    shake_ba = float(np.abs(ranks_a[in_b] - ranks_b[in_b]).mean()) / n
    pct_a_at_a = _strictly_fitter_fraction(gain_a, gain_a[in_a])
    pct_b_at_a = _strictly_fitter_fraction(gain_b, gain_b[in_a])
    pct_a_at_b = _strictly_fitter_fraction(gain_a, gain_a[in_b])
    pct_b_at_b = _strictly_fitter_fraction(gain_b, gain_b[in_b])
    return TopRegionOverlap(
        q=q,
        member_count=m,
        jaccard=inter / union,
        shake_up_ab=shake_ab,
        shake_up_ba=shake_ba,
        percentile_shift_ab=float(np.abs(pct_a_at_a - pct_b_at_a).mean()),
        percentile_shift_ba=float(np.abs(pct_a_at_b - pct_b_at_b).mean()),
    )


def local_optima_similarity(a: Landscape, b: Landscape,
                            sample_cap: int = DEFAULT_EMD_CAP,
                            seed: int = 0) -> OptimaSimilarity:
    """Jaccard of the optima id sets plus EMD between them."""
    _require_same_space(a, b)
    opt_a = find_local_optima(a).optima
    opt_b = find_local_optima(b).optima
    if opt_a.shape[0] == 0 or opt_b.shape[0] == 0:
        raise ValidationError("a landscape has no local optima to compare")
    inter = np.intersect1d(opt_a, opt_b).shape[0]
    union = np.union1d(opt_a, opt_b).shape[0]
    distance, approximate = emd(a.space, opt_a, opt_b, sample_cap=sample_cap, seed=seed)
    return OptimaSimilarity(
        jaccard=inter / union,
        emd=float(distance),
        approximate=approximate,
        count_a=int(opt_a.shape[0]),
        count_b=int(opt_b.shape[0]),
    )


def global_optimum_shift(a: Landscape, b: Landscape) -> OptimumShift:
    """Distance between global optima and each one's percentile in the other."""
    _require_same_space(a, b)
    a.require_complete("global optimum shift")
    b.require_complete("global optimum shift")
    best_a, _ = a.global_best()
    best_b, _ = b.global_best()
    gain_a = a.gain
    gain_b = b.gain
    shift_ab = float(_strictly_fitter_fraction(gain_b, np.array([gain_b[best_a]]))[0])
    shift_ba = float(_strictly_fitter_fraction(gain_a, np.array([gain_a[best_b]]))[0])
    return OptimumShift(
        distance=int(a.space.distance(best_a, best_b)),
        rank_shift_ab=shift_ab,
        rank_shift_ba=shift_ba,
    )


def consistency(a: Landscape, b: Landscape,
                background_cap: int = DEFAULT_BACKGROUND_CAP,
                seed: int = 0) -> ConsistencyResult:
    """Spearman agreement of option importance and of pairwise interactions."""
    _require_same_space(a, b)
    imp_a = importance(a, background_cap=background_cap, seed=seed)
    imp_b = importance(b, background_cap=background_cap, seed=seed)
    imp_rho = spearman(np.asarray(imp_a.values), np.asarray(imp_b.values))
    int_a = pairwise_interactions(a, background_cap=background_cap, seed=seed)
    int_b = pairwise_interactions(b, background_cap=background_cap, seed=seed)
    mean_a = [e.mean for e in sorted(int_a.entries, key=lambda e: (e.i, e.j))]
    mean_b = [e.mean for e in sorted(int_b.entries, key=lambda e: (e.i, e.j))]
    int_rho = spearman(np.asarray(mean_a), np.asarray(mean_b))
    return ConsistencyResult(importance_spearman=imp_rho, interaction_spearman=int_rho)


def compare_landscapes(a: Landscape, b: Landscape, q: float = DEFAULT_TOP_Q,
                       sample_cap: int = DEFAULT_EMD_CAP,
                       background_cap: int = DEFAULT_BACKGROUND_CAP,
                       seed: int = 0) -> ComparisonReport:
    """Every pairwise metric in one pass; the CLI emits this per pair."""
    corr = fitness_correlation(a, b)
    top = top_region_overlap(a, b, q)
    opt = local_optima_similarity(a, b, sample_cap=sample_cap, seed=seed)
    shift = global_optimum_shift(a, b)
    cons = consistency(a, b, background_cap=background_cap, seed=seed)
    return ComparisonReport(
        n_common=corr.n_common,
        pearson=corr.pearson,
        spearman=corr.spearman,
        q=top.q,
        jaccard_top_q=top.jaccard,
        shake_up_ab=top.shake_up_ab,
        shake_up_ba=top.shake_up_ba,
        percentile_shift_ab=top.percentile_shift_ab,
        percentile_shift_ba=top.percentile_shift_ba,
        jaccard_local_optima=opt.jaccard,
        emd_local_optima=opt.emd,
        emd_approximate=opt.approximate,
        global_opt_distance=shift.distance,
        global_opt_rank_shift_ab=shift.rank_shift_ab,
        global_opt_rank_shift_ba=shift.rank_shift_ba,
        importance_spearman=cons.importance_spearman,
        interaction_spearman=cons.interaction_spearman,
    )
