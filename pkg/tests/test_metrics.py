import numpy as np
import pytest
from scipy import stats as sp

from fitscape.errors import ValidationError
from fitscape.metrics import (
    describe,
    distance_to_global,
    fitness_distribution,
    normalized_gain,
    prominent_region,
)
from fitscape.synthetic import binary_space

from conftest import complete_landscape, make_space


def test_describe_matches_reference_stats(rng):
    x = rng.gamma(3.0, size=400)
    stats = describe(x)
    assert stats.count == 400
    assert stats.mean == pytest.approx(x.mean(), abs=1e-12)
    assert stats.stdev == pytest.approx(x.std(), abs=1e-12)
    assert stats.min == x.min()
    assert stats.max == x.max()
    assert stats.fisher_skewness == pytest.approx(sp.skew(x), abs=1e-12)
    for level, value in stats.percentiles.items():
        assert value == pytest.approx(np.percentile(x, level), abs=1e-12)


def test_describe_constant_sample_has_no_skew():
    stats = describe(np.full(10, 3.0))
    assert stats.stdev == 0.0
    assert stats.fisher_skewness is None


def test_normalized_gain_direction():
    space_min = make_space([2, 2], objective="min")
    l = complete_landscape(space_min, [1.0, 2.0, 3.0, 5.0])
    ng = normalized_gain(l)
    assert ng[0] == 1.0  # best under min
    assert ng[3] == 0.0
    space_max = make_space([2, 2], objective="max")
    l2 = complete_landscape(space_max, [1.0, 2.0, 3.0, 5.0])
    ng2 = normalized_gain(l2)
    assert ng2[3] == 1.0
    assert ng2[0] == 0.0


def test_fitness_distribution_normalize_flag():
    space = make_space([2, 2])
    l = complete_landscape(space, [2.0, 4.0, 6.0, 10.0])
    raw = fitness_distribution(l)
    assert raw.min == 2.0 and raw.max == 10.0
    unit = fitness_distribution(l, normalize=True)
    assert unit.min == 0.0 and unit.max == 1.0


def test_prominent_region_hand_case():
    space = binary_space(4)
    l = complete_landscape(space, np.arange(16.0))
    rep = prominent_region(l, q=0.25, seed=0)
    assert list(rep.member_ids) == [12, 13, 14, 15]
    assert rep.member_count == 4
    assert rep.exact_pairs
    assert rep.pair_count == 6
    # hand-computed hamming distances among 1100,1101,1110,1111
    assert rep.distance_stats.mean == pytest.approx(8 / 6)
    assert rep.distance_stats.min == 1 and rep.distance_stats.max == 2
    assert rep.component_count == 1


def test_prominent_region_tie_break_is_lowest_id():
    space = binary_space(3)
    l = complete_landscape(space, np.ones(8))
    rep = prominent_region(l, q=0.5, seed=0)
    assert list(rep.member_ids) == [0, 1, 2, 3]


def test_prominent_region_min_objective_takes_smallest():
    space = binary_space(3, objective="min")
    l = complete_landscape(space, np.arange(8.0))
    rep = prominent_region(l, q=0.5, seed=0)
    assert list(rep.member_ids) == [0, 1, 2, 3]


def test_prominent_region_disconnected_components():
    space = binary_space(4)
    values = np.zeros(16)
    values[0] = 10.0
    values[15] = 10.0
    l = complete_landscape(space, values)
    rep = prominent_region(l, q=2 / 16, seed=0)
    assert list(rep.member_ids) == [0, 15]
    assert rep.component_count == 2
    assert rep.distance_stats.mean == 4.0


def test_prominent_region_sampled_pairs_flagged():
    space = binary_space(6)
    l = complete_landscape(space, np.arange(64.0))
    rep = prominent_region(l, q=0.5, pair_sample_cap=100, seed=3)
    assert not rep.exact_pairs
    assert rep.pair_count == 100
    again = prominent_region(l, q=0.5, pair_sample_cap=100, seed=3)
    assert rep.distance_stats.mean == again.distance_stats.mean
    assert rep.ks_statistic == again.ks_statistic


def test_prominent_region_validation():
    space = binary_space(3)
    l = complete_landscape(space, np.arange(8.0))
    with pytest.raises(ValidationError):
        prominent_region(l, q=0.0)
    with pytest.raises(ValidationError):
        prominent_region(l, q=1.0)
    with pytest.raises(ValidationError):
        prominent_region(l, q=0.01)  # ceil(0.08) = 1 member
    with pytest.raises(ValidationError):
        prominent_region(l, q=0.5, pair_sample_cap=0)


def test_distance_to_global_hand_case():
    space = binary_space(4)
    values = np.arange(16.0)
    l = complete_landscape(space, values)
    rep = distance_to_global(l, np.array([15, 7, 0]))
    assert rep.global_id == 15
    assert not rep.sampled
    # distances from 15: to 15 -> 0, to 7 -> 1, to 0 -> 4
    assert rep.stats.count == 3
    assert rep.stats.mean == pytest.approx(5 / 3)


def test_distance_to_global_tie_lowest_id():
    space = binary_space(3)
    values = np.zeros(8)
    values[3] = 9.0
    values[5] = 9.0
    l = complete_landscape(space, values)
    rep = distance_to_global(l, np.array([3, 5]))
    assert rep.global_id == 3


def test_distance_to_global_sampling_deterministic():
    space = binary_space(6)
    l = complete_landscape(space, np.arange(64.0))
    optima = np.arange(64)
    a = distance_to_global(l, optima, sample_cap=10, seed=5)
    b = distance_to_global(l, optima, sample_cap=10, seed=5)
    assert a.sampled and b.sampled
    assert a.stats.mean == b.stats.mean
    assert a.stats.count == 10
