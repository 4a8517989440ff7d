import numpy as np
import pytest

from fitscape.errors import ValidationError
from fitscape.optima import BEST, FIRST, _scan, _terminals, find_local_optima
from fitscape.search import (
    SAParams,
    final_fitness_summary,
    hill_climb,
    simulated_annealing,
    warm_start_pick,
)
from fitscape.surrogate import PredictionTable
from fitscape.synthetic import generate_additive

from conftest import (
    GRID,
    complete_landscape,
    make_space,
    oracle_best_move,
    random_complete_landscape,
)


def best_chain(l, start):
    """Follow strict best-improvement moves to the terminal."""
    path = [start]
    while True:
        nxt = oracle_best_move(l, path[-1])
        if nxt is None:
            return path
        path.append(nxt)


def test_hill_climb_best_matches_move_oracle(rng):
    for _ in range(4):
        l = random_complete_landscape(rng, max_cardinality=300, tie_fraction=0.3)
        for start in range(0, l.space.cardinality, 7):
            traj = hill_climb(l, start, strategy=BEST)
            want = best_chain(l, start)
            assert list(traj.config_ids) == want
            np.testing.assert_array_equal(traj.oracle_fitness,
                                          l.fitness_many(np.array(want)))


@pytest.mark.parametrize("strategy,seed", [(BEST, 0), (FIRST, 3), (FIRST, 11)])
def test_hill_climb_lands_on_basin_terminal(rng, strategy, seed):
    # the climb must terminate exactly where the vectorized basin scan
    # routes the start, strategy and seed included
    l = random_complete_landscape(rng, max_cardinality=400, tie_fraction=0.4)
    succ, _cls = _scan(l, strategy, seed)
    term, steps = _terminals(succ)
    for start in range(0, l.space.cardinality, 5):
        traj = hill_climb(l, start, strategy=strategy, seed=seed)
        assert traj.final_id == term[start]
        assert len(traj) - 1 == steps[start]


def test_hill_climb_additive_reaches_global_in_n_steps():
    l = generate_additive(8, seed=5)
    best_id, _ = l.global_best()
    for start in range(256):
        traj = hill_climb(l, start, strategy=BEST)
        assert traj.final_id == best_id
        assert len(traj) - 1 <= 8
        assert traj.termination_reason == "local_optimum"
    worst = best_id ^ 0xFF  # complement: every option wrong
    assert len(hill_climb(l, worst, strategy=BEST)) - 1 == 8


def test_hill_climb_gains_increase_strictly():
    l = generate_additive(6, seed=9)
    traj = hill_climb(l, 0, strategy=BEST)
    assert np.all(np.diff(traj.oracle_fitness) > 0)
    np.testing.assert_array_equal(traj.best_so_far, traj.oracle_fitness)


def test_hill_climb_plateau_termination():
    space = make_space([4], kinds=[GRID])
    l = complete_landscape(space, [1.0, 2.0, 2.0, 1.0])
    traj = hill_climb(l, 0, strategy=BEST)
    assert traj.final_id == 1
    assert traj.termination_reason == "plateau"


def test_hill_climb_validation():
    l = generate_additive(4, seed=0)
    with pytest.raises(ValidationError, match="outside"):
        hill_climb(l, 16)
    with pytest.raises(ValidationError, match="strategy"):
        hill_climb(l, 0, strategy="steepest")


def test_sa_is_seed_deterministic():
    l = generate_additive(8, seed=1)
    params = SAParams(t0=10.0, alpha=0.95, iterations=500, seed=42)
    a = simulated_annealing(l, l.space, params)
    b = simulated_annealing(l, l.space, params)
    np.testing.assert_array_equal(a.config_ids, b.config_ids)
    np.testing.assert_array_equal(a.oracle_fitness, b.oracle_fitness)
    c = simulated_annealing(l, l.space, SAParams(t0=10.0, alpha=0.95,
                                                 iterations=500, seed=43))
    assert not np.array_equal(a.config_ids, c.config_ids)


def test_sa_surrogate_oracle_replays_true_fitness_runs():
    # a prediction table holding the true values must reproduce the
    # landscape-driven trajectory bit for bit, seed by seed
    l = generate_additive(8, seed=2)
    table = PredictionTable(ids=np.arange(256), values=l.values.copy())
    for seed in range(5):
        params = SAParams(t0=100.0, alpha=0.98, iterations=1000, seed=seed)
        true_run = simulated_annealing(l, l.space, params, true_landscape=l)
        table_run = simulated_annealing(table, l.space, params, true_landscape=l)
        np.testing.assert_array_equal(true_run.config_ids, table_run.config_ids)
        np.testing.assert_array_equal(true_run.oracle_fitness, table_run.oracle_fitness)
        np.testing.assert_array_equal(true_run.true_fitness, table_run.true_fitness)
        assert true_run.metadata["surrogate_oracle"] is False
        assert table_run.metadata["surrogate_oracle"] is True


def test_sa_reaches_additive_optimum():
    l = generate_additive(10, seed=3)
    _, best_f = l.global_best()
    hits = 0
    for seed in range(10):
        params = SAParams(t0=1000.0, alpha=0.99, iterations=5000, seed=seed)
        traj = simulated_annealing(l, l.space, params)
        if traj.best_visited(True)[1] == best_f:
            hits += 1
    assert hits == 10


def test_sa_given_initial_and_budget_zero():
    l = generate_additive(6, seed=0)
    params = SAParams(iterations=0, initial="givenConfig", initial_config=17)
    traj = simulated_annealing(l, l.space, params)
    assert len(traj) == 1
    assert traj.config_ids[0] == 17
    assert traj.termination_reason == "budget"
    with pytest.raises(ValidationError, match="initial_config"):
        SAParams(initial="givenConfig")
    with pytest.raises(ValidationError, match="outside"):
        simulated_annealing(l, l.space, SAParams(initial="givenConfig",
                                                 initial_config=64, iterations=1))


def test_sa_param_validation():
    with pytest.raises(ValidationError):
        SAParams(alpha=1.0)
    with pytest.raises(ValidationError):
        SAParams(alpha=0.0)
    with pytest.raises(ValidationError):
        SAParams(t0=0.0)
    with pytest.raises(ValidationError):
        SAParams(iterations=-1)
    with pytest.raises(ValidationError):
        SAParams(initial="warm")


def test_sa_log_every_decimates_but_keeps_endpoints():
    l = generate_additive(6, seed=4)
    params = SAParams(t0=5.0, alpha=0.9, iterations=103, seed=0)
    full = simulated_annealing(l, l.space, params)
    thin = simulated_annealing(l, l.space, params, log_every=10)
    assert list(thin.iterations) == [0] + list(range(10, 101, 10)) + [103]
    assert thin.metadata["decimated"] is True
    # decimated rows must agree with the full log at shared iterations
    full_at = {int(i): int(c) for i, c in zip(full.iterations, full.config_ids)}
    for i, c in zip(thin.iterations, thin.config_ids):
        assert full_at[int(i)] == int(c)
    with pytest.raises(ValidationError):
        simulated_annealing(l, l.space, params, log_every=0)


def test_final_fitness_summary_matches_numpy():
    l = generate_additive(7, seed=6)
    runs = [
        simulated_annealing(l, l.space, SAParams(t0=10.0, alpha=0.95,
                                                 iterations=300, seed=s))
        for s in range(4)
    ]
    summary = final_fitness_summary(runs, maximize=True)
    finals = np.array([t.best_visited(True)[1] for t in runs])
    assert summary["runs"] == 4
    assert summary["mean"] == pytest.approx(finals.mean(), rel=1e-12)
    assert summary["stdev"] == pytest.approx(finals.std(), rel=1e-12)
    if finals.mean() != 0:
        assert summary["cv"] == pytest.approx(abs(finals.std() / finals.mean()), rel=1e-12)


def test_warm_start_membership_and_percentile():
    l = generate_additive(8, seed=7)
    best_id, _ = l.global_best()
    # q small enough that the top set is exactly the global optimum
    ws = warm_start_pick(l, l, q=1 / 256)
    assert ws.config_id == best_id
    assert ws.target_percentile == 0.0
    # reversed target: source's best is the target's worst config
    twin = complete_landscape(l.space, -l.values)
    ws2 = warm_start_pick(l, twin, q=1 / 256)
    assert ws2.config_id == best_id
    assert ws2.target_percentile == 255 / 256


def test_warm_start_pick_stays_in_top_q(rng):
    l = random_complete_landscape(rng, max_cardinality=500)
    n = l.space.cardinality
    m = int(np.ceil(0.1 * n))
    order = np.lexsort((np.arange(n), -l.gain))
    top_m = set(int(i) for i in order[:m])
    seen = set()
    for seed in range(20):
        ws = warm_start_pick(l, l, q=0.1, seed=seed)
        assert ws.config_id in top_m
        seen.add(ws.config_id)
    assert len(seen) > 1  # different seeds explore the top set


def test_warm_start_validation():
    l = generate_additive(5, seed=0)
    other = generate_additive(6, seed=0)
    with pytest.raises(ValidationError, match="different config spaces"):
        warm_start_pick(l, other, q=0.5)
    with pytest.raises(ValidationError):
        warm_start_pick(l, l, q=0.0)
    with pytest.raises(ValidationError, match="selects none"):
        warm_start_pick(l, l, q=1 / 64)
