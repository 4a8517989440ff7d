"""Acceptance gate: eleven end-to-end checks with printed pass/fail lines.

Each test prints exactly one `[PASS]`/`[FAIL]` line (visible under -s or in
captured output) and asserts the same condition. Oracles here are local,
vectorized rewrites of the brute-force references so the whole gate stays
within desk-scale budgets.
"""

import time

import numpy as np
import pytest
from scipy.optimize import linprog
from scipy.stats import spearmanr

from fitscape.cli import main
from fitscape.compare import compare_landscapes, top_region_overlap
from fitscape.effects import mutation_effects, pairwise_interactions
from fitscape.landscape import from_pairs
from fitscape.optima import assign_basins, build_lon, find_local_optima
from fitscape.search import SAParams, hill_climb, simulated_annealing
from fitscape.space import CATEGORICAL, GRID, ConfigSpace, OptionSpec
from fitscape.surrogate import PredictionTable, evaluate, train_tree
from fitscape.synthetic import NKSpec, binary_space, generate_additive, generate_nk
from fitscape.transport import emd
from fitscape.walks import autocorrelation


def check(ok: bool, label: str) -> None:
    print(f"[{'PASS' if ok else 'FAIL'}] {label}")
    assert ok, label


# ------------------------------------------------------- local brute oracles


def _places(radices):
    out = np.ones(len(radices), dtype=np.int64)
    for o in range(len(radices) - 2, -1, -1):
        out[o] = out[o + 1] * radices[o + 1]
    return out


def _slots(space):
    """(option, place, from_digit?, delta/level moves) neighbor generators."""
    radices = [o.n_levels for o in space.options]
    place = _places(radices)
    moves = []
    for o, opt in enumerate(space.options):
        if opt.kind == GRID:
            moves.append((o, int(place[o]), radices[o], "grid"))
        else:
            moves.append((o, int(place[o]), radices[o], "cat"))
    return moves, place, radices


class Brute:
    """Vectorized brute-force references built from mixed-radix arithmetic."""

    def __init__(self, l):
        self.l = l
        space = l.space
        self.card = space.cardinality
        self.moves, self.place, self.radices = _slots(space)
        self.ids = np.arange(self.card, dtype=np.int64)
        self.gain = l.values if space.maximize else -l.values
        lo, hi = self.gain.min(), self.gain.max()
        span = hi - lo if hi > lo else 1.0
        self.ng = (self.gain - lo) / span

    def digit(self, o):
        return (self.ids // self.place[o]) % self.radices[o]

    def _neighbor_sets(self):
        """Yield (partner_ids, valid_mask) for every unit move."""
        for o, p, r, kind in self.moves:
            d = self.digit(o)
            if kind == "grid":
                for delta in (-1, 1):
                    nd = d + delta
                    valid = (nd >= 0) & (nd < r)
                    yield self.ids + delta * p, valid
            else:
                for w in range(1, r):
                    target = (d + w) % r
                    yield self.ids + (target - d) * p, np.ones(self.card, bool)

    def classify(self):
        """Per config: 0 improvable, 1 plateau-stuck, 2 strict optimum;
        plus the best-improvement successor (ties to lowest id)."""
        any_better = np.zeros(self.card, bool)
        any_equal = np.zeros(self.card, bool)
        best_gain = np.full(self.card, -np.inf)
        best_id = np.full(self.card, self.card, dtype=np.int64)
        for partner, valid in self._neighbor_sets():
            g = np.where(valid, self.gain[np.where(valid, partner, 0)], -np.inf)
            any_better |= g > self.gain
            any_equal |= g == self.gain
            newer = (g > best_gain) | ((g == best_gain) & (partner < best_id))
            newer &= valid
            best_gain = np.where(newer, g, best_gain)
            best_id = np.where(newer, partner, best_id)
        cls = np.where(any_better, 0, np.where(any_equal, 1, 2))
        succ = np.where(any_better, best_id, self.ids)
        return cls, succ

    def basins(self):
        cls, succ = self.classify()
        term = self.ids.copy()
        steps = np.zeros(self.card, dtype=np.int64)
        cur = succ.copy()
        moving = cur != term
        while moving.any():
            steps[moving] += 1
            term[moving] = cur[moving]
            cur = succ[term]
            moving = cur != term
        stuck = cls[term] == 1
        sizes, radii = {}, {}
        for o in np.flatnonzero(cls == 2):
            members = (term == o) & ~stuck
            sizes[int(o)] = int(members.sum())
            radii[int(o)] = float(steps[members].mean())
        return cls, term, steps, stuck, sizes, radii

    def transitions(self, o):
        opt = self.l.space.options[o]
        if opt.kind == GRID:
            return [(d, d + 1) for d in range(opt.n_levels - 1)]
        return [(u, v) for u in range(opt.n_levels)
                for v in range(u + 1, opt.n_levels)]

    def deltas(self, o, u, v):
        mask = self.digit(o) == u
        base = self.ids[mask]
        return self.ng[base + (v - u) * self.place[o]] - self.ng[base]

    def eps(self, i, j):
        mask = (self.digit(i) == 0) & (self.digit(j) == 0)
        base = self.ids[mask]
        out = []
        for u, v in self.transitions(i):
            for s, t in self.transitions(j):
                f_vt = self.ng[base + v * self.place[i] + t * self.place[j]]
                f_vs = self.ng[base + v * self.place[i] + s * self.place[j]]
                f_ut = self.ng[base + u * self.place[i] + t * self.place[j]]
                f_us = self.ng[base + u * self.place[i] + s * self.place[j]]
                out.append(f_vt - f_vs - f_ut + f_us)
        return np.concatenate(out)

    def distance_matrix(self, ids_a, ids_b):
        out = np.zeros((ids_a.shape[0], ids_b.shape[0]), dtype=np.int64)
        for o, p, r, kind in self.moves:
            da = (ids_a // p) % r
            db = (ids_b // p) % r
            diff = da[:, None] - db[None, :]
            out += np.abs(diff) if kind == "grid" else (diff != 0)
        return out


def _random_space(rng, max_cardinality=4096):
    while True:
        n = int(rng.integers(2, 7))
        radices = [int(rng.integers(2, 7)) for _ in range(n)]
        if np.prod(radices) <= max_cardinality:
            break
    options = []
    for i, r in enumerate(radices):
        if rng.random() < 0.4:
            options.append(OptionSpec(name=f"x{i}", kind=GRID,
                                      levels=tuple(float(v) for v in range(r))))
        else:
            options.append(OptionSpec(name=f"x{i}", kind=CATEGORICAL,
                                      levels=tuple(f"v{j}" for j in range(r))))
    objective = "max" if rng.random() < 0.5 else "min"
    return ConfigSpace(options=tuple(options), objective=objective)


def _random_landscape(rng, tie_fraction=0.0):
    space = _random_space(rng)
    values = rng.normal(size=space.cardinality)
    if tie_fraction > 0:
        ties = rng.random(space.cardinality) < tie_fraction
        values[ties] = np.round(values[ties], 1)
    return from_pairs(space, np.arange(space.cardinality), values)


# ------------------------------------------------------------- the criteria


def test_criterion_01_nk_maximal_ruggedness_calibration():
    start = time.monotonic()
    props = []
    for seed in range(5):
        l = generate_nk(NKSpec(20, 19, seed=seed))
        props.append(find_local_optima(l).proportion)
    elapsed = time.monotonic() - start
    mean = float(np.mean(props))
    ok = 0.037 <= mean <= 0.052 and elapsed < 600
    check(ok, f"C1 NK n=20 k=19 local-optima proportion: mean={mean:.4%} "
              f"over 5 seeds (band 3.7%..5.2%), {elapsed:.0f}s")


def test_criterion_02_maximal_ruggedness_small_n_law():
    props = [find_local_optima(generate_nk(NKSpec(12, 11, seed=s))).proportion
             for s in range(20)]
    mean = float(np.mean(props))
    target = 1 / 13
    ok = abs(mean - target) <= 0.015
    check(ok, f"C2 NK n=12 k=11 proportion: mean={mean:.4%} vs 1/13={target:.4%} "
              f"(tolerance 1.5 pts, 20 seeds)")


def test_criterion_03_random_walk_autocorrelation_law():
    start = time.monotonic()
    n = 14
    instance_seeds = (4, 5, 8, 9)
    all_ok = True
    detail = []
    for k in (1, 6, 13):
        rhos = []
        for inst in instance_seeds:
            l = generate_nk(NKSpec(n, k, seed=inst))
            res = autocorrelation(l, walk_count=50, walk_length=10_000,
                                  max_lag=1, seed=100 + inst)
            rho = res.rho_at(1)
            # cross-check the walk estimate against the exhaustive
            # directed-pair covariance on the same instance
            brute = Brute(l)
            xs, ys = [], []
            for partner, valid in brute._neighbor_sets():
                xs.append(l.values[valid])
                ys.append(l.values[partner[valid]])
            x = np.concatenate(xs)
            y = np.concatenate(ys)
            xc, yc = x - x.mean(), y - y.mean()
            exact = float(xc @ yc / np.sqrt((xc @ xc) * (yc @ yc)))
            all_ok &= abs(rho - exact) <= 0.01
            rhos.append(rho)
        mean = float(np.mean(rhos))
        target = 1 - (k + 1) / n
        all_ok &= abs(mean - target) <= 0.05
        detail.append(f"k={k}: {mean:.4f} vs {target:.4f}")
    elapsed = time.monotonic() - start
    all_ok &= elapsed < 120
    check(all_ok, f"C3 rho(1) within 0.05 of 1-(k+1)/14 and 0.01 of the "
                  f"pair oracle ({'; '.join(detail)}), {elapsed:.0f}s")


def test_criterion_04_brute_force_equivalence():
    rng = np.random.default_rng(404)
    ok = True
    for case in range(50):
        l = _random_landscape(rng, tie_fraction=0.3 if case % 2 else 0.0)
        brute = Brute(l)
        cls, succ = brute.classify()
        rep = find_local_optima(l)
        ok &= np.array_equal(rep.optima, np.flatnonzero(cls == 2))
        ok &= rep.neutral_plateau_count == int((cls == 1).sum())
        _, _, _, stuck, sizes, radii = brute.basins()
        basins = assign_basins(l)
        ok &= basins.plateau_bucket_size == int(stuck.sum())
        ok &= {b.optimum_id for b in basins.basins} == set(sizes)
        for b in basins.basins:
            ok &= b.size == sizes[b.optimum_id]
            ok &= abs(b.radius - radii[b.optimum_id]) <= 1e-12
        for o in range(l.space.n_options):
            for e in mutation_effects(l, o):
                want = brute.deltas(o, e.from_level, e.to_level)
                ok &= e.background_count == want.shape[0]
                ok &= abs(e.mean_delta - want.mean()) <= 1e-12
                ok &= abs(e.stdev_delta - want.std()) <= 1e-12
                ok &= abs(e.frac_beneficial - (want > 0).mean()) <= 1e-12
        for entry in pairwise_interactions(l).entries:
            want = brute.eps(entry.i, entry.j)
            ok &= entry.sample_count == want.shape[0]
            ok &= abs(entry.mean - want.mean()) <= 1e-12
            ok &= abs(entry.stdev - want.std()) <= 1e-12
        if not ok:
            break
    check(ok, "C4 optima/basins/effects/interactions match vectorized "
              "brute force on 50 random mixed landscapes (<=4096 configs)")


def test_criterion_05_additive_nulls():
    ok = True
    for n, seed in ((8, 0), (10, 1), (12, 2)):
        l = generate_additive(n, seed=seed)
        rep = find_local_optima(l)
        ok &= rep.count == 1
        best = int(rep.optima[0])
        brute = Brute(l)
        for i in range(n):
            for j in range(i + 1, n):
                ok &= float(np.abs(brute.eps(i, j)).max()) < 1e-12
        lon = build_lon(l, perturbation_strength=2, attempts=30, seed=0)
        ok &= len(lon.vertices) == 1 and lon.vertices[0].id == best
        for start in range(l.space.cardinality):
            traj = hill_climb(l, start, strategy="best")
            ok &= traj.final_id == best and len(traj) - 1 <= n
        if not ok:
            break
    check(ok, "C5 additive landscapes: single optimum, |eps|<1e-12, "
              "one-vertex LON, every climb <= n steps")


def test_criterion_06_xor_epistasis_exactness():
    space = binary_space(2)
    l = from_pairs(space, np.arange(4), np.array([0.0, 1.0, 1.0, 0.0]))
    entry = pairwise_interactions(l).entries[0]
    effects = mutation_effects(l, 0) + mutation_effects(l, 1)
    ok = entry.mean == -2.0 and entry.stdev == 0.0
    ok &= all(e.frac_beneficial == 0.5 and e.frac_detrimental == 0.5
              for e in effects)
    check(ok, f"C6 XOR epistasis: eps={entry.mean} exactly, mutation fractions "
              f"50/50 beneficial/detrimental")


def test_criterion_07_comparison_identities():
    l = generate_nk(NKSpec(8, 3, seed=17))
    rep = compare_landscapes(l, l, seed=0)
    ok = (rep.pearson == 1.0 and rep.spearman == 1.0
          and rep.jaccard_top_q == 1.0 and rep.jaccard_local_optima == 1.0
          and rep.shake_up_ab == 0.0 and rep.shake_up_ba == 0.0
          and rep.emd_local_optima == 0.0
          and rep.global_opt_distance == 0
          and rep.global_opt_rank_shift_ab == 0.0
          and rep.percentile_shift_ab == 0.0)
    space = ConfigSpace(options=tuple(
        OptionSpec(name=f"x{i}", kind=CATEGORICAL,
                   levels=tuple(f"v{j}" for j in range(10)))
        for i in range(3)), objective="max")
    a = from_pairs(space, np.arange(1000), np.arange(1000.0))
    b = from_pairs(space, np.arange(1000), np.arange(1000.0)[::-1].copy())
    top = top_region_overlap(a, b, q=0.1)
    ok &= top.shake_up_ab == 0.9 and top.shake_up_ba == 0.9
    check(ok, "C7 self-comparison is the identity; reversed ranks at N=1000, "
              "q=0.1 give shake-up 0.9 exactly")


def test_criterion_08_ruggedness_degrades_predictability():
    start = time.monotonic()
    ks, r2s = [], []
    for k in (1, 3, 5, 7, 11):
        for seed in range(5):
            l = generate_nk(NKSpec(12, k, seed=seed))
            model = train_tree(l, sample_fraction=0.01, max_depth=6, seed=seed)
            holdout = np.setdiff1d(l.known_ids(), model.train_ids)
            ks.append(k)
            r2s.append(evaluate(model, l, holdout))
    res = spearmanr(ks, r2s)
    rho = float(getattr(res, "statistic", getattr(res, "correlation", None)))
    elapsed = time.monotonic() - start
    ok = rho <= -0.8 and elapsed < 300
    check(ok, f"C8 Spearman(k, holdout R2) = {rho:.3f} <= -0.8 over "
              f"k in {{1,3,5,7,11}} x 5 seeds at 1% training, {elapsed:.0f}s")


def test_criterion_09_sa_reaches_additive_optimum_and_replays():
    l = generate_additive(10, seed=0)
    _, best_f = l.global_best()
    hits = 0
    for seed in range(100):
        params = SAParams(t0=1000.0, alpha=0.99, iterations=5000, seed=seed)
        traj = simulated_annealing(l, l.space, params)
        if traj.best_visited(True)[1] == best_f:
            hits += 1
    table = PredictionTable(ids=np.arange(1024), values=l.values.copy())
    replay_ok = True
    for seed in range(10):
        params = SAParams(t0=1000.0, alpha=0.99, iterations=5000, seed=seed)
        a = simulated_annealing(l, l.space, params, true_landscape=l)
        b = simulated_annealing(table, l.space, params, true_landscape=l)
        replay_ok &= np.array_equal(a.config_ids, b.config_ids)
        replay_ok &= np.array_equal(a.oracle_fitness, b.oracle_fitness)
    ok = hits >= 95 and replay_ok
    check(ok, f"C9 SA reached the additive optimum in {hits}/100 runs (>=95); "
              f"true-value surrogate replays are bit-identical over 10 seeds")


def test_criterion_10_scale_and_determinism(tmp_path):
    import resource

    l = generate_nk(NKSpec(20, 5, seed=9))
    space_file = tmp_path / "s.json"
    data_file = tmp_path / "d.csv"
    l.space.save(space_file)
    l.write_csv(data_file)
    argv = ["analyze", "--space", str(space_file), "--data", str(data_file),
            "--seed", "0", "--quiet"]
    start = time.monotonic()
    rc1 = main(argv + ["--out", str(tmp_path / "r1.json")])
    first = time.monotonic() - start
    rc2 = main(argv + ["--out", str(tmp_path / "r2.json")])
    same = (tmp_path / "r1.json").read_bytes() == (tmp_path / "r2.json").read_bytes()
    peak_gb = resource.getrusage(resource.RUSAGE_SELF).ru_maxrss / (1 << 20)
    ok = rc1 == 0 and rc2 == 0 and same and first < 900 and peak_gb < 8.0
    check(ok, f"C10 full analyze of 2^20 configs: {first:.0f}s (<900s), "
              f"peak RSS {peak_gb:.2f} GB (<8), repeat byte-identical: {same}")


def test_criterion_11_emd_matches_lp_oracle():
    rng = np.random.default_rng(1111)
    ok = True
    for _ in range(100):
        space = _random_space(rng)
        brute = Brute(from_pairs(space, np.arange(space.cardinality),
                                 np.zeros(space.cardinality)))
        na = int(rng.integers(1, min(64, space.cardinality) + 1))
        nb = int(rng.integers(1, min(64, space.cardinality) + 1))
        ids_a = np.unique(rng.choice(space.cardinality, size=na, replace=False))
        ids_b = np.unique(rng.choice(space.cardinality, size=nb, replace=False))
        got, approx = emd(space, ids_a, ids_b)
        ok &= not approx
        cost = brute.distance_matrix(ids_a, ids_b).astype(np.float64)
        m, n = cost.shape
        a_eq = np.zeros((m + n, m * n))
        b_eq = np.zeros(m + n)
        for i in range(m):
            a_eq[i, i * n:(i + 1) * n] = 1.0
            b_eq[i] = 1.0 / m
        for j in range(n):
            a_eq[m + j, j::n] = 1.0
            b_eq[m + j] = 1.0 / n
        res = linprog(cost.ravel(), A_eq=a_eq, b_eq=b_eq, method="highs")
        ok &= res.status == 0 and abs(got - res.fun) <= 1e-9
        # symmetry on every pair
        ok &= emd(space, ids_b, ids_a)[0] == pytest.approx(got, abs=1e-12)
        if not ok:
            break
    # triangle inequality on fresh triples
    for _ in range(20):
        space = _random_space(rng)
        cap = min(32, space.cardinality)
        pick = lambda: np.unique(rng.choice(
            space.cardinality, size=int(rng.integers(1, cap + 1)), replace=False))
        a, b, c = pick(), pick(), pick()
        d_ab = emd(space, a, b)[0]
        d_bc = emd(space, b, c)[0]
        d_ac = emd(space, a, c)[0]
        ok &= d_ac <= d_ab + d_bc + 1e-9
        ok &= emd(space, a, a)[0] == 0.0
    check(ok, "C11 EMD matches the LP oracle within 1e-9 on 100 pairs "
              "(<=64 points) and is symmetric with the triangle inequality")
