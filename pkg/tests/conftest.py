"""Shared fixtures and slow brute-force oracles.

The oracle functions here re-derive answers with the dumbest possible
loops so library results can be checked against an independent source.
Keep them loop-based on purpose.
"""

from __future__ import annotations

import numpy as np
import pytest

from fitscape.landscape import Landscape, from_pairs
from fitscape.space import CATEGORICAL, GRID, ConfigSpace, OptionSpec


def make_space(radices, objective="max", kinds=None):
    """One option per radix; categorical unless kinds says otherwise."""
    options = []
    for i, r in enumerate(radices):
        kind = kinds[i] if kinds else CATEGORICAL
        if kind == GRID:
            levels = tuple(float(v) for v in range(r))
        else:
            levels = tuple(f"v{j}" for j in range(r))
        options.append(OptionSpec(name=f"x{i}", kind=kind, levels=levels))
    return ConfigSpace(options=tuple(options), objective=objective)


def complete_landscape(space, values):
    values = np.asarray(values, dtype=np.float64)
    assert values.shape[0] == space.cardinality
    return from_pairs(space, np.arange(space.cardinality, dtype=np.int64), values)


def random_mixed_space(rng, max_cardinality=4096, objective=None):
    """A random space of 2..6 options with mixed radices and kinds."""
    while True:
        n = int(rng.integers(2, 7))
        radices = [int(rng.integers(2, 7)) for _ in range(n)]
        if int(np.prod(radices)) <= max_cardinality:
            break
    kinds = [GRID if rng.random() < 0.4 else CATEGORICAL for _ in range(n)]
    if objective is None:
        objective = "max" if rng.random() < 0.5 else "min"
    return make_space(radices, objective=objective, kinds=kinds)


def random_complete_landscape(rng, max_cardinality=4096, objective=None,
                              tie_fraction=0.0):
    space = random_mixed_space(rng, max_cardinality, objective)
    values = rng.normal(size=space.cardinality)
    if tie_fraction:
        # quantize some values so exact-tie paths get exercised
        mask = rng.random(space.cardinality) < tie_fraction
        values[mask] = np.round(values[mask], 1)
    return complete_landscape(space, values)


# ---------------------------------------------------------------- oracles


def oracle_digits(space, cid):
    out = []
    rem = cid
    for opt in reversed(space.options):
        out.append(rem % opt.n_levels)
        rem //= opt.n_levels
    return list(reversed(out))


def oracle_encode(space, digits):
    cid = 0
    for opt, d in zip(space.options, digits):
        cid = cid * opt.n_levels + d
    return cid


def oracle_distance(space, a, b):
    da, db = oracle_digits(space, a), oracle_digits(space, b)
    total = 0
    for opt, x, y in zip(space.options, da, db):
        total += abs(x - y) if opt.kind == GRID else int(x != y)
    return total


def oracle_neighbors(space, cid):
    return [other for other in range(space.cardinality)
            if other != cid and oracle_distance(space, cid, other) == 1]


def oracle_classify(l: Landscape, cid):
    """0 improvable, 1 plateau-stuck, 2 strict optimum."""
    g0 = l.gain[cid]
    neigh_gains = [l.gain[m] for m in oracle_neighbors(l.space, cid)]
    if any(g > g0 for g in neigh_gains):
        return 0
    if any(g == g0 for g in neigh_gains):
        return 1
    return 2


def oracle_local_optima(l: Landscape):
    return [cid for cid in range(l.space.cardinality)
            if oracle_classify(l, cid) == 2]


def oracle_best_move(l: Landscape, cid):
    """Best-improvement successor, ties to the lowest neighbor id; None if stuck."""
    g0 = l.gain[cid]
    best_gain, best_id = g0, None
    for m in sorted(oracle_neighbors(l.space, cid)):
        if l.gain[m] > best_gain:
            best_gain, best_id = l.gain[m], m
    return best_id


def oracle_transitions(space, o):
    opt = space.options[o]
    if opt.kind == GRID:
        return [(d, d + 1) for d in range(opt.n_levels - 1)]
    return [(u, v) for u in range(opt.n_levels) for v in range(u + 1, opt.n_levels)]


def oracle_normalized_gain(l: Landscape):
    gain = l.values if l.space.maximize else -l.values
    lo, hi = float(gain.min()), float(gain.max())
    span = hi - lo if hi > lo else 1.0
    return (gain - lo) / span


def oracle_mutation_deltas(l: Landscape, o, u, v):
    """Normalized deltas of transition u->v of option o over every background."""
    space = l.space
    ng = oracle_normalized_gain(l)
    place = int(space.place[o])
    deltas = []
    for cid in range(space.cardinality):
        if oracle_digits(space, cid)[o] != u:
            continue
        deltas.append(float(ng[cid + (v - u) * place]) - float(ng[cid]))
    return np.array(deltas)


def oracle_interaction_eps(l: Landscape, i, j):
    """Pooled four-point epsilons of an option pair over all backgrounds."""
    space = l.space
    ng = oracle_normalized_gain(l)
    p_i, p_j = int(space.place[i]), int(space.place[j])
    eps = []
    for cid in range(space.cardinality):
        digits = oracle_digits(space, cid)
        if digits[i] != 0 or digits[j] != 0:
            continue
        for u, v in oracle_transitions(space, i):
            for s, t in oracle_transitions(space, j):
                f_vt = float(ng[cid + v * p_i + t * p_j])
                f_vs = float(ng[cid + v * p_i + s * p_j])
                f_ut = float(ng[cid + u * p_i + t * p_j])
                f_us = float(ng[cid + u * p_i + s * p_j])
                eps.append(f_vt - f_vs - f_ut + f_us)
    return np.array(eps)


@pytest.fixture
def rng():
    return np.random.default_rng(20240817)
