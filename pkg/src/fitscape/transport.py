"""Exact earth mover's distance between config sets.

Both sets carry uniform weight, so scaling supplies by the opposite set
size turns the problem into an integer transportation instance (every
supply is n_b, every demand n_a, total n_a*n_b on both sides). Costs are
integer index distances, so the optimal cost is an exact integer and the
distance is that integer divided by n_a*n_b. The solver is a transportation
simplex with Bland's rule (lowest flat cell index enters, lowest leaves),
which cannot cycle and is deterministic.
"""

from __future__ import annotations

from collections import deque

import numpy as np

from .errors import FitscapeError, ValidationError
from .space import ConfigSpace

DEFAULT_EMD_CAP = 512
_MAX_PIVOTS = 2_000_000


def _northwest_corner(supply: np.ndarray, demand: np.ndarray):
    """Initial basic feasible solution with exactly m+n-1 basic cells."""
    m, n = supply.shape[0], demand.shape[0]
    sup = supply.copy()
    dem = demand.copy()
    flows: dict[int, int] = {}
    i = j = 0
    while True:
        alloc = min(sup[i], dem[j])
        flows[i * n + j] = int(alloc)
        sup[i] -= alloc
        dem[j] -= alloc
        if i == m - 1 and j == n - 1:
            break
        # on a tie advance one axis only, leaving a zero basic cell
        if sup[i] == 0 and i < m - 1:
            i += 1
        else:
            j += 1
    return flows


def _potentials(basis: list[int], m: int, n: int, cost: np.ndarray):
    """Solve u_i + v_j = c_ij over the spanning tree of basic cells."""
    adj: list[list[tuple[int, int]]] = [[] for _ in range(m + n)]
    for cell in basis:
        i, j = divmod(cell, n)
        adj[i].append((m + j, cell))
        adj[m + j].append((i, cell))
    u = np.zeros(m, dtype=np.int64)
    v = np.zeros(n, dtype=np.int64)
    seen = np.zeros(m + n, dtype=bool)
    seen[0] = True
    queue = deque([0])
    while queue:
        node = queue.popleft()
        for other, cell in adj[node]:
            if seen[other]:
                continue
            seen[other] = True
            i, j = divmod(cell, n)
            if other >= m:
                v[j] = cost[i, j] - u[i]
            else:
                u[i] = cost[i, j] - v[j]
            queue.append(other)
    if not seen.all():
        raise FitscapeError("internal: transportation basis is not a spanning tree")
    return u, v, adj


def _cycle(adj, m: int, n: int, enter: int):
    """Alternating cycle closed by the entering cell: (cell, sign) list."""
    i0, j0 = divmod(enter, n)
    start, goal = i0, m + j0
    parent = {start: (None, None)}
    queue = deque([start])
    while queue:
        node = queue.popleft()
        if node == goal:
            break
        for other, cell in adj[node]:
            if other not in parent:
                parent[other] = (node, cell)
                queue.append(other)
    path_cells = []
    node = goal
    while parent[node][0] is not None:
        node, cell = parent[node][0], parent[node][1]
        path_cells.append(cell)
    path_cells.reverse()  # from start (row of entering cell) to goal
    out = [(enter, +1)]
    sign = -1
    for cell in path_cells:
        out.append((cell, sign))
        sign = -sign
    return out


def transportation_min_cost(cost: np.ndarray, supply: np.ndarray,
                            demand: np.ndarray) -> int:
    """Exact integer minimum transportation cost."""
    cost = np.asarray(cost, dtype=np.int64)
    supply = np.asarray(supply, dtype=np.int64)
    demand = np.asarray(demand, dtype=np.int64)
    m, n = cost.shape
    if supply.shape != (m,) or demand.shape != (n,):
        raise ValidationError("supply/demand shapes do not match the cost matrix")
    if (supply < 0).any() or (demand < 0).any():
        raise ValidationError("negative supply or demand")
    if int(supply.sum()) != int(demand.sum()):
        raise ValidationError("total supply must equal total demand")
    flows = _northwest_corner(supply, demand)
    stall = 0  # consecutive degenerate pivots; Bland's rule breaks any cycle
    for _ in range(_MAX_PIVOTS):
        basis = sorted(flows)
        u, v, adj = _potentials(basis, m, n, cost)
        rc_flat = (cost - u[:, None] - v[None, :]).ravel()
        if stall > m + n:
            neg = rc_flat < 0
            if not neg.any():
                break
            enter = int(np.argmax(neg))  # first negative: Bland's rule
        else:
            enter = int(np.argmin(rc_flat))  # most negative, lowest index on ties
            if rc_flat[enter] >= 0:
                break
        cycle = _cycle(adj, m, n, enter)
        minus = [cell for cell, sign in cycle if sign < 0]
        theta = min(flows[cell] for cell in minus)
        stall = stall + 1 if theta == 0 else 0
        leave = min(cell for cell in minus if flows[cell] == theta)
        flows[enter] = 0
        for cell, sign in cycle:
            flows[cell] += sign * theta
        del flows[leave]
    else:
        raise FitscapeError("internal: transportation simplex did not terminate")
    total = 0
    for cell, flow in flows.items():
        i, j = divmod(cell, n)
        total += int(cost[i, j]) * flow
    return total


def emd(space: ConfigSpace, ids_a, ids_b, sample_cap: int = DEFAULT_EMD_CAP,
        seed: int = 0):
    """EMD between uniform distributions on two config sets.

    Ground distance is the space's config distance. Sets above sample_cap
    are reduced to a seeded uniform subsample and the result is flagged
    approximate. Returns (distance, approximate).
    """
    ids_a = np.unique(np.asarray(ids_a, dtype=np.int64))
    ids_b = np.unique(np.asarray(ids_b, dtype=np.int64))
    if ids_a.shape[0] == 0 or ids_b.shape[0] == 0:
        raise ValidationError("EMD needs non-empty config sets")
    if sample_cap < 1:
        raise ValidationError("sample cap must be at least 1")
    approximate = False
    rng = np.random.default_rng(np.random.SeedSequence(seed & 0xFFFFFFFFFFFFFFFF))
    if ids_a.shape[0] > sample_cap:
        ids_a = np.sort(rng.choice(ids_a, size=sample_cap, replace=False))
        approximate = True
    if ids_b.shape[0] > sample_cap:
        ids_b = np.sort(rng.choice(ids_b, size=sample_cap, replace=False))
        approximate = True
    na, nb = ids_a.shape[0], ids_b.shape[0]
    cost = space.pairwise_distances(ids_a[:, None], ids_b[None, :])
    supply = np.full(na, nb, dtype=np.int64)
    demand = np.full(nb, na, dtype=np.int64)
    total = transportation_min_cost(cost, supply, demand)
    return total / (na * nb), approximate
